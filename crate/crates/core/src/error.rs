use thiserror::Error;

/// Errors raised by the modeling toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// All distances sit on the 1 m anchor, so the regression has no leverage.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// The CIF normal equations are singular (typically a single band).
    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    #[error("fit failure: {0}")]
    FitFailure(String),

    /// Mixed scenarios or directionalities in one fit.
    #[error("inconsistent records: {0}")]
    InconsistentRecords(String),

    /// Every tap or bin was removed by thresholding.
    #[error("empty profile: {0}")]
    EmptyProfile(String),

    /// A published statistic is marked N/A and cannot be used.
    #[error("statistic unavailable: {field} is N/A for {entry}")]
    Unavailable { entry: String, field: String },

    #[error("not in catalog: {query}; valid grid: {grid}")]
    NotInCatalog { query: String, grid: String },

    /// The link budget is exhausted before the 1 m anchor.
    #[error("link budget below anchor: budget {budget_db:.2} dB < FSPL(1 m) {anchor_db:.2} dB")]
    BelowAnchor { budget_db: f64, anchor_db: f64 },

    #[error("unknown {kind} '{name}'; available: {available}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    /// Located parse failure in a text input.
    #[error("line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
