//! Embedded, versioned catalog of published UMi parameters.
//!
//! Release `v1` holds the directional and omnidirectional path loss
//! fits, delay and angular spread statistics, and direction counts
//! measured at 28 GHz (Manhattan), 38 GHz (Austin), 73 GHz and 142 GHz
//! (Brooklyn), plus the 3GPP UMi CI rows used for comparison. Values are
//! stored verbatim; N/A cells are `None`. Nothing is interpolated.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde_json::{json, Value};

use crate::error::{domain, Error, Result};
use crate::pathloss::{CiParams, CifParams, Frequency, ModelParams};
use crate::scenario::{Directionality, Scenario};
use crate::stochastic::{ChannelStatistics, PublishedCount, PublishedSpread};

pub const CATALOG_VERSION: &str = "v1";

/// Measured carrier bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Band {
    Ghz28,
    Ghz38,
    Ghz73,
    Ghz142,
}

impl Band {
    pub const ALL: [Band; 4] = [Band::Ghz28, Band::Ghz38, Band::Ghz73, Band::Ghz142];

    pub fn ghz(self) -> f64 {
        match self {
            Band::Ghz28 => 28.0,
            Band::Ghz38 => 38.0,
            Band::Ghz73 => 73.0,
            Band::Ghz142 => 142.0,
        }
    }

    pub fn frequency(self) -> Frequency {
        Frequency::from_ghz(self.ghz()).expect("positive band")
    }

    pub fn from_frequency(f: Frequency) -> Option<Band> {
        Band::ALL.into_iter().find(|b| b.ghz() == f.ghz())
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ghz())
    }
}

/// Which published fit a catalog entry holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    CiSingle,
    CiMulti,
    CifMulti,
    ThreeGppCi,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::CiSingle => "CI_SINGLE",
            ModelKind::CiMulti => "CI_MULTI",
            ModelKind::CifMulti => "CIF_MULTI",
            ModelKind::ThreeGppCi => "THREEGPP_CI",
        }
    }

    /// Single-band kinds are keyed by band; the rest span all bands.
    pub fn is_single_band(self) -> bool {
        self == ModelKind::CiSingle
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CatalogKey {
    /// `None` for multi-band and 3GPP entries.
    pub band: Option<Band>,
    pub scenario: Scenario,
    pub directionality: Directionality,
    pub model: ModelKind,
}

impl fmt::Display for CatalogKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.band {
            Some(b) => write!(f, "{b},{},{},{}", self.scenario, self.directionality, self.model),
            None => write!(f, "*,{},{},{}", self.scenario, self.directionality, self.model),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub table_id: &'static str,
    pub campaign_city: &'static str,
    pub distance_range_m: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub key: CatalogKey,
    pub params: ModelParams,
    pub provenance: Provenance,
}

/// How much of a published statistic block exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Availability {
    Full,
    Partial,
    Absent,
}

impl Availability {
    fn of_spread(s: &PublishedSpread) -> Self {
        if s.is_complete() {
            Availability::Full
        } else if s.is_absent() {
            Availability::Absent
        } else {
            Availability::Partial
        }
    }

    fn of_count(c: &PublishedCount) -> Self {
        match (c.mean, c.std) {
            (Some(_), Some(_)) => Availability::Full,
            (None, None) => Availability::Absent,
            _ => Availability::Partial,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Availability::Full => "available",
            Availability::Partial => "partial",
            Availability::Absent => "N/A",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub key: CatalogKey,
    pub ds: Availability,
    pub asa: Availability,
    pub asd: Availability,
    pub n_aoa: Availability,
    pub n_aod: Availability,
}

/// Parsed `"<band_ghz>,<scenario>,<directionality>"` selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selector {
    pub band: Band,
    pub scenario: Scenario,
    pub directionality: Directionality,
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(domain(format!(
                "catalog selector '{s}' must look like \"142,LOS,OMNI\" (band_ghz,scenario,directionality)"
            )));
        }
        let ghz: f64 = parts[0]
            .trim_end_matches("GHz")
            .trim_end_matches("ghz")
            .trim()
            .parse()
            .map_err(|_| domain(format!("band '{}' is not a number of GHz", parts[0])))?;
        let band = Band::ALL.into_iter().find(|b| b.ghz() == ghz).ok_or_else(|| {
            let nearest = Band::ALL
                .into_iter()
                .min_by(|a, b| (a.ghz() - ghz).abs().total_cmp(&(b.ghz() - ghz).abs()))
                .expect("bands");
            domain(format!(
                "band {ghz} GHz is not measured; did you mean {}? (bands: 28, 38, 73, 142)",
                nearest.ghz()
            ))
        })?;
        let scenario = parts[1].parse::<Scenario>().map_err(|_| {
            unknown_token("scenario", parts[1], &Scenario::ALL.map(Scenario::as_str))
        })?;
        let directionality = parts[2].parse::<Directionality>().map_err(|_| {
            unknown_token("directionality", parts[2], &["DIRECTIONAL", "OMNI"])
        })?;
        Ok(Selector { band, scenario, directionality })
    }
}

fn edit_distance(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut prev = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cur = row[j + 1];
            row[j + 1] = (prev + usize::from(ca != *cb)).min(row[j] + 1).min(cur + 1);
            prev = cur;
        }
    }
    row[b.len()]
}

fn unknown_token(what: &str, got: &str, valid: &[&str]) -> Error {
    let upper = got.trim().to_ascii_uppercase();
    let best = valid
        .iter()
        .min_by_key(|v| edit_distance(&upper, v))
        .expect("non-empty");
    domain(format!(
        "unknown {what} '{got}'; did you mean {best}? (valid: {})",
        valid.join(", ")
    ))
}

/// Channel sounder used for one campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct SounderSpec {
    pub band: Band,
    pub rf_bandwidth_ghz: f64,
    /// Half-power beamwidths; 73 GHz used two horn types.
    pub hpbw_deg: &'static [f64],
    pub gain_dbi: &'static [f64],
    pub campaign: &'static str,
}

pub struct Catalog {
    pub version: &'static str,
    entries: Vec<CatalogEntry>,
    stats: Vec<ChannelStatistics>,
    sounders: Vec<SounderSpec>,
}

fn sounders_v1() -> Vec<SounderSpec> {
    let s = |band, rf_bandwidth_ghz, hpbw_deg, gain_dbi, campaign| SounderSpec {
        band,
        rf_bandwidth_ghz,
        hpbw_deg,
        gain_dbi,
        campaign,
    };
    vec![
        s(Band::Ghz28, 0.8, &[10.9], &[24.5], "Manhattan 2012"),
        s(Band::Ghz38, 0.8, &[7.8], &[25.0], "Austin 2011"),
        s(Band::Ghz73, 1.0, &[7.0, 15.0], &[27.0, 20.0], "Brooklyn 2016"),
        s(Band::Ghz142, 1.0, &[8.0], &[27.0], "Brooklyn 2020"),
    ]
}

const DIRECTIONAL_TABLE: &str = "UMI-DIRECTIONAL";
const OMNI_TABLE: &str = "UMI-OMNI";

fn campaign(band: Band) -> (&'static str, (f64, f64)) {
    match band {
        Band::Ghz28 => ("Manhattan", (31.0, 187.0)),
        Band::Ghz38 => ("Austin", (29.0, 930.0)),
        Band::Ghz73 => ("Brooklyn", (21.0, 170.0)),
        Band::Ghz142 => ("Brooklyn", (24.0, 117.0)),
    }
}

const MULTI_CITY: &str = "Manhattan, Austin, Brooklyn";
const MULTI_RANGE: (f64, f64) = (21.0, 930.0);

fn f0_for(scenario: Scenario) -> Frequency {
    // weighted average frequency of the pooled data set
    Frequency::from_ghz(if scenario.is_los() { 73.0 } else { 62.0 }).expect("f0")
}

fn ci(n: f64, sigma: f64) -> ModelParams {
    ModelParams::Ci(CiParams { n, sigma_db: sigma })
}

fn cif(n: f64, b: f64, sigma: f64, scenario: Scenario) -> ModelParams {
    ModelParams::Cif(CifParams {
        n,
        b,
        f0: f0_for(scenario),
        sigma_db: sigma,
    })
}

const NA: PublishedSpread = PublishedSpread::NA;
const fn sp(min: f64, max: f64, mean: f64, std: f64) -> PublishedSpread {
    PublishedSpread::new(min, max, mean, std)
}
const fn cnt(mean: f64, std: f64) -> PublishedCount {
    PublishedCount::new(mean, std)
}

fn build_v1() -> Catalog {
    use Directionality::*;
    use Scenario::*;

    let mut entries = Vec::new();
    let mut push = |band: Option<Band>, scenario, dir, model, params, table_id| {
        let (city, range) = match (band, model) {
            (Some(b), _) => {
                let (c, r) = campaign(b);
                (c, Some(r))
            }
            (None, ModelKind::ThreeGppCi) => ("3GPP UMi, 0.5-100 GHz", None),
            (None, _) => (MULTI_CITY, Some(MULTI_RANGE)),
        };
        entries.push(CatalogEntry {
            key: CatalogKey { band, scenario, directionality: dir, model },
            params,
            provenance: Provenance {
                table_id,
                campaign_city: city,
                distance_range_m: range,
            },
        });
    };

    // Directional single-band CI: (n, sigma) per band.
    let directional_ci: [(Scenario, [(f64, f64); 4]); 3] = [
        (Los, [(2.3, 4.3), (1.9, 3.5), (2.0, 1.9), (2.1, 2.8)]),
        (NlosBest, [(3.8, 9.3), (2.7, 7.9), (3.1, 10.5), (3.1, 8.3)]),
        (Nlos, [(4.5, 10.0), (3.3, 10.3), (4.6, 10.5), (3.60, 9.1)]),
    ];
    for (scenario, row) in directional_ci {
        for (band, (n, s)) in Band::ALL.into_iter().zip(row) {
            push(Some(band), scenario, Directional, ModelKind::CiSingle, ci(n, s), DIRECTIONAL_TABLE);
        }
    }
    for (scenario, (n, s), (cn, cb, cs)) in [
        (Los, (2.07, 3.6), (2.07, -0.10, 3.5)),
        (NlosBest, (3.21, 9.8), (3.21, -0.03, 9.6)),
        (Nlos, (3.96, 11.5), (3.96, -0.05, 11.5)),
    ] {
        push(None, scenario, Directional, ModelKind::CiMulti, ci(n, s), DIRECTIONAL_TABLE);
        push(None, scenario, Directional, ModelKind::CifMulti, cif(cn, cb, cs, scenario), DIRECTIONAL_TABLE);
    }

    // Omnidirectional single-band CI.
    let omni_ci: [(Scenario, [(f64, f64); 4]); 2] = [
        (Los, [(2.1, 3.6), (1.9, 4.4), (1.9, 1.7), (1.9, 2.7)]),
        (Nlos, [(3.4, 9.7), (2.7, 10.1), (2.8, 8.7), (2.9, 8.2)]),
    ];
    for (scenario, row) in omni_ci {
        for (band, (n, s)) in Band::ALL.into_iter().zip(row) {
            push(Some(band), scenario, Omni, ModelKind::CiSingle, ci(n, s), OMNI_TABLE);
        }
    }
    for (scenario, (n, s), (cn, cb, cs), (gn, gs)) in [
        (Los, (1.91, 3.72), (1.91, -0.03, 3.69), (2.1, 4.0)),
        (Nlos, (2.96, 10.93), (2.96, -0.05, 10.71), (3.2, 8.2)),
    ] {
        push(None, scenario, Omni, ModelKind::CiMulti, ci(n, s), OMNI_TABLE);
        push(None, scenario, Omni, ModelKind::CifMulti, cif(cn, cb, cs, scenario), OMNI_TABLE);
        push(None, scenario, Omni, ModelKind::ThreeGppCi, ci(gn, gs), OMNI_TABLE);
    }

    // RMS delay spread (ns), directional: min, max, mean, std.
    let ds: [(Scenario, [PublishedSpread; 4]); 3] = [
        (Los, [sp(0.8, 2.6, 0.9, 1.0), NA, sp(0.7, 0.7, 0.7, 0.1), sp(0.7, 13.9, 1.7, 3.4)]),
        (
            NlosBest,
            [sp(1.0, 165.1, 17.9, 13.0), NA, sp(0.6, 77.0, 10.3, 18.7), sp(0.6, 32.7, 4.5, 9.7)],
        ),
        (
            Nlos,
            [
                sp(0.5, 420.0, 25.7, 25.0),
                PublishedSpread {
                    min: Some(1.0),
                    max: Some(180.0),
                    mean: Some(11.4),
                    std: None,
                },
                sp(0.5, 290.1, 23.4, 31.6),
                sp(0.6, 53.0, 9.2, 17.4),
            ],
        ),
    ];
    let mut stats = Vec::new();
    for (scenario, row) in ds {
        for (band, ds) in Band::ALL.into_iter().zip(row) {
            stats.push(ChannelStatistics {
                band,
                scenario,
                directionality: Directional,
                ds,
                asa: NA,
                asd: NA,
                n_aoa: PublishedCount::NA,
                n_aod: PublishedCount::NA,
            });
        }
    }

    // Omnidirectional angular statistics (degrees) and direction counts.
    type OmniRow = (PublishedSpread, PublishedSpread, PublishedCount, PublishedCount);
    let omni: [(Scenario, [OmniRow; 4]); 2] = [
        (
            Los,
            [
                (sp(0.0, 58.4, 30.8, 26.2), sp(0.0, 42.9, 12.5, 16.0), cnt(3.6, 3.4), cnt(2.1, 2.6)),
                (NA, NA, PublishedCount::NA, PublishedCount::NA),
                (sp(8.8, 36.3, 19.3, 8.9), sp(3.2, 10.8, 5.3, 2.4), cnt(2.8, 3.2), cnt(1.6, 1.0)),
                (sp(3.2, 15.3, 10.1, 3.1), sp(0.6, 21.7, 6.0, 5.3), cnt(1.9, 1.1), cnt(1.3, 1.3)),
            ],
        ),
        (
            Nlos,
            [
                (sp(2.6, 62.2, 32.5, 23.8), sp(4.0, 40.4, 22.4, 12.0), cnt(4.7, 3.0), cnt(3.3, 2.5)),
                (NA, NA, PublishedCount::NA, PublishedCount::NA),
                (sp(15.3, 65.6, 33.5, 12.3), sp(7.0, 33.7, 15.8, 8.4), cnt(4.3, 2.8), cnt(2.2, 1.9)),
                (sp(3.4, 59.2, 32.5, 18.2), sp(0.0, 18.0, 6.3, 6.5), cnt(4.1, 2.6), cnt(1.6, 2.1)),
            ],
        ),
    ];
    for (scenario, row) in omni {
        for (band, (asa, asd, n_aoa, n_aod)) in Band::ALL.into_iter().zip(row) {
            stats.push(ChannelStatistics {
                band,
                scenario,
                directionality: Omni,
                ds: NA,
                asa,
                asd,
                n_aoa,
                n_aod,
            });
        }
    }

    Catalog {
        version: CATALOG_VERSION,
        entries,
        stats,
        sounders: sounders_v1(),
    }
}

impl Catalog {
    /// The immutable v1 release.
    pub fn v1() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(build_v1)
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn all_stats(&self) -> &[ChannelStatistics] {
        &self.stats
    }

    pub fn sounders(&self) -> &[SounderSpec] {
        &self.sounders
    }

    pub fn sounder(&self, band: Band) -> &SounderSpec {
        self.sounders.iter().find(|s| s.band == band).expect("every band has a sounder")
    }

    fn grid_summary(&self) -> String {
        let mut cells: Vec<String> = self
            .stats
            .iter()
            .map(|s| format!("{},{},{}", s.band.ghz(), s.scenario, s.directionality))
            .collect();
        cells.dedup();
        cells.join("; ")
    }

    pub fn get_params(&self, key: &CatalogKey) -> Result<ModelParams> {
        self.entry(key).map(|e| e.params)
    }

    pub fn entry(&self, key: &CatalogKey) -> Result<&CatalogEntry> {
        self.entries.iter().find(|e| e.key == *key).ok_or_else(|| Error::NotInCatalog {
            query: key.to_string(),
            grid: self
                .entries
                .iter()
                .map(|e| e.key.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        })
    }

    pub fn stats(&self, band: Band, scenario: Scenario, dir: Directionality) -> Result<&ChannelStatistics> {
        self.stats
            .iter()
            .find(|s| s.band == band && s.scenario == scenario && s.directionality == dir)
            .ok_or_else(|| Error::NotInCatalog {
                query: format!("{},{scenario},{dir}", band.ghz()),
                grid: self.grid_summary(),
            })
    }

    /// Params for `model` at a selector; the band is ignored for
    /// multi-band and 3GPP kinds.
    pub fn params_for(&self, model: ModelKind, sel: &Selector) -> Result<ModelParams> {
        self.get_params(&CatalogKey {
            band: model.is_single_band().then_some(sel.band),
            scenario: sel.scenario,
            directionality: sel.directionality,
            model,
        })
    }

    /// Every key in a fixed order with statistic availability flags.
    pub fn list_grid(&self) -> Vec<GridEntry> {
        let mut grid: Vec<GridEntry> = self
            .entries
            .iter()
            .map(|e| {
                let stats = e
                    .key
                    .band
                    .and_then(|b| self.stats(b, e.key.scenario, e.key.directionality).ok());
                let spread = |f: fn(&ChannelStatistics) -> &PublishedSpread| {
                    stats.map_or(Availability::Absent, |s| Availability::of_spread(f(s)))
                };
                let count = |f: fn(&ChannelStatistics) -> &PublishedCount| {
                    stats.map_or(Availability::Absent, |s| Availability::of_count(f(s)))
                };
                GridEntry {
                    key: e.key,
                    ds: spread(|s| &s.ds),
                    asa: spread(|s| &s.asa),
                    asd: spread(|s| &s.asd),
                    n_aoa: count(|s| &s.n_aoa),
                    n_aod: count(|s| &s.n_aod),
                }
            })
            .collect();
        grid.sort_by_key(|g| g.key);
        grid
    }
}

/// Statistics for a band given as a frequency; off-grid frequencies fail.
pub fn catalog_lookup(band: Frequency, scenario: Scenario, dir: Directionality) -> Result<ChannelStatistics> {
    let cat = Catalog::v1();
    let b = Band::from_frequency(band).ok_or_else(|| Error::NotInCatalog {
        query: format!("{},{scenario},{dir}", band.ghz()),
        grid: cat.grid_summary(),
    })?;
    cat.stats(b, scenario, dir).cloned()
}

pub fn get_params(key: &CatalogKey) -> Result<ModelParams> {
    Catalog::v1().get_params(key)
}

pub fn list_grid() -> Vec<GridEntry> {
    Catalog::v1().list_grid()
}

// ---------------------------------------------------------------------------
// Export

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |x| json!(x))
}

fn params_json(p: &ModelParams) -> Value {
    match p {
        ModelParams::Ci(c) => json!({ "model": "CI", "n": c.n, "sigma_db": c.sigma_db }),
        ModelParams::Cif(c) => json!({
            "model": "CIF", "n": c.n, "b": c.b, "f0_ghz": c.f0.ghz(), "sigma_db": c.sigma_db
        }),
    }
}

fn spread_json(s: &PublishedSpread) -> Value {
    json!({ "min": opt(s.min), "max": opt(s.max), "mean": opt(s.mean), "std": opt(s.std) })
}

fn count_json(c: &PublishedCount) -> Value {
    json!({ "mean": opt(c.mean), "std": opt(c.std) })
}

impl Catalog {
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "band_ghz": e.key.band.map(|b| b.ghz()),
                    "scenario": e.key.scenario.as_str(),
                    "directionality": e.key.directionality.as_str(),
                    "kind": e.key.model.as_str(),
                    "params": params_json(&e.params),
                    "provenance": {
                        "table_id": e.provenance.table_id,
                        "campaign_city": e.provenance.campaign_city,
                        "distance_range_m": e.provenance.distance_range_m.map(|(a, b)| vec![a, b]),
                    }
                })
            })
            .collect();
        let stats: Vec<Value> = self
            .stats
            .iter()
            .map(|s| {
                json!({
                    "band_ghz": s.band.ghz(),
                    "scenario": s.scenario.as_str(),
                    "directionality": s.directionality.as_str(),
                    "ds_ns": spread_json(&s.ds),
                    "asa_deg": spread_json(&s.asa),
                    "asd_deg": spread_json(&s.asd),
                    "n_aoa": count_json(&s.n_aoa),
                    "n_aod": count_json(&s.n_aod),
                })
            })
            .collect();
        let sounders: Vec<Value> = self
            .sounders
            .iter()
            .map(|s| {
                json!({
                    "band_ghz": s.band.ghz(),
                    "rf_bandwidth_ghz": s.rf_bandwidth_ghz,
                    "hpbw_deg": s.hpbw_deg,
                    "gain_dbi": s.gain_dbi,
                    "campaign": s.campaign,
                })
            })
            .collect();
        json!({ "version": self.version, "sounders": sounders, "entries": entries, "statistics": stats })
    }

    /// One row per published cell: `directionality,scenario,band,quantity,value`.
    /// `band` is the band in GHz, `multi` or `3gpp`; N/A cells read `N/A`.
    pub fn cells(&self) -> Vec<(String, String, String, String, String)> {
        let fmt = num_or_na;
        let mut rows = Vec::new();
        for e in &self.entries {
            let band = match (e.key.band, e.key.model) {
                (Some(b), _) => b.ghz().to_string(),
                (None, ModelKind::ThreeGppCi) => "3gpp".into(),
                (None, _) => "multi".into(),
            };
            let prefix = match e.key.model {
                ModelKind::CiSingle | ModelKind::CiMulti | ModelKind::ThreeGppCi => "ci",
                ModelKind::CifMulti => "cif",
            };
            let mut q: Vec<(String, Option<f64>)> = vec![(format!("{prefix}_n"), Some(e.params.n()))];
            if let ModelParams::Cif(c) = e.params {
                q.push(("cif_b".into(), Some(c.b)));
                q.push(("cif_f0_ghz".into(), Some(c.f0.ghz())));
            }
            q.push((format!("{prefix}_sigma_db"), Some(e.params.sigma_db())));
            for (name, v) in q {
                rows.push((
                    e.key.directionality.as_str().to_string(),
                    e.key.scenario.as_str().to_string(),
                    band.clone(),
                    name,
                    fmt(v),
                ));
            }
        }
        for s in &self.stats {
            let mut q: Vec<(String, Option<f64>)> = Vec::new();
            let spreads: &[(&str, &PublishedSpread)] = match s.directionality {
                Directionality::Directional => &[("ds", &s.ds)],
                Directionality::Omni => &[("asa", &s.asa), ("asd", &s.asd)],
            };
            for (name, p) in spreads {
                for (stat, v) in [("min", p.min), ("max", p.max), ("mean", p.mean), ("std", p.std)] {
                    q.push((format!("{name}_{stat}"), v));
                }
            }
            if s.directionality == Directionality::Omni {
                for (name, c) in [("n_aoa", &s.n_aoa), ("n_aod", &s.n_aod)] {
                    q.push((format!("{name}_mean"), c.mean));
                    q.push((format!("{name}_std"), c.std));
                }
            }
            for (name, v) in q {
                rows.push((
                    s.directionality.as_str().to_string(),
                    s.scenario.as_str().to_string(),
                    s.band.ghz().to_string(),
                    name,
                    fmt(v),
                ));
            }
        }
        rows
    }
}


// ---------------------------------------------------------------------------
// Aligned text tables, one per directionality, bands as columns.

/// Published style: at least one decimal.
fn published(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.1}")
    } else {
        x.to_string()
    }
}

fn num_or_na(v: Option<f64>) -> String {
    v.map_or("N/A".to_string(), published)
}

fn spread_cell(s: &PublishedSpread) -> String {
    [s.min, s.max, s.mean, s.std].map(num_or_na).join(" / ")
}

fn count_cell(c: &PublishedCount) -> String {
    [c.mean, c.std].map(num_or_na).join(" / ")
}

fn params_cell(p: &ModelParams) -> String {
    match p {
        ModelParams::Ci(c) => format!("{} / {}", published(c.n), published(c.sigma_db)),
        ModelParams::Cif(c) => format!(
            "{} / {} / {} / {}",
            published(c.n),
            published(c.b),
            published(c.sigma_db),
            published(c.f0.ghz())
        ),
    }
}

fn render(title: &str, header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width = vec![0; cols];
    // single-cell rows (section titles, multi-band values) span the table
    for r in std::iter::once(header).chain(rows.iter().filter(|r| r.len() > 1).map(Vec::as_slice)) {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |r: &[String]| {
        let mut s = String::new();
        for (i, c) in r.iter().enumerate() {
            if i == 0 {
                s.push_str(&format!("{c:<w$}", w = width[0]));
            } else {
                s.push_str(&format!("  {c:>w$}", w = width[i]));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = format!("{title}\n");
    out.push_str(&line(header));
    let total: usize = width.iter().sum::<usize>() + 2 * (cols - 1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

impl Catalog {
    fn band_rows(
        &self,
        rows: &mut Vec<Vec<String>>,
        section: &str,
        scenarios: &[Scenario],
        dir: Directionality,
        cell: impl Fn(&ChannelStatistics) -> String,
    ) {
        rows.push(vec![section.to_string()]);
        for &sc in scenarios {
            let mut r = vec![format!("  {sc}")];
            for b in Band::ALL {
                r.push(self.stats(b, sc, dir).map_or("N/A".into(), &cell));
            }
            rows.push(r);
        }
    }

    fn model_rows(&self, rows: &mut Vec<Vec<String>>, section: &str, scenarios: &[Scenario], dir: Directionality, kind: ModelKind) {
        rows.push(vec![section.to_string()]);
        for &sc in scenarios {
            let mut r = vec![format!("  {sc}")];
            if kind.is_single_band() {
                for b in Band::ALL {
                    let key = CatalogKey { band: Some(b), scenario: sc, directionality: dir, model: kind };
                    r.push(self.get_params(&key).map_or("N/A".into(), |p| params_cell(&p)));
                }
            } else {
                let key = CatalogKey { band: None, scenario: sc, directionality: dir, model: kind };
                let cell = self.get_params(&key).map_or("N/A".into(), |p| params_cell(&p));
                r = vec![format!("  {:<11}{cell}  (all bands)", sc.as_str())];
            }
            rows.push(r);
        }
    }

    /// Both tables as aligned text; N/A marks unpublished cells.
    pub fn to_text_tables(&self) -> String {
        use Scenario::*;
        let mut header = vec!["".to_string()];
        header.extend(Band::ALL.map(|b| format!("{} GHz", b.ghz())));
        let list = |v: &[f64]| v.iter().map(|x| published(*x)).collect::<Vec<_>>().join("/");

        let mut rows = Vec::new();
        for (label, cell) in [
            ("RF bandwidth [GHz]", &(|s: &SounderSpec| published(s.rf_bandwidth_ghz)) as &dyn Fn(&SounderSpec) -> String),
            ("Antenna HPBW [deg]", &|s: &SounderSpec| list(s.hpbw_deg)),
            ("Antenna gain [dBi]", &|s: &SounderSpec| list(s.gain_dbi)),
            ("Campaign", &|s: &SounderSpec| s.campaign.to_string()),
        ] {
            let mut r = vec![label.to_string()];
            r.extend(Band::ALL.map(|b| cell(self.sounder(b))));
            rows.push(r);
        }
        let mut out = render("UMi measurement campaigns", &header, &rows);
        out.push('\n');

        let dir = Directionality::Directional;
        let all = [Los, NlosBest, Nlos];
        let mut rows = Vec::new();
        self.model_rows(&mut rows, "Single-band CI: n / sigma [dB]", &all, dir, ModelKind::CiSingle);
        self.model_rows(&mut rows, "Multi-band CI: n / sigma [dB]", &all, dir, ModelKind::CiMulti);
        self.model_rows(&mut rows, "Multi-band CIF: n / b / sigma [dB] / f0 [GHz]", &all, dir, ModelKind::CifMulti);
        self.band_rows(&mut rows, "RMS DS [ns]: min / max / mean / std", &all, dir, |s| spread_cell(&s.ds));
        out.push_str(&render(
            &format!("UMi directional parameters (catalog {}; d0 = 1 m)", self.version),
            &header,
            &rows,
        ));

        let dir = Directionality::Omni;
        let omni = [Los, Nlos];
        let mut rows = Vec::new();
        self.model_rows(&mut rows, "Single-band CI: n / sigma [dB]", &omni, dir, ModelKind::CiSingle);
        self.model_rows(&mut rows, "Multi-band CI: n / sigma [dB]", &omni, dir, ModelKind::CiMulti);
        self.model_rows(&mut rows, "Multi-band CIF: n / b / sigma [dB] / f0 [GHz]", &omni, dir, ModelKind::CifMulti);
        self.model_rows(&mut rows, "3GPP UMi CI: n / sigma [dB]", &omni, dir, ModelKind::ThreeGppCi);
        self.band_rows(&mut rows, "RMS ASA [deg]: min / max / mean / std", &omni, dir, |s| spread_cell(&s.asa));
        self.band_rows(&mut rows, "RMS ASD [deg]: min / max / mean / std", &omni, dir, |s| spread_cell(&s.asd));
        self.band_rows(&mut rows, "AOA directions: mean / std", &omni, dir, |s| count_cell(&s.n_aoa));
        self.band_rows(&mut rows, "AOD directions: mean / std", &omni, dir, |s| count_cell(&s.n_aod));
        out.push('\n');
        out.push_str(&render(
            &format!("UMi omnidirectional parameters (catalog {}; d0 = 1 m)", self.version),
            &header,
            &rows,
        ));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("directionality,scenario,band,quantity,value\n");
        for (a, b, c, d, e) in self.cells() {
            out.push_str(&format!("{a},{b},{c},{d},{e}\n"));
        }
        out
    }
}

impl Provenance {
    /// Caption form, e.g. "Brooklyn, 24-117 m".
    pub fn caption(&self) -> String {
        match self.distance_range_m {
            Some((lo, hi)) => format!("{}, {lo}-{hi} m", self.campaign_city),
            None => self.campaign_city.to_string(),
        }
    }
}
