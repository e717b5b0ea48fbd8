//! The `umi-prop` command line.
//!
//! [`run`] takes argv and returns the exit code with captured stdout and
//! stderr, so the whole interface is testable in-process. Exit codes:
//! 0 success, 1 domain or validation error, 2 usage error.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::catalog::{Catalog, Selector};
use crate::error::{domain, Error, Result};
use crate::fitting::{FitOptions, SigmaNormalization};
use crate::io::{self, fmt_sig, sig, Profile};
use crate::linkbudget::{
    antenna_gain, coverage_sim, max_range, noise_power, snr, AntennaSpec, Deployment, LinkConfig, LosPolicy,
};
use crate::models::model_registry;
use crate::pathloss::{Frequency, ModelParams};
use crate::profiles::{
    count_directions, spread_registry, spread_stats, threshold_pdp, DEFAULT_PAS_DOWN_DB, DEFAULT_PDP_SNR_DB,
};
use crate::scenario::Scenario;
use crate::stochastic::RealizationSampler;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "umi-prop",
    version,
    about = "Urban microcell path loss, channel statistics and link budgets at 28, 38, 73 and 142 GHz",
    after_help = "Units: frequencies in GHz, distances in meters, powers in dB/dBm, angles in degrees, delays in ns."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Ci,
    Cif,
}

impl ModelArg {
    fn name(self) -> &'static str {
        match self {
            ModelArg::Ci => "ci",
            ModelArg::Cif => "cif",
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a CI or CIF model to a measurement CSV.
    Fit(FitArgs),
    /// Mean path loss from a catalog model.
    Predict(PredictArgs),
    /// Draw channel realizations from catalog statistics.
    Sample(SampleArgs),
    /// RMS delay or angular spread of measured profiles.
    Stats(StatsArgs),
    /// Noise floor, gains, SNR and maximum range of one link.
    LinkBudget(LinkBudgetArgs),
    /// Monte Carlo SNR coverage over a circular cell.
    Coverage(CoverageArgs),
    /// Print the full parameter catalog.
    Tables(TablesArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Model family
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Measurement CSV (freq in GHz, distance in m, path loss in dB)
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Anchor frequency f0 for CIF [GHz]; default is the weighted average of the data
    #[arg(long, value_name = "GHZ")]
    f0_ghz: Option<f64>,
    /// Report sigma [dB] with N - p normalization instead of N
    #[arg(long)]
    sigma_dof: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Model family
    #[arg(long, value_enum, default_value_t = ModelArg::Ci)]
    model: ModelArg,
    /// Catalog point "<band_ghz>,<scenario>,<directionality>", e.g. "142,LOS,OMNI"
    #[arg(long, value_name = "KEY")]
    catalog: String,
    /// Carrier frequency [GHz]; defaults to the catalog band
    #[arg(long, value_name = "F")]
    freq_ghz: Option<f64>,
    /// TX-RX 3D distance [m]; repeat for several distances
    #[arg(long, value_name = "D", required = true)]
    distance: Vec<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Catalog point "<band_ghz>,<scenario>,<directionality>"
    #[arg(long, value_name = "KEY")]
    catalog: String,
    /// Path loss model family for the shadowed path loss
    #[arg(long, value_enum, default_value_t = ModelArg::Ci)]
    model: ModelArg,
    /// TX-RX 3D distance [m], at least 1
    #[arg(long, value_name = "D")]
    distance: f64,
    /// Number of realizations
    #[arg(long, value_name = "N", default_value_t = 1)]
    count: usize,
    /// RNG seed (unsigned integer); output is byte-identical for equal seeds
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Profile file(s): delay_ns,power_db or azimuth_deg,power_db
    #[arg(long, value_name = "PATH", required = true)]
    input: Vec<PathBuf>,
    /// Threshold [dB]: SNR above the noise floor for delay profiles (default 5),
    /// dB below the peak for angular profiles (default 30)
    #[arg(long, value_name = "X")]
    threshold_db: Option<f64>,
    /// Angular spread definition
    #[arg(long, value_name = "METHOD", default_value = "wrapped")]
    spread_method: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct LinkArgs {
    /// Model family
    #[arg(long, value_enum, default_value_t = ModelArg::Ci)]
    model: ModelArg,
    /// Catalog point supplying the path loss model, e.g. "28,LOS,OMNI"
    #[arg(long, value_name = "KEY")]
    catalog: String,
    /// Carrier frequency [GHz]; defaults to the catalog band
    #[arg(long, value_name = "F")]
    freq_ghz: Option<f64>,
    /// Transmit power [dBm]
    #[arg(long, value_name = "DBM", default_value_t = 30.0)]
    tx_power_dbm: f64,
    /// TX antenna gain [dBi] at --gain-ref-ghz
    #[arg(long, value_name = "DBI", default_value_t = 24.5)]
    tx_gain_dbi: f64,
    /// RX antenna gain [dBi] at --gain-ref-ghz
    #[arg(long, value_name = "DBI", default_value_t = 24.5)]
    rx_gain_dbi: f64,
    /// Frequency [GHz] at which the gains are quoted
    #[arg(long, value_name = "GHZ", default_value_t = 28.0)]
    gain_ref_ghz: f64,
    /// Scale the TX gain as f^2 (constant physical aperture)
    #[arg(long)]
    tx_constant_aperture: bool,
    /// Scale the RX gain as f^2 (constant physical aperture)
    #[arg(long)]
    rx_constant_aperture: bool,
    /// Noise bandwidth [Hz]
    #[arg(long, value_name = "HZ", default_value_t = 800e6)]
    bandwidth_hz: f64,
    /// Receiver noise figure [dB]
    #[arg(long, value_name = "DB", default_value_t = 5.0)]
    noise_figure_db: f64,
    /// Minimum SNR for coverage [dB]
    #[arg(long, value_name = "DB", default_value_t = 0.0)]
    required_snr_db: f64,
}

#[derive(Debug, Args)]
struct LinkBudgetArgs {
    #[command(flatten)]
    link: LinkArgs,
    /// Distance [m] at which to report the mean SNR
    #[arg(long, value_name = "D")]
    distance: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct CoverageArgs {
    #[command(flatten)]
    link: LinkArgs,
    /// Cell radius [m]
    #[arg(long, value_name = "M", default_value_t = 200.0)]
    cell_radius_m: f64,
    /// Number of user drops
    #[arg(long, value_name = "N", default_value_t = 10_000)]
    n_drops: usize,
    /// LOS assignment: always-los, always-nlos or distance:<break_m>
    #[arg(long, value_name = "POLICY", default_value = "always-los")]
    los_policy: String,
    /// RNG seed (unsigned integer); output is byte-identical for equal seeds
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct TablesArgs {
    #[command(flatten)]
    out: OutputArgs,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command. `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let (out, body) = match dispatch(&cli.command) {
        Ok(v) => v,
        Err(e) => {
            return Outcome {
                code: EXIT_DOMAIN,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    };
    match &out.output {
        Some(path) => match std::fs::write(path, body) {
            Ok(()) => Outcome {
                code: EXIT_OK,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome {
                code: EXIT_DOMAIN,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
        None => Outcome {
            code: EXIT_OK,
            stdout: body,
            stderr: String::new(),
        },
    }
}

fn dispatch(cmd: &Command) -> Result<(&OutputArgs, String)> {
    Ok(match cmd {
        Command::Fit(a) => (&a.out, cmd_fit(a)?),
        Command::Predict(a) => (&a.out, cmd_predict(a)?),
        Command::Sample(a) => (&a.out, cmd_sample(a)?),
        Command::Stats(a) => (&a.out, cmd_stats(a)?),
        Command::LinkBudget(a) => (&a.out, cmd_link_budget(a)?),
        Command::Coverage(a) => (&a.out, cmd_coverage(a)?),
        Command::Tables(a) => (&a.out, cmd_tables(a)?),
    })
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| domain(format!("cannot read {}: {e}", path.display())))
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn freq_arg(ghz: Option<f64>, sel: &Selector) -> Result<Frequency> {
    match ghz {
        Some(g) => Frequency::from_ghz(g),
        None => Ok(sel.band.frequency()),
    }
}

fn catalog_model(model: ModelArg, sel: &Selector) -> Result<ModelParams> {
    model_registry().get(model.name())?.from_catalog(sel)
}

fn model_label(p: &ModelParams) -> String {
    match p {
        ModelParams::Ci(c) => format!("CI n={}", c.n),
        ModelParams::Cif(c) => format!("CIF n={} b={} f0={} GHz", c.n, c.b, c.f0.ghz()),
    }
}

fn cmd_fit(a: &FitArgs) -> Result<String> {
    let file = io::parse_measurement_file(&read(&a.input)?)?;
    let opts = FitOptions {
        sigma: if a.sigma_dof {
            SigmaNormalization::DegreesOfFreedom
        } else {
            SigmaNormalization::Population
        },
        f0: a.f0_ghz.map(Frequency::from_ghz).transpose()?,
    };
    let res = model_registry().get(a.model.name())?.fit(&file.records, &opts)?;
    Ok(match a.out.format {
        Format::Json => io::emit_fit(&res),
        Format::Csv => {
            let mut s = String::from("quantity,value\n");
            for (k, v) in io::fit_to_json(&res).as_object().expect("object") {
                if let Some(x) = v.as_f64().map(|x| x.to_string()).or_else(|| v.as_str().map(String::from)) {
                    let _ = writeln!(s, "{k},{x}");
                }
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            match res.params {
                ModelParams::Ci(p) => {
                    let _ = writeln!(s, "model            CI (d0 = 1 m)");
                    let _ = writeln!(s, "n                {}", fmt_sig(p.n));
                }
                ModelParams::Cif(p) => {
                    let _ = writeln!(s, "model            CIF (d0 = 1 m)");
                    let _ = writeln!(s, "n                {}", fmt_sig(p.n));
                    let _ = writeln!(s, "b                {}", fmt_sig(p.b));
                    let _ = writeln!(s, "f0               {} GHz", fmt_sig(p.f0.ghz()));
                }
            }
            let _ = writeln!(s, "sigma            {} dB", fmt_sig(res.params.sigma_db()));
            let _ = writeln!(s, "rms residual     {} dB", fmt_sig(res.rms_residual_db));
            let _ = writeln!(s, "records          {}", res.n_records);
            for (f, c) in &res.per_band_counts {
                let _ = writeln!(s, "  {:>8} GHz    {c}", fmt_sig(f.ghz()));
            }
            for w in &file.warnings {
                let _ = writeln!(s, "warning: line {}: {}", w.line, w.message);
            }
            s
        }
    })
}

fn cmd_predict(a: &PredictArgs) -> Result<String> {
    let sel: Selector = a.catalog.parse()?;
    let f = freq_arg(a.freq_ghz, &sel)?;
    let params = catalog_model(a.model, &sel)?;
    let model = params.as_model();
    let rows: Vec<(f64, f64)> = a
        .distance
        .iter()
        .map(|&d| Ok((d, model.mean_db(f, d)?)))
        .collect::<Result<_>>()?;
    Ok(match a.out.format {
        Format::Json => json_text(&json!({
            "catalog": a.catalog,
            "model": model.name().to_ascii_uppercase(),
            "freq_ghz": f.ghz(),
            "sigma_db": params.sigma_db(),
            "predictions": rows.iter().map(|(d, pl)| json!({"distance_m": d, "path_loss_db": sig(*pl)})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("freq_ghz,distance_m,path_loss_db\n");
            for (d, pl) in &rows {
                let _ = writeln!(s, "{},{d},{}", f.ghz(), fmt_sig(*pl));
            }
            s
        }
        Format::Table => {
            let mut s = format!(
                "{} at {} GHz ({sel_s}), shadow fading sigma {} dB\n",
                model_label(&params),
                f.ghz(),
                params.sigma_db(),
                sel_s = a.catalog.trim()
            );
            for (d, pl) in &rows {
                let _ = writeln!(s, "{:>10} m  {:>9.2} dB", d, pl);
            }
            s
        }
    })
}

fn cmd_sample(a: &SampleArgs) -> Result<String> {
    let sel: Selector = a.catalog.parse()?;
    if a.count == 0 {
        return Err(domain("--count must be at least 1"));
    }
    let stats = Catalog::v1().stats(sel.band, sel.scenario, sel.directionality)?;
    let params = catalog_model(a.model, &sel)?;
    let sampler = RealizationSampler::new(stats)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let draws = (0..a.count)
        .map(|_| sampler.sample(params.as_model(), a.distance, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(match a.out.format {
        Format::Json => json_text(&json!({
            "seed": a.seed,
            "realizations": draws.iter().map(io::realization_json).collect::<Vec<_>>(),
        })),
        Format::Csv | Format::Table => io::realizations_csv(&draws),
    })
}

fn cmd_stats(a: &StatsArgs) -> Result<String> {
    let estimator = spread_registry().get(&a.spread_method)?;
    let mut rows: Vec<(String, &'static str, f64, Option<usize>)> = Vec::new();
    for path in &a.input {
        let located = |e: Error| domain(format!("{}: {e}", path.display()));
        let profile = io::parse_profile(&read(path)?).map_err(located)?;
        match profile {
            Profile::Delay(p) => {
                let th = a.threshold_db.unwrap_or(DEFAULT_PDP_SNR_DB);
                let kept = threshold_pdp(&p, th).map_err(located)?;
                let ds = crate::profiles::rms_delay_spread(&kept)? * 1e9;
                rows.push((path.display().to_string(), "rms_ds_ns", ds, None));
            }
            Profile::Angular(p) => {
                let th = a.threshold_db.unwrap_or(DEFAULT_PAS_DOWN_DB);
                let kept = crate::profiles::threshold_pas(&p, th);
                let spread = estimator.spread_deg(&kept)?;
                rows.push((path.display().to_string(), "rms_as_deg", spread, Some(count_directions(&p, th))));
            }
        }
    }
    let summary = |q: &str| {
        let v: Vec<f64> = rows.iter().filter(|r| r.1 == q).map(|r| r.2).collect();
        (!v.is_empty()).then(|| spread_stats(&v)).transpose()
    };
    let summaries = [("rms_ds_ns", summary("rms_ds_ns")?), ("rms_as_deg", summary("rms_as_deg")?)];
    Ok(match a.out.format {
        Format::Json => json_text(&json!({
            "spread_method": estimator.name(),
            "profiles": rows.iter().map(|(p, q, v, n)| json!({"input": p, "quantity": q, "value": sig(*v), "directions": n})).collect::<Vec<_>>(),
            "summary": summaries.iter().filter_map(|(q, s)| s.map(|s| json!({
                "quantity": q, "min": sig(s.min), "max": sig(s.max), "mean": sig(s.mean), "std": sig(s.std)
            }))).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("input,quantity,value,directions\n");
            for (p, q, v, n) in &rows {
                let _ = writeln!(s, "{p},{q},{},{}", fmt_sig(*v), n.map_or(String::new(), |n| n.to_string()));
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            for (p, q, v, n) in &rows {
                let unit = if *q == "rms_ds_ns" { "ns" } else { "deg" };
                let label = if *q == "rms_ds_ns" { "RMS DS" } else { "RMS AS" };
                let _ = write!(s, "{p}: {label} {} {unit}", fmt_sig(*v));
                if let Some(n) = n {
                    let _ = write!(s, ", {n} direction(s)");
                }
                s.push('\n');
            }
            for (q, st) in &summaries {
                if let (Some(st), true) = (st, rows.len() > 1) {
                    let _ = writeln!(
                        s,
                        "{q}: min {} max {} mean {} std {}",
                        fmt_sig(st.min),
                        fmt_sig(st.max),
                        fmt_sig(st.mean),
                        fmt_sig(st.std)
                    );
                }
            }
            s
        }
    })
}

fn build_link(a: &LinkArgs) -> Result<(LinkConfig, Selector, Frequency)> {
    let sel: Selector = a.catalog.parse()?;
    let f = freq_arg(a.freq_ghz, &sel)?;
    let f_ref = Frequency::from_ghz(a.gain_ref_ghz)?;
    let link = LinkConfig {
        tx_power_dbm: a.tx_power_dbm,
        tx_ant: AntennaSpec::quoted_at(a.tx_gain_dbi, f_ref, a.tx_constant_aperture),
        rx_ant: AntennaSpec::quoted_at(a.rx_gain_dbi, f_ref, a.rx_constant_aperture),
        bandwidth_hz: a.bandwidth_hz,
        noise_figure_db: a.noise_figure_db,
        required_snr_db: a.required_snr_db,
        pl_model: catalog_model(a.model, &sel)?,
        scenario: sel.scenario,
    };
    link.validate()?;
    Ok((link, sel, f))
}

fn cmd_link_budget(a: &LinkBudgetArgs) -> Result<String> {
    let (link, _, f) = build_link(&a.link)?;
    let g_tx = antenna_gain(&link.tx_ant, f)?;
    let g_rx = antenna_gain(&link.rx_ant, f)?;
    let noise = noise_power(link.bandwidth_hz, link.noise_figure_db)?;
    let budget = link.path_loss_budget_db(f)?;
    let range = max_range(&link, f)?;
    let at_d = a.distance.map(|d| snr(&link, f, d, None)).transpose()?;
    let items: Vec<(&str, f64, &str)> = [
        ("freq_ghz", f.ghz(), "GHz"),
        ("tx_gain_dbi", g_tx, "dBi"),
        ("rx_gain_dbi", g_rx, "dBi"),
        ("noise_power_dbm", noise, "dBm"),
        ("path_loss_budget_db", budget, "dB"),
        ("max_range_m", range, "m"),
    ]
    .into_iter()
    .chain(a.distance.zip(at_d).into_iter().flat_map(|(d, s)| [("distance_m", d, "m"), ("snr_db", s, "dB")]))
    .collect();
    Ok(render_items(a.out.format, &items))
}

fn render_items(format: Format, items: &[(&str, f64, &str)]) -> String {
    match format {
        Format::Json => {
            let mut m = serde_json::Map::new();
            for (k, v, _) in items {
                m.insert(k.to_string(), json!(sig(*v)));
            }
            json_text(&Value::Object(m))
        }
        Format::Csv => {
            let mut s = String::from("quantity,value\n");
            for (k, v, _) in items {
                let _ = writeln!(s, "{k},{}", fmt_sig(*v));
            }
            s
        }
        Format::Table => {
            let w = items.iter().map(|i| i.0.len()).max().unwrap_or(0);
            let mut s = String::new();
            for (k, v, u) in items {
                let _ = writeln!(s, "{k:<w$}  {:>12.2} {u}", v);
            }
            s
        }
    }
}

fn parse_policy(s: &str) -> Result<LosPolicy> {
    let t = s.trim().to_ascii_lowercase().replace('_', "-");
    match t.as_str() {
        "always-los" => Ok(LosPolicy::AlwaysLos),
        "always-nlos" => Ok(LosPolicy::AlwaysNlos),
        _ => match t.strip_prefix("distance:") {
            Some(d) => d
                .trim()
                .parse()
                .map(|d_break_m| LosPolicy::DistanceRule { d_break_m })
                .map_err(|_| domain(format!("bad LOS break distance in '{s}'"))),
            None => Err(domain(format!(
                "unknown LOS policy '{s}' (expected always-los, always-nlos or distance:<m>)"
            ))),
        },
    }
}

fn cmd_coverage(a: &CoverageArgs) -> Result<String> {
    let (link, sel, f) = build_link(&a.link)?;
    let policy = parse_policy(&a.los_policy)?;
    let mut dep = Deployment::new(a.cell_radius_m, a.n_drops, policy);
    let other_scenario = if sel.scenario.is_los() { Scenario::Nlos } else { Scenario::Los };
    dep.other_model = catalog_model(a.link.model, &Selector { scenario: other_scenario, ..sel }).ok();
    let res = coverage_sim(&dep, &link, f, a.seed)?;
    Ok(match a.out.format {
        Format::Json => json_text(&io::coverage_json(&res)),
        Format::Csv => io::coverage_csv(&res),
        Format::Table => {
            let mut s = format!(
                "{} drops, cell radius {} m, {} GHz, seed {}\noutage fraction  {}\n",
                res.n_drops,
                a.cell_radius_m,
                f.ghz(),
                a.seed,
                fmt_sig(res.outage_fraction)
            );
            for (p, v) in res.percentiles() {
                let _ = writeln!(s, "SNR p{p:<3}         {v:>8.2} dB");
            }
            s
        }
    })
}

fn cmd_tables(a: &TablesArgs) -> Result<String> {
    let cat = Catalog::v1();
    Ok(match a.out.format {
        Format::Json => json_text(&cat.to_json()),
        Format::Csv => cat.to_csv(),
        Format::Table => cat.to_text_tables(),
    })
}
