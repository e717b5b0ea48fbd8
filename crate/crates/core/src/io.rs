//! Text formats: measurement CSV, profile CSV, fit JSON, result tables.
//!
//! Files carry dB and GHz; everything past the parser is linear power
//! and Hz. Numbers are written with 6 significant digits.
//!
//! Measurement file:
//!
//! ```text
//! campaign,freq_ghz,scenario,directionality,tx_id,rx_id,distance_3d_m,path_loss_db,weight
//! nyc,28,LOS,DIRECTIONAL,TX1,RX4,54.2,101.7,1
//! ```
//!
//! The `weight` column is optional and defaults to 1.
//!
//! Profile file (one kind per file):
//!
//! ```text
//! # noise_floor_db=-110
//! delay_ns,power_db
//! 0,-62.5
//! 12.5,-70.1
//! ```
//!
//! or `# resolution_deg=8` with an `azimuth_deg,power_db` header.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::fitting::{FitResult, MeasurementRecord};
use crate::linkbudget::CoverageResult;
use crate::numeric::round_sig;
use crate::pathloss::{CiParams, CifParams, Frequency, ModelParams, REFERENCE_DISTANCE_M};
use crate::profiles::{db_to_linear, linear_to_db, AngularBin, PowerAngularProfile, PowerDelayProfile, Tap};
use crate::scenario::{Directionality, Scenario};
use crate::stochastic::ChannelRealization;

pub const SIG_DIGITS: usize = 6;

pub const MEASUREMENT_COLUMNS: [&str; 8] = [
    "campaign",
    "freq_ghz",
    "scenario",
    "directionality",
    "tx_id",
    "rx_id",
    "distance_3d_m",
    "path_loss_db",
];

pub fn sig(x: f64) -> f64 {
    round_sig(x, SIG_DIGITS)
}

/// `x` at 6 significant digits in shortest round-trip form.
pub fn fmt_sig(x: f64) -> String {
    let r = sig(x);
    if r == 0.0 {
        "0".into()
    } else {
        r.to_string()
    }
}

fn parse_err(line: usize, column: Option<usize>, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Non-fatal finding attached to a line.
#[derive(Debug, Clone, PartialEq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementFile {
    pub records: Vec<MeasurementRecord>,
    pub warnings: Vec<Warning>,
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

fn number(field: &str, line: usize, col: usize, name: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| parse_err(line, Some(col), format!("{name}: '{field}' is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, Some(col), format!("{name}: '{field}' is not finite")));
    }
    Ok(v)
}

/// Parses a measurement CSV, keeping warnings (e.g. distances below 1 m).
pub fn parse_measurement_file(text: &str) -> Result<MeasurementFile> {
    let mut rdr = csv_reader(text);
    let mut rows = rdr.records();
    let header = match rows.next() {
        None => return Err(parse_err(1, None, "empty file; expected a header row")),
        Some(r) => r.map_err(|e| csv_error(&e))?,
    };
    let hline = header.position().map_or(1, |p| p.line() as usize);
    let names: Vec<&str> = header.iter().collect();
    let with_weight = match names.len() {
        8 => false,
        9 if names[8] == "weight" => true,
        _ => {
            return Err(parse_err(
                hline,
                None,
                format!("header must be '{},weight' (weight optional)", MEASUREMENT_COLUMNS.join(",")),
            ))
        }
    };
    for (i, (got, want)) in names.iter().zip(MEASUREMENT_COLUMNS).enumerate() {
        if *got != want {
            return Err(parse_err(hline, Some(i + 1), format!("expected column '{want}', found '{got}'")));
        }
    }
    let width = names.len();

    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for row in rows {
        let row = row.map_err(|e| csv_error(&e))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() != width {
            return Err(parse_err(line, None, format!("expected {width} fields, found {}", row.len())));
        }
        let ghz = number(&row[1], line, 2, "freq_ghz")?;
        let freq = Frequency::from_ghz(ghz).map_err(|e| parse_err(line, Some(2), e.to_string()))?;
        let scenario: Scenario = row[2].parse().map_err(|e: Error| parse_err(line, Some(3), e.to_string()))?;
        let directionality: Directionality =
            row[3].parse().map_err(|e: Error| parse_err(line, Some(4), e.to_string()))?;
        let distance = number(&row[6], line, 7, "distance_3d_m")?;
        if distance <= 0.0 {
            return Err(parse_err(line, Some(7), format!("distance must be positive, got {distance}")));
        }
        if distance < REFERENCE_DISTANCE_M {
            warnings.push(Warning {
                line,
                message: format!("distance {distance} m is below the 1 m reference distance"),
            });
        }
        let path_loss = number(&row[7], line, 8, "path_loss_db")?;
        let weight = if with_weight {
            let w = number(&row[8], line, 9, "weight")?;
            if w < 0.0 {
                return Err(parse_err(line, Some(9), format!("weight must be >= 0, got {w}")));
            }
            w
        } else {
            1.0
        };
        records.push(MeasurementRecord {
            campaign: row[0].to_string(),
            freq,
            scenario,
            directionality,
            tx_id: row[4].to_string(),
            rx_id: row[5].to_string(),
            distance_3d_m: distance,
            path_loss_db: path_loss,
            weight,
        });
    }
    for w in &warnings {
        log::warn!("line {}: {}", w.line, w.message);
    }
    Ok(MeasurementFile { records, warnings })
}

/// Records in file order; warnings go to the log.
pub fn parse_measurements(text: &str) -> Result<Vec<MeasurementRecord>> {
    parse_measurement_file(text).map(|f| f.records)
}

fn csv_error(e: &csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    parse_err(line, None, e.to_string())
}

pub fn emit_measurements(records: &[MeasurementRecord]) -> String {
    let mut out = MEASUREMENT_COLUMNS.join(",");
    out.push_str(",weight\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.campaign,
            fmt_sig(r.freq.ghz()),
            r.scenario,
            r.directionality,
            r.tx_id,
            r.rx_id,
            fmt_sig(r.distance_3d_m),
            fmt_sig(r.path_loss_db),
            fmt_sig(r.weight)
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Fit results

fn num(x: f64) -> Value {
    json!(sig(x))
}

/// JSON object with keys in a fixed order:
/// `model, n, [b, f0_ghz,] sigma_db, rms_residual_db, n_records, per_band_counts`.
pub fn fit_to_json(result: &FitResult) -> Value {
    let mut m = Map::new();
    match result.params {
        ModelParams::Ci(p) => {
            m.insert("model".into(), json!("CI"));
            m.insert("n".into(), num(p.n));
        }
        ModelParams::Cif(p) => {
            m.insert("model".into(), json!("CIF"));
            m.insert("n".into(), num(p.n));
            m.insert("b".into(), num(p.b));
            m.insert("f0_ghz".into(), num(p.f0.ghz()));
        }
    }
    m.insert("sigma_db".into(), num(result.params.sigma_db()));
    m.insert("rms_residual_db".into(), num(result.rms_residual_db));
    m.insert("n_records".into(), json!(result.n_records));
    let bands: Vec<Value> = result
        .per_band_counts
        .iter()
        .map(|(f, c)| json!({ "freq_ghz": sig(f.ghz()), "count": c }))
        .collect();
    m.insert("per_band_counts".into(), Value::Array(bands));
    Value::Object(m)
}

pub fn emit_fit(result: &FitResult) -> String {
    let mut s = serde_json::to_string_pretty(&fit_to_json(result)).expect("json");
    s.push('\n');
    s
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(1, None, format!("missing key '{key}'")))
}

fn field_f64(v: &Value, key: &str) -> Result<f64> {
    field(v, key)?
        .as_f64()
        .ok_or_else(|| parse_err(1, None, format!("key '{key}' is not a number")))
}

fn field_usize(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| parse_err(1, None, format!("key '{key}' is not a count")))
}

pub fn parse_fit(text: &str) -> Result<FitResult> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| parse_err(e.line(), Some(e.column()), e.to_string()))?;
    let located = |e: Error| parse_err(1, None, e.to_string());
    let sigma_db = field_f64(&v, "sigma_db")?;
    let params = match field(&v, "model")?.as_str() {
        Some("CI") => ModelParams::Ci(CiParams::new(field_f64(&v, "n")?, sigma_db).map_err(located)?),
        Some("CIF") => {
            let f0 = Frequency::from_ghz(field_f64(&v, "f0_ghz")?).map_err(located)?;
            ModelParams::Cif(CifParams::new(field_f64(&v, "n")?, field_f64(&v, "b")?, f0, sigma_db).map_err(located)?)
        }
        other => return Err(parse_err(1, None, format!("unknown model {other:?}; expected \"CI\" or \"CIF\""))),
    };
    let bands = field(&v, "per_band_counts")?
        .as_array()
        .ok_or_else(|| parse_err(1, None, "per_band_counts is not an array"))?;
    let per_band_counts = bands
        .iter()
        .map(|b| {
            let f = Frequency::from_ghz(field_f64(b, "freq_ghz")?).map_err(located)?;
            Ok((f, field_usize(b, "count")?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FitResult {
        params,
        rms_residual_db: field_f64(&v, "rms_residual_db")?,
        n_records: field_usize(&v, "n_records")?,
        per_band_counts,
    })
}

// ---------------------------------------------------------------------------
// Profiles

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Delay(PowerDelayProfile),
    Angular(PowerAngularProfile),
}

pub fn parse_profile(text: &str) -> Result<Profile> {
    let mut noise_floor_db = None;
    let mut resolution_deg = None;
    let mut header: Option<(usize, String)> = None;
    let mut rows: Vec<(usize, f64, f64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(c) = t.strip_prefix('#') {
            if let Some((k, v)) = c.split_once('=') {
                let (k, v) = (k.trim(), v.trim());
                let slot = match k {
                    "noise_floor_db" => &mut noise_floor_db,
                    "resolution_deg" => &mut resolution_deg,
                    _ => continue,
                };
                let x = number(v, line, 1, k)?;
                *slot = Some(x);
            }
            continue;
        }
        if header.is_none() {
            header = Some((line, t.replace(' ', "")));
            continue;
        }
        let cells: Vec<&str> = t.split(',').map(str::trim).collect();
        if cells.len() != 2 {
            return Err(parse_err(line, None, format!("expected 2 fields, found {}", cells.len())));
        }
        let x = number(cells[0], line, 1, "first column")?;
        let p = number(cells[1], line, 2, "power_db")?;
        if let Some(&(_, prev, _)) = rows.last() {
            if x <= prev {
                return Err(parse_err(line, Some(1), format!("first column must increase; {x} follows {prev}")));
            }
        }
        rows.push((line, x, p));
    }
    let (hline, header) = header.ok_or_else(|| parse_err(1, None, "missing header row"))?;
    let locate = |e: Error| parse_err(hline, None, e.to_string());
    match header.as_str() {
        "delay_ns,power_db" => {
            let nf = noise_floor_db
                .ok_or_else(|| parse_err(1, None, "delay profile needs a '# noise_floor_db=<dBm>' line"))?;
            let taps = rows
                .iter()
                .map(|&(_, ns, p)| Tap { delay_s: ns * 1e-9, power_mw: db_to_linear(p) })
                .collect();
            PowerDelayProfile::new(taps, db_to_linear(nf)).map(Profile::Delay).map_err(locate)
        }
        "azimuth_deg,power_db" => {
            let res = resolution_deg
                .ok_or_else(|| parse_err(1, None, "angular profile needs a '# resolution_deg=<deg>' line"))?;
            let bins = rows
                .iter()
                .map(|&(_, az, p)| AngularBin { azimuth_deg: az, power_mw: db_to_linear(p) })
                .collect();
            PowerAngularProfile::new(bins, res).map(Profile::Angular).map_err(locate)
        }
        other => Err(parse_err(
            hline,
            Some(1),
            format!("header '{other}' must be 'delay_ns,power_db' or 'azimuth_deg,power_db'"),
        )),
    }
}

pub fn emit_profile(profile: &Profile) -> String {
    let mut out = String::new();
    match profile {
        Profile::Delay(p) => {
            out.push_str(&format!("# noise_floor_db={}\n", fmt_sig(linear_to_db(p.noise_floor_mw()))));
            out.push_str("delay_ns,power_db\n");
            for t in p.taps() {
                out.push_str(&format!("{},{}\n", fmt_sig(t.delay_s * 1e9), fmt_sig(linear_to_db(t.power_mw))));
            }
        }
        Profile::Angular(p) => {
            out.push_str(&format!("# resolution_deg={}\n", fmt_sig(p.resolution_deg())));
            out.push_str("azimuth_deg,power_db\n");
            for b in p.bins() {
                out.push_str(&format!("{},{}\n", fmt_sig(b.azimuth_deg), fmt_sig(linear_to_db(b.power_mw))));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Results

pub fn coverage_csv(r: &CoverageResult) -> String {
    let mut out = format!(
        "# n_drops={}\n# outage_fraction={}\npercentile,snr_db\n",
        r.n_drops,
        fmt_sig(r.outage_fraction)
    );
    for (p, v) in r.percentiles() {
        out.push_str(&format!("{p},{}\n", fmt_sig(v)));
    }
    out
}

pub fn coverage_json(r: &CoverageResult) -> Value {
    json!({
        "n_drops": r.n_drops,
        "outage_fraction": sig(r.outage_fraction),
        "snr_percentiles_db": { "p5": sig(r.p5_snr_db), "p50": sig(r.p50_snr_db), "p95": sig(r.p95_snr_db) },
    })
}

pub const REALIZATION_COLUMNS: &str =
    "band_ghz,scenario,directionality,distance_m,path_loss_db,rms_ds_ns,rms_asa_deg,rms_asd_deg,n_aoa,n_aod";

fn opt_cell<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn realizations_csv(rs: &[ChannelRealization]) -> String {
    let mut out = String::from(REALIZATION_COLUMNS);
    out.push('\n');
    for r in rs {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.band.ghz(),
            r.scenario,
            r.directionality,
            fmt_sig(r.distance_m),
            fmt_sig(r.path_loss_db),
            opt_cell(r.rms_ds_ns.map(fmt_sig)),
            opt_cell(r.rms_asa_deg.map(fmt_sig)),
            opt_cell(r.rms_asd_deg.map(fmt_sig)),
            opt_cell(r.n_aoa),
            opt_cell(r.n_aod),
        ));
    }
    out
}

pub fn realization_json(r: &ChannelRealization) -> Value {
    json!({
        "band_ghz": r.band.ghz(),
        "scenario": r.scenario.as_str(),
        "directionality": r.directionality.as_str(),
        "distance_m": sig(r.distance_m),
        "path_loss_db": sig(r.path_loss_db),
        "rms_ds_ns": r.rms_ds_ns.map(sig),
        "rms_asa_deg": r.rms_asa_deg.map(sig),
        "rms_asd_deg": r.rms_asd_deg.map(sig),
        "n_aoa": r.n_aoa,
        "n_aod": r.n_aod,
    })
}
