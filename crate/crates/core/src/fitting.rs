//! Minimum mean square error fits of the CI and CIF models.
//!
//! Both fits are anchored at FSPL(f, 1 m), so the only unknowns are the
//! exponent (CI) or the exponent and frequency slope (CIF). With
//! `a_i = PL_i - FSPL(f_i, 1 m)` and `x_i = 10 log10(d_i)`:
//!
//! * CI:  `n = sum(a x) / sum(x^2)`
//! * CIF: regress `a` on `u = x` and `v = x (f - f0) / f0`, then `b = c / n`.

use crate::error::{domain, Error, Result};
use crate::numeric::csum;
use crate::pathloss::{
    fspl, weighted_average_frequency, CiParams, CifParams, Frequency, ModelParams, PathLossModel,
    MAX_ABS_B, REFERENCE_DISTANCE_M,
};
use crate::scenario::{Directionality, Scenario};

/// One path loss observation with antenna gains removed.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub campaign: String,
    pub freq: Frequency,
    pub scenario: Scenario,
    pub directionality: Directionality,
    pub tx_id: String,
    pub rx_id: String,
    pub distance_3d_m: f64,
    pub path_loss_db: f64,
    /// Location-count weight used for the CIF anchor frequency.
    pub weight: f64,
}

impl MeasurementRecord {
    pub fn new(
        freq: Frequency,
        distance_3d_m: f64,
        scenario: Scenario,
        directionality: Directionality,
        path_loss_db: f64,
    ) -> Self {
        Self {
            campaign: String::new(),
            freq,
            scenario,
            directionality,
            tx_id: String::new(),
            rx_id: String::new(),
            distance_3d_m,
            path_loss_db,
            weight: 1.0,
        }
    }

    /// Soft sanity check: path loss far below free space at 1 m is suspicious.
    pub fn below_sanity_bound(&self, sigma_max_db: f64) -> bool {
        match fspl(self.freq, REFERENCE_DISTANCE_M) {
            Ok(anchor) => self.path_loss_db < anchor - 3.0 * sigma_max_db,
            Err(_) => true,
        }
    }
}

/// Normalization used for the reported shadow fading sigma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaNormalization {
    /// Plain RMS, divide by N.
    #[default]
    Population,
    /// Divide by N - p, p = number of fitted parameters.
    DegreesOfFreedom,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FitOptions {
    pub sigma: SigmaNormalization,
    /// Forces the CIF anchor frequency instead of deriving it from counts.
    pub f0: Option<Frequency>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: ModelParams,
    /// Population RMS of the residuals, regardless of `SigmaNormalization`.
    pub rms_residual_db: f64,
    pub n_records: usize,
    /// Records per band, ascending frequency.
    pub per_band_counts: Vec<(Frequency, usize)>,
}

fn check_records(records: &[MeasurementRecord], min: usize) -> Result<()> {
    if records.len() < min {
        return Err(domain(format!(
            "need at least {min} records, got {}",
            records.len()
        )));
    }
    let first = &records[0];
    for (i, r) in records.iter().enumerate() {
        if r.scenario != first.scenario || r.directionality != first.directionality {
            return Err(Error::InconsistentRecords(format!(
                "record {i} is {}/{} but record 0 is {}/{}",
                r.scenario, r.directionality, first.scenario, first.directionality
            )));
        }
        if !(r.distance_3d_m.is_finite() && r.distance_3d_m > 0.0) {
            return Err(domain(format!(
                "record {i}: distance must be positive, got {}",
                r.distance_3d_m
            )));
        }
        if !r.path_loss_db.is_finite() {
            return Err(domain(format!("record {i}: path loss is not finite")));
        }
    }
    Ok(())
}

/// (a_i, x_i) pairs: excess loss over the 1 m anchor and 10 log10(d).
fn anchored(records: &[MeasurementRecord]) -> Result<Vec<(f64, f64)>> {
    records
        .iter()
        .map(|r| {
            Ok((
                r.path_loss_db - fspl(r.freq, REFERENCE_DISTANCE_M)?,
                10.0 * r.distance_3d_m.log10(),
            ))
        })
        .collect()
}

fn band_counts(records: &[MeasurementRecord]) -> Vec<(Frequency, usize, f64)> {
    let mut bands: Vec<(Frequency, usize, f64)> = Vec::new();
    for r in records {
        match bands.iter_mut().find(|(f, _, _)| *f == r.freq) {
            Some(slot) => {
                slot.1 += 1;
                slot.2 += r.weight;
            }
            None => bands.push((r.freq, 1, r.weight)),
        }
    }
    bands.sort_by(|a, b| a.0.hz().total_cmp(&b.0.hz()));
    bands
}

fn sigma_from(ss: f64, n: usize, p: usize, norm: SigmaNormalization) -> Result<f64> {
    let denom = match norm {
        SigmaNormalization::Population => n,
        SigmaNormalization::DegreesOfFreedom => n.checked_sub(p).filter(|d| *d > 0).ok_or_else(|| {
            domain(format!("{n} records leave no degrees of freedom for {p} parameters"))
        })?,
    };
    Ok((ss / denom as f64).sqrt())
}

pub fn fit_ci(records: &[MeasurementRecord]) -> Result<FitResult> {
    fit_ci_with(records, &FitOptions::default())
}

pub fn fit_ci_with(records: &[MeasurementRecord], opts: &FitOptions) -> Result<FitResult> {
    check_records(records, 2)?;
    let ax = anchored(records)?;
    let sxx = csum(ax.iter().map(|(_, x)| x * x));
    if sxx == 0.0 {
        return Err(Error::DegenerateGeometry(
            "all records sit at the 1 m reference distance".into(),
        ));
    }
    let n = csum(ax.iter().map(|(a, x)| a * x)) / sxx;
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::FitFailure(format!("fitted exponent n = {n} is not positive")));
    }
    let ss = csum(ax.iter().map(|(a, x)| (a - n * x).powi(2)));
    let sigma_db = sigma_from(ss, records.len(), 1, opts.sigma)?;
    Ok(FitResult {
        params: ModelParams::Ci(CiParams::new(n, sigma_db)?),
        rms_residual_db: (ss / records.len() as f64).sqrt(),
        n_records: records.len(),
        per_band_counts: band_counts(records).into_iter().map(|(f, c, _)| (f, c)).collect(),
    })
}

pub fn fit_cif(records: &[MeasurementRecord]) -> Result<FitResult> {
    fit_cif_with(records, &FitOptions::default())
}

pub fn fit_cif_with(records: &[MeasurementRecord], opts: &FitOptions) -> Result<FitResult> {
    check_records(records, 3)?;
    let bands = band_counts(records);
    if bands.len() < 2 {
        return Err(Error::RankDeficient(format!(
            "CIF needs records at two or more frequencies, all are at {}",
            bands[0].0
        )));
    }
    let f0 = match opts.f0 {
        Some(f0) => f0,
        None => weighted_average_frequency(
            &bands.iter().map(|(f, _, w)| (*f, *w)).collect::<Vec<_>>(),
        )?,
    };
    let ax = anchored(records)?;
    let uv: Vec<(f64, f64, f64)> = records
        .iter()
        .zip(&ax)
        .map(|(r, (a, x))| (*a, *x, x * (r.freq.hz() - f0.hz()) / f0.hz()))
        .collect();

    let suu = csum(uv.iter().map(|(_, u, _)| u * u));
    let svv = csum(uv.iter().map(|(_, _, v)| v * v));
    let suv = csum(uv.iter().map(|(_, u, v)| u * v));
    let suy = csum(uv.iter().map(|(y, u, _)| u * y));
    let svy = csum(uv.iter().map(|(y, _, v)| v * y));
    let det = suu * svv - suv * suv;
    if !(det > 1e-12 * suu * svv) {
        return Err(Error::RankDeficient(format!(
            "singular normal equations (det = {det:.3e}); distance/frequency regressors are collinear"
        )));
    }
    let n = (suy * svv - svy * suv) / det;
    let c = (svy * suu - suy * suv) / det;
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::FitFailure(format!("fitted exponent n = {n} is not positive")));
    }
    let b = c / n;
    if b.abs() >= MAX_ABS_B {
        return Err(Error::FitFailure(format!(
            "fitted slope b = {b} exceeds |b| < {MAX_ABS_B}; input looks corrupt"
        )));
    }
    let ss = csum(uv.iter().map(|(y, u, v)| (y - n * u - c * v).powi(2)));
    let sigma_db = sigma_from(ss, records.len(), 2, opts.sigma)?;
    Ok(FitResult {
        params: ModelParams::Cif(CifParams::new(n, b, f0, sigma_db)?),
        rms_residual_db: (ss / records.len() as f64).sqrt(),
        n_records: records.len(),
        per_band_counts: bands.into_iter().map(|(f, c, _)| (f, c)).collect(),
    })
}

/// Population RMS of measured minus model mean.
pub fn residual_sigma(records: &[MeasurementRecord], model: &dyn PathLossModel) -> Result<f64> {
    if records.is_empty() {
        return Err(domain("residual sigma of an empty record set"));
    }
    let residuals = records
        .iter()
        .map(|r| Ok(r.path_loss_db - model.mean_db(r.freq, r.distance_3d_m)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok((csum(residuals.iter().map(|e| e * e)) / records.len() as f64).sqrt())
}
