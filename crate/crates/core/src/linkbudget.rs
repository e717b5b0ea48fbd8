//! Antenna gain scaling, SNR, range inversion and Monte Carlo coverage.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::pathloss::{fspl, Frequency, ModelParams, ShadowFading, REFERENCE_DISTANCE_M};
use crate::scenario::Scenario;

/// Thermal noise density at 290 K, dBm/Hz.
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AntennaSpec {
    /// Same gain at every frequency.
    Fixed { gain_dbi: f64 },
    /// Gain quoted at `ref_freq`; the physical aperture is held constant,
    /// so gain grows as f^2.
    ConstantAperture { gain_dbi: f64, ref_freq: Frequency },
}

impl AntennaSpec {
    pub fn fixed(gain_dbi: f64) -> Self {
        AntennaSpec::Fixed { gain_dbi }
    }

    pub fn constant_aperture(gain_dbi: f64, ref_freq: Frequency) -> Self {
        AntennaSpec::ConstantAperture { gain_dbi, ref_freq }
    }

    /// A gain quoted at `ref_freq` with the scaling toggle.
    pub fn quoted_at(gain_dbi: f64, ref_freq: Frequency, constant_aperture: bool) -> Self {
        if constant_aperture {
            Self::constant_aperture(gain_dbi, ref_freq)
        } else {
            Self::fixed(gain_dbi)
        }
    }

    fn gain_dbi(&self) -> f64 {
        match *self {
            AntennaSpec::Fixed { gain_dbi } | AntennaSpec::ConstantAperture { gain_dbi, .. } => gain_dbi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gain_dbi().is_finite() {
            return Err(domain(format!("antenna gain must be finite, got {}", self.gain_dbi())));
        }
        Ok(())
    }

    /// Effective aperture `G λ² / 4π` in m².
    pub fn effective_aperture_m2(&self, f: Frequency) -> Result<f64> {
        let g = 10f64.powf(antenna_gain(self, f)? / 10.0);
        Ok(g * f.wavelength_m().powi(2) / (4.0 * std::f64::consts::PI))
    }
}

pub fn antenna_gain(ant: &AntennaSpec, f: Frequency) -> Result<f64> {
    ant.validate()?;
    Ok(match *ant {
        AntennaSpec::Fixed { gain_dbi } => gain_dbi,
        AntennaSpec::ConstantAperture { gain_dbi, ref_freq } => {
            gain_dbi + 20.0 * (f.hz() / ref_freq.hz()).log10()
        }
    })
}

/// Thermal noise power in dBm over `bandwidth_hz` at 290 K.
pub fn noise_power(bandwidth_hz: f64, noise_figure_db: f64) -> Result<f64> {
    if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0) {
        return Err(domain(format!("bandwidth must be positive, got {bandwidth_hz} Hz")));
    }
    if !(noise_figure_db.is_finite() && noise_figure_db >= 0.0) {
        return Err(domain(format!("noise figure must be >= 0 dB, got {noise_figure_db}")));
    }
    Ok(THERMAL_NOISE_DBM_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub tx_power_dbm: f64,
    pub tx_ant: AntennaSpec,
    pub rx_ant: AntennaSpec,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub required_snr_db: f64,
    pub pl_model: ModelParams,
    pub scenario: Scenario,
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.tx_power_dbm.is_finite() {
            return Err(domain(format!("tx power must be finite, got {}", self.tx_power_dbm)));
        }
        if !self.required_snr_db.is_finite() {
            return Err(domain(format!("required SNR must be finite, got {}", self.required_snr_db)));
        }
        self.tx_ant.validate()?;
        self.rx_ant.validate()?;
        noise_power(self.bandwidth_hz, self.noise_figure_db)?;
        Ok(())
    }

    /// Largest path loss that still meets the required SNR.
    pub fn path_loss_budget_db(&self, f: Frequency) -> Result<f64> {
        self.validate()?;
        Ok(self.tx_power_dbm + antenna_gain(&self.tx_ant, f)? + antenna_gain(&self.rx_ant, f)?
            - noise_power(self.bandwidth_hz, self.noise_figure_db)?
            - self.required_snr_db)
    }

    fn snr_for_loss(&self, f: Frequency, pl_db: f64) -> Result<f64> {
        Ok(self.tx_power_dbm + antenna_gain(&self.tx_ant, f)? + antenna_gain(&self.rx_ant, f)?
            - pl_db
            - noise_power(self.bandwidth_hz, self.noise_figure_db)?)
    }
}

/// SNR in dB at distance `d_m`; `pl_db_override` replaces the mean path loss.
pub fn snr(link: &LinkConfig, f: Frequency, d_m: f64, pl_db_override: Option<f64>) -> Result<f64> {
    link.validate()?;
    let pl = match pl_db_override {
        Some(pl) => pl,
        None => link.pl_model.as_model().mean_db(f, d_m)?,
    };
    link.snr_for_loss(f, pl)
}

/// Distance at which mean path loss exhausts the budget.
pub fn max_range(link: &LinkConfig, f: Frequency) -> Result<f64> {
    let budget = link.path_loss_budget_db(f)?;
    let anchor = fspl(f, REFERENCE_DISTANCE_M)?;
    if budget < anchor {
        return Err(Error::BelowAnchor { budget_db: budget, anchor_db: anchor });
    }
    let n_eff = link.pl_model.as_model().effective_ple(f)?;
    if n_eff <= 0.0 {
        return Err(domain(format!("effective PLE {n_eff} gives no finite range")));
    }
    Ok(REFERENCE_DISTANCE_M * 10f64.powf((budget - anchor) / (10.0 * n_eff)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LosPolicy {
    AlwaysLos,
    AlwaysNlos,
    /// LOS iff distance <= `d_break_m`.
    DistanceRule { d_break_m: f64 },
}

impl LosPolicy {
    pub fn is_los(&self, d_m: f64) -> bool {
        match *self {
            LosPolicy::AlwaysLos => true,
            LosPolicy::AlwaysNlos => false,
            LosPolicy::DistanceRule { d_break_m } => d_m <= d_break_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub cell_radius_m: f64,
    pub n_drops: usize,
    pub los_policy: LosPolicy,
    /// Model for drops whose condition differs from `LinkConfig::scenario`.
    pub other_model: Option<ModelParams>,
}

impl Deployment {
    pub fn new(cell_radius_m: f64, n_drops: usize, los_policy: LosPolicy) -> Self {
        Self {
            cell_radius_m,
            n_drops,
            los_policy,
            other_model: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.cell_radius_m.is_finite() && self.cell_radius_m > REFERENCE_DISTANCE_M) {
            return Err(domain(format!(
                "cell radius must exceed {REFERENCE_DISTANCE_M} m, got {}",
                self.cell_radius_m
            )));
        }
        if self.n_drops == 0 {
            return Err(domain("coverage needs at least one drop"));
        }
        if let LosPolicy::DistanceRule { d_break_m } = self.los_policy {
            if !(d_break_m.is_finite() && d_break_m >= 0.0) {
                return Err(domain(format!("LOS break distance must be >= 0, got {d_break_m}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub n_drops: usize,
    pub outage_fraction: f64,
    pub p5_snr_db: f64,
    pub p50_snr_db: f64,
    pub p95_snr_db: f64,
}

impl CoverageResult {
    pub fn percentiles(&self) -> [(f64, f64); 3] {
        [(5.0, self.p5_snr_db), (50.0, self.p50_snr_db), (95.0, self.p95_snr_db)]
    }
}

/// Radius of drop `i`, uniform over the disk area outside 1 m.
fn drop_radius<R: Rng>(rng: &mut R, radius_m: f64) -> f64 {
    let min2 = REFERENCE_DISTANCE_M * REFERENCE_DISTANCE_M;
    let u: f64 = rng.random();
    (u * (radius_m * radius_m - min2) + min2).sqrt()
}

fn drop_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

/// Linear interpolation between order statistics.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Drops users, samples shadowed path loss and reports SNR outage.
///
/// Drop `i` draws from its own ChaCha8 stream `i` under `seed`, so the
/// result does not depend on the thread count.
pub fn coverage_sim(deployment: &Deployment, link: &LinkConfig, f: Frequency, seed: u64) -> Result<CoverageResult> {
    deployment.validate()?;
    link.validate()?;
    let link_los = link.scenario.is_los();
    let missing = || {
        domain(format!(
            "LOS policy {:?} places drops in the condition opposite to {} but no model was given for it",
            deployment.los_policy, link.scenario
        ))
    };
    let budget_gain = link.snr_for_loss(f, 0.0)?;

    let snrs: Result<Vec<f64>> = (0..deployment.n_drops)
        .into_par_iter()
        .map(|i| {
            let mut rng = drop_rng(seed, i);
            let d = drop_radius(&mut rng, deployment.cell_radius_m);
            let model = if deployment.los_policy.is_los(d) == link_los {
                &link.pl_model
            } else {
                deployment.other_model.as_ref().ok_or_else(missing)?
            };
            let pl = model.as_model().mean_db(f, d)? + ShadowFading::draw(model.sigma_db(), &mut rng).sample_db;
            Ok(budget_gain - pl)
        })
        .collect();
    let mut snrs = snrs?;
    let outage = snrs.iter().filter(|&&s| s < link.required_snr_db).count();
    snrs.sort_by(f64::total_cmp);
    Ok(CoverageResult {
        n_drops: deployment.n_drops,
        outage_fraction: outage as f64 / deployment.n_drops as f64,
        p5_snr_db: percentile(&snrs, 5.0),
        p50_snr_db: percentile(&snrs, 50.0),
        p95_snr_db: percentile(&snrs, 95.0),
    })
}
