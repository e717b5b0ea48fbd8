//! Delay and angular dispersion statistics from measured profiles.
//!
//! Profiles hold linear power (mW). Power delay profiles are thresholded
//! against the noise floor (5 dB SNR by default), power angular profiles
//! against their own peak (30 dB down by default).

use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::numeric::csum;
use crate::registry::Registry;

pub const DEFAULT_PDP_SNR_DB: f64 = 5.0;
pub const DEFAULT_PAS_DOWN_DB: f64 = 30.0;

/// Tolerance on the uniform azimuth grid, degrees.
pub const GRID_TOL_DEG: f64 = 1e-6;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    pub delay_s: f64,
    pub power_mw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    taps: Vec<Tap>,
    noise_floor_mw: f64,
}

impl PowerDelayProfile {
    pub fn new(taps: Vec<Tap>, noise_floor_mw: f64) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::EmptyProfile("power delay profile has no taps".into()));
        }
        if !(noise_floor_mw.is_finite() && noise_floor_mw > 0.0) {
            return Err(domain(format!("noise floor must be positive, got {noise_floor_mw} mW")));
        }
        for (i, t) in taps.iter().enumerate() {
            if !(t.delay_s.is_finite() && t.delay_s >= 0.0) {
                return Err(domain(format!("tap {i}: delay must be >= 0, got {}", t.delay_s)));
            }
            if !(t.power_mw.is_finite() && t.power_mw > 0.0) {
                return Err(domain(format!("tap {i}: power must be positive, got {}", t.power_mw)));
            }
            if i > 0 && t.delay_s <= taps[i - 1].delay_s {
                return Err(domain(format!("tap {i}: delays must be strictly increasing")));
            }
        }
        Ok(Self { taps, noise_floor_mw })
    }

    /// Builds from unordered taps, sorting by delay.
    pub fn from_unsorted(mut taps: Vec<Tap>, noise_floor_mw: f64) -> Result<Self> {
        taps.sort_by(|a, b| a.delay_s.total_cmp(&b.delay_s));
        Self::new(taps, noise_floor_mw)
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn noise_floor_mw(&self) -> f64 {
        self.noise_floor_mw
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularBin {
    pub azimuth_deg: f64,
    pub power_mw: f64,
}

/// Azimuth power spectrum on a uniform grid. Bins may be missing (e.g.
/// after thresholding) but every present azimuth sits on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAngularProfile {
    bins: Vec<AngularBin>,
    resolution_deg: f64,
}

impl PowerAngularProfile {
    pub fn new(bins: Vec<AngularBin>, resolution_deg: f64) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::EmptyProfile("power angular profile has no bins".into()));
        }
        if !(resolution_deg.is_finite() && resolution_deg > 0.0 && resolution_deg < 360.0) {
            return Err(domain(format!("resolution must be in (0, 360) deg, got {resolution_deg}")));
        }
        for (i, b) in bins.iter().enumerate() {
            if !(b.azimuth_deg.is_finite() && (0.0..360.0).contains(&b.azimuth_deg)) {
                return Err(domain(format!("bin {i}: azimuth {} outside [0, 360)", b.azimuth_deg)));
            }
            if !(b.power_mw.is_finite() && b.power_mw > 0.0) {
                return Err(domain(format!("bin {i}: power must be positive, got {}", b.power_mw)));
            }
            if i > 0 {
                let step = b.azimuth_deg - bins[i - 1].azimuth_deg;
                if step <= 0.0 {
                    return Err(domain(format!("bin {i}: azimuths must be strictly increasing")));
                }
                let k = (step / resolution_deg).round();
                if k < 1.0 || (step - k * resolution_deg).abs() > GRID_TOL_DEG {
                    return Err(domain(format!(
                        "bin {i}: step {step} deg is not a multiple of the {resolution_deg} deg grid"
                    )));
                }
            }
        }
        Ok(Self { bins, resolution_deg })
    }

    pub fn bins(&self) -> &[AngularBin] {
        &self.bins
    }

    pub fn resolution_deg(&self) -> f64 {
        self.resolution_deg
    }

    pub fn peak_mw(&self) -> f64 {
        self.bins.iter().map(|b| b.power_mw).fold(0.0, f64::max)
    }

    /// Same profile with every azimuth shifted by `deg`, wrapped to [0, 360).
    pub fn rotated(&self, deg: f64) -> Result<Self> {
        let mut bins: Vec<AngularBin> = self
            .bins
            .iter()
            .map(|b| AngularBin {
                azimuth_deg: wrap_360(b.azimuth_deg + deg),
                power_mw: b.power_mw,
            })
            .collect();
        bins.sort_by(|a, b| a.azimuth_deg.total_cmp(&b.azimuth_deg));
        Self::new(bins, self.resolution_deg)
    }
}

fn wrap_360(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

/// Maps an angle difference to (-180, 180].
pub fn wrap_180(deg: f64) -> f64 {
    let w = (deg + 180.0).rem_euclid(360.0) - 180.0;
    if w <= -180.0 {
        w + 360.0
    } else {
        w
    }
}

/// min / max / mean / population std of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

pub fn spread_stats(values: &[f64]) -> Result<SpreadStats> {
    if values.is_empty() {
        return Err(domain("spread statistics of an empty sample"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(domain("spread statistics need finite values"));
    }
    let n = values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = csum(values.iter().copied()) / n;
    let var = csum(values.iter().map(|v| (v - mean).powi(2))) / n;
    // rounding can push the mean of near-constant data a ulp outside [min, max]
    Ok(SpreadStats { min, max, mean: mean.clamp(min, max), std: var.sqrt() })
}

/// Keeps taps at least `snr_threshold_db` above the noise floor.
pub fn threshold_pdp(pdp: &PowerDelayProfile, snr_threshold_db: f64) -> Result<PowerDelayProfile> {
    let cut = pdp.noise_floor_mw * db_to_linear(snr_threshold_db);
    let taps: Vec<Tap> = pdp.taps.iter().copied().filter(|t| t.power_mw >= cut).collect();
    if taps.is_empty() {
        return Err(Error::EmptyProfile(format!(
            "no tap is {snr_threshold_db} dB above the noise floor; link in outage"
        )));
    }
    Ok(PowerDelayProfile {
        taps,
        noise_floor_mw: pdp.noise_floor_mw,
    })
}

/// Power-weighted second central moment of delay, seconds.
pub fn rms_delay_spread(pdp: &PowerDelayProfile) -> Result<f64> {
    if pdp.taps.is_empty() {
        return Err(Error::EmptyProfile("no taps".into()));
    }
    let total = csum(pdp.taps.iter().map(|t| t.power_mw));
    let mean = csum(pdp.taps.iter().map(|t| t.power_mw * t.delay_s)) / total;
    let var = csum(pdp.taps.iter().map(|t| t.power_mw * (t.delay_s - mean).powi(2))) / total;
    Ok(var.max(0.0).sqrt())
}

/// Keeps bins within `down_db` of the peak.
pub fn threshold_pas(pas: &PowerAngularProfile, down_db: f64) -> PowerAngularProfile {
    let cut = pas.peak_mw() * db_to_linear(-down_db);
    PowerAngularProfile {
        bins: pas.bins.iter().copied().filter(|b| b.power_mw >= cut).collect(),
        resolution_deg: pas.resolution_deg,
    }
}

/// Number of lobes: contiguous above-threshold runs on the circular grid.
pub fn count_directions(pas: &PowerAngularProfile, down_db: f64) -> usize {
    let kept = threshold_pas(pas, down_db);
    let az: Vec<f64> = kept.bins.iter().map(|b| b.azimuth_deg).collect();
    let step_limit = kept.resolution_deg + GRID_TOL_DEG;
    let breaks = (0..az.len())
        .filter(|&i| {
            let gap = if az.len() == 1 {
                360.0
            } else {
                (az[(i + 1) % az.len()] - az[i]).rem_euclid(360.0)
            };
            gap > step_limit
        })
        .count();
    breaks.max(1)
}

fn weighted_moments(bins: &[AngularBin], offsets: impl Fn(f64) -> f64) -> f64 {
    let total = csum(bins.iter().map(|b| b.power_mw));
    let mean = csum(bins.iter().map(|b| b.power_mw * offsets(b.azimuth_deg))) / total;
    let var = csum(
        bins.iter()
            .map(|b| b.power_mw * (offsets(b.azimuth_deg) - mean).powi(2)),
    ) / total;
    var.max(0.0).sqrt()
}

/// An RMS azimuth spread definition.
pub trait AngularSpreadEstimator: Send + Sync {
    fn name(&self) -> &'static str;
    fn spread_deg(&self, pas: &PowerAngularProfile) -> Result<f64>;
}

/// Wrapped second moment minimized over the reference rotation.
///
/// The spread only changes when the reference crosses an antipode of a
/// bin, so evaluating once per antipodal interval gives the exact minimum
/// over all rotations. For a uniform grid whose half-turn is a whole
/// number of steps this equals minimizing over the grid itself.
#[derive(Debug, Default, Clone, Copy)]
pub struct WrappedSpread;

impl AngularSpreadEstimator for WrappedSpread {
    fn name(&self) -> &'static str {
        "wrapped"
    }

    fn spread_deg(&self, pas: &PowerAngularProfile) -> Result<f64> {
        let bins = pas.bins();
        if bins.is_empty() {
            return Err(Error::EmptyProfile("no bins".into()));
        }
        let mut antipodes: Vec<f64> = bins.iter().map(|b| wrap_360(b.azimuth_deg + 180.0)).collect();
        antipodes.sort_by(f64::total_cmp);
        antipodes.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let refs: Vec<f64> = if antipodes.len() == 1 {
            vec![bins[0].azimuth_deg]
        } else {
            (0..antipodes.len())
                .map(|i| {
                    let a = antipodes[i];
                    let b = if i + 1 < antipodes.len() {
                        antipodes[i + 1]
                    } else {
                        antipodes[0] + 360.0
                    };
                    wrap_360(0.5 * (a + b))
                })
                .collect()
        };
        Ok(refs
            .into_iter()
            .map(|phi| weighted_moments(bins, |az| wrap_180(az - phi)))
            .fold(f64::INFINITY, f64::min))
    }
}

/// Linear second moment of the raw azimuths in [0, 360).
#[derive(Debug, Default, Clone, Copy)]
pub struct UnwrappedSpread;

impl AngularSpreadEstimator for UnwrappedSpread {
    fn name(&self) -> &'static str {
        "unwrapped"
    }

    fn spread_deg(&self, pas: &PowerAngularProfile) -> Result<f64> {
        if pas.bins().is_empty() {
            return Err(Error::EmptyProfile("no bins".into()));
        }
        Ok(weighted_moments(pas.bins(), |az| az))
    }
}

pub fn spread_registry() -> Registry<dyn AngularSpreadEstimator> {
    let mut reg: Registry<dyn AngularSpreadEstimator> = Registry::new("angular spread method");
    reg.register("wrapped", Arc::new(WrappedSpread));
    reg.register("unwrapped", Arc::new(UnwrappedSpread));
    reg
}

/// RMS azimuth spread in degrees, wrapped definition.
pub fn rms_angular_spread(pas: &PowerAngularProfile) -> Result<f64> {
    WrappedSpread.spread_deg(pas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pdp_db(taps_ns_db: &[(f64, f64)], noise_db: f64) -> PowerDelayProfile {
        PowerDelayProfile::new(
            taps_ns_db
                .iter()
                .map(|&(d, p)| Tap { delay_s: d * 1e-9, power_mw: db_to_linear(p) })
                .collect(),
            db_to_linear(noise_db),
        )
        .unwrap()
    }

    fn pas_db(bins: &[(f64, f64)], res: f64) -> PowerAngularProfile {
        PowerAngularProfile::new(
            bins.iter()
                .map(|&(a, p)| AngularBin { azimuth_deg: a, power_mw: db_to_linear(p) })
                .collect(),
            res,
        )
        .unwrap()
    }

    #[test]
    fn pdp_threshold_cases() {
        let all_low = pdp_db(&[(0.0, -90.0), (10.0, -93.0)], -90.0);
        assert!(matches!(threshold_pdp(&all_low, 5.0), Err(Error::EmptyProfile(_))));

        let straddle = pdp_db(&[(0.0, -84.0), (10.0, -86.0)], -90.0);
        let kept = threshold_pdp(&straddle, 5.0).unwrap();
        assert_eq!(kept.taps().len(), 1);
        assert_eq!(kept.taps()[0].delay_s, 0.0);

        let at_noise = pdp_db(&[(0.0, -90.0), (5.0, -80.0), (9.0, -95.0)], -90.0);
        assert_eq!(threshold_pdp(&at_noise, 0.0).unwrap().taps().len(), 2);
    }

    #[test]
    fn pdp_validation() {
        assert!(PowerDelayProfile::new(vec![], 1.0).is_err());
        let t = |d: f64| Tap { delay_s: d, power_mw: 1.0 };
        assert!(PowerDelayProfile::new(vec![t(1.0), t(1.0)], 1.0).is_err());
        assert!(PowerDelayProfile::new(vec![t(0.0)], 0.0).is_err());
        assert!(PowerDelayProfile::from_unsorted(vec![t(2.0), t(1.0)], 1.0).is_ok());
    }

    #[test]
    fn delay_spread_examples() {
        let single = pdp_db(&[(42.0, -60.0)], -100.0);
        assert_eq!(rms_delay_spread(&single).unwrap(), 0.0);
        let two = pdp_db(&[(0.0, -60.0), (100.0, -60.0)], -100.0);
        assert!((rms_delay_spread(&two).unwrap() - 50e-9).abs() < 1e-20);
    }

    #[test]
    fn pas_threshold_cases() {
        let flat = pas_db(&[(0.0, -50.0), (10.0, -50.0), (20.0, -50.0)], 10.0);
        assert_eq!(threshold_pas(&flat, 30.0).bins().len(), 3);
        let steps = pas_db(&[(0.0, 0.0), (10.0, -25.0), (20.0, -35.0)], 10.0);
        let kept = threshold_pas(&steps, 30.0);
        assert_eq!(kept.bins().iter().map(|b| b.azimuth_deg).collect::<Vec<_>>(), vec![0.0, 10.0]);
    }

    #[test]
    fn angular_spread_examples() {
        assert_eq!(rms_angular_spread(&pas_db(&[(123.0, -40.0)], 1.0)).unwrap(), 0.0);
        let two = pas_db(&[(0.0, -40.0), (90.0, -40.0)], 90.0);
        assert!((rms_angular_spread(&two).unwrap() - 45.0).abs() < 1e-12);
        // across the seam the wrapped estimator sees the same 45 deg pair
        let seam = pas_db(&[(0.0, -40.0), (270.0, -40.0)], 90.0);
        assert!((rms_angular_spread(&seam).unwrap() - 45.0).abs() < 1e-12);
        assert!((UnwrappedSpread.spread_deg(&seam).unwrap() - 135.0).abs() < 1e-12);
    }

    #[test]
    fn direction_counts() {
        let lobe = pas_db(&[(10.0, -3.0), (20.0, 0.0), (30.0, -4.0)], 10.0);
        assert_eq!(count_directions(&lobe, 30.0), 1);
        // seam-spanning lobe: 350, 0, 10
        let seam = pas_db(&[(0.0, 0.0), (10.0, -5.0), (180.0, -50.0), (350.0, -6.0)], 10.0);
        assert_eq!(count_directions(&seam, 30.0), 1);
        let full: Vec<(f64, f64)> = (0..36).map(|i| (i as f64 * 10.0, -1.0)).collect();
        assert_eq!(count_directions(&pas_db(&full, 10.0), 30.0), 1);
    }

    #[test]
    fn four_separated_lobes() {
        // Gaussian lobes (8 deg HPBW) at 20/110/200/290 deg, powers 0..-18 dB.
        let centers = [(20.0, 0.0), (110.0, -6.0), (200.0, -12.0), (290.0, -18.0)];
        let bins: Vec<(f64, f64)> = (0..360)
            .map(|a| {
                let a = a as f64;
                let lin: f64 = centers
                    .iter()
                    .map(|&(c, p)| db_to_linear(p - 12.0 * (wrap_180(a - c) / 8.0).powi(2)))
                    .sum::<f64>()
                    + db_to_linear(-80.0);
                (a, linear_to_db(lin))
            })
            .collect();
        let pas = pas_db(&bins, 1.0);
        assert_eq!(count_directions(&pas, 30.0), 4);
        assert_eq!(count_directions(&pas, 15.0), 3);
    }

    #[test]
    fn split_lobe_counterexample() {
        // A dip between the two thresholds splits one 30 dB lobe into two 20 dB lobes.
        let pas = pas_db(&[(0.0, 0.0), (10.0, -25.0), (20.0, -5.0), (180.0, -60.0)], 10.0);
        assert_eq!(count_directions(&pas, 30.0), 1);
        assert_eq!(count_directions(&pas, 20.0), 2);
    }

    #[test]
    fn spread_stats_examples() {
        let s = spread_stats(&[5.0]).unwrap();
        assert_eq!((s.min, s.max, s.mean, s.std), (5.0, 5.0, 5.0, 0.0));
        let s = spread_stats(&[0.0, 100.0]).unwrap();
        assert_eq!((s.mean, s.std), (50.0, 50.0));
        assert!(spread_stats(&[]).is_err());
    }

    #[test]
    fn registry_exposes_both_definitions() {
        let reg = spread_registry();
        assert_eq!(reg.names(), vec!["wrapped", "unwrapped"]);
        assert_eq!(reg.get("Wrapped").unwrap().name(), "wrapped");
    }

    #[test]
    fn wrap_180_range() {
        assert_eq!(wrap_180(-180.0), 180.0);
        assert_eq!(wrap_180(180.0), 180.0);
        assert_eq!(wrap_180(190.0), -170.0);
        assert_eq!(wrap_180(-540.0), 180.0);
    }

    proptest! {
        #[test]
        fn delay_spread_translation_and_scale_invariant(
            taps in prop::collection::vec((0.0f64..500.0, -40.0f64..0.0), 1..30),
            shift in 0.0f64..1000.0,
            gain_db in -30.0f64..30.0,
        ) {
            let mk = |s: f64, g: f64| {
                let mut t: Vec<Tap> = taps
                    .iter()
                    .enumerate()
                    .map(|(i, &(d, p))| Tap { delay_s: (d + i as f64 * 1e-3 + s) * 1e-9, power_mw: db_to_linear(p + g) })
                    .collect();
                t.reverse();
                PowerDelayProfile::from_unsorted(t, 1e-12).unwrap()
            };
            let a = rms_delay_spread(&mk(0.0, 0.0)).unwrap();
            let b = rms_delay_spread(&mk(shift, gain_db)).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-12) + 1e-18);
        }

        #[test]
        fn wrapped_spread_rotation_invariant(
            powers in prop::collection::vec(-40.0f64..0.0, 36),
            keep in prop::collection::vec(any::<bool>(), 36),
            rot_steps in 0usize..36,
            frac in 0.0f64..10.0,
        ) {
            let bins: Vec<(f64, f64)> = (0..36)
                .filter(|&i| keep[i] || i == 0)
                .map(|i| (i as f64 * 10.0, powers[i]))
                .collect();
            let pas = pas_db(&bins, 10.0);
            let base = rms_angular_spread(&pas).unwrap();
            let aligned = rms_angular_spread(&pas.rotated(rot_steps as f64 * 10.0).unwrap()).unwrap();
            prop_assert!((base - aligned).abs() < 1e-9);
            let arbitrary = rms_angular_spread(&pas.rotated(frac).unwrap()).unwrap();
            prop_assert!((base - arbitrary).abs() < 1e-9);
        }

        #[test]
        fn power_scale_leaves_statistics_unchanged(
            powers in prop::collection::vec(-45.0f64..0.0, 24),
            gain_db in -40.0f64..40.0,
        ) {
            let bins: Vec<(f64, f64)> = powers.iter().enumerate().map(|(i, &p)| (i as f64 * 15.0, p)).collect();
            let scaled: Vec<(f64, f64)> = bins.iter().map(|&(a, p)| (a, p + gain_db)).collect();
            let (a, b) = (pas_db(&bins, 15.0), pas_db(&scaled, 15.0));
            let (ta, tb) = (threshold_pas(&a, 30.0), threshold_pas(&b, 30.0));
            prop_assert_eq!(ta.bins().len(), tb.bins().len());
            prop_assert_eq!(count_directions(&a, 30.0), count_directions(&b, 30.0));
            let (sa, sb) = (rms_angular_spread(&ta).unwrap(), rms_angular_spread(&tb).unwrap());
            prop_assert!((sa - sb).abs() < 1e-9);
        }

        #[test]
        fn tighter_thresholds_keep_fewer_samples(
            powers in prop::collection::vec(-60.0f64..0.0, 36),
            lo in 0.0f64..40.0,
            extra in 0.0f64..20.0,
        ) {
            let bins: Vec<(f64, f64)> = powers.iter().enumerate().map(|(i, &p)| (i as f64 * 10.0, p)).collect();
            let pas = pas_db(&bins, 10.0);
            prop_assert!(threshold_pas(&pas, lo).bins().len() <= threshold_pas(&pas, lo + extra).bins().len());
            let taps: Vec<(f64, f64)> = powers.iter().enumerate().map(|(i, &p)| (i as f64, p)).collect();
            let pdp = pdp_db(&taps, -70.0);
            let n = |t: f64| threshold_pdp(&pdp, t).map(|p| p.taps().len()).unwrap_or(0);
            prop_assert!(n(lo + extra) <= n(lo));
        }
    }
}
