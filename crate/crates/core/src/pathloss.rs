//! Free-space, close-in (CI) and frequency-weighted close-in (CIF) path loss.
//!
//! All models are anchored at the free-space loss of the first meter and
//! exclude antenna gains. The CIF form scales the path loss exponent by
//! `1 + b (f - f0) / f0`, so `b = 0` or `f = f0` collapses it onto CI.

use std::fmt;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Close-in reference distance shared by every model, m.
pub const REFERENCE_DISTANCE_M: f64 = 1.0;

/// Carrier frequency.
///
/// Both the Hz and GHz views are kept, so a value built from either unit
/// reads back bit-exact in that unit.
#[derive(Clone, Copy)]
pub struct Frequency {
    hz: f64,
    ghz: f64,
}

impl Frequency {
    pub fn from_hz(hz: f64) -> Result<Self> {
        if !(hz.is_finite() && hz > 0.0) {
            return Err(domain(format!("frequency must be positive and finite, got {hz} Hz")));
        }
        Ok(Self { hz, ghz: hz / 1e9 })
    }

    pub fn from_ghz(ghz: f64) -> Result<Self> {
        if !(ghz.is_finite() && ghz > 0.0) {
            return Err(domain(format!("frequency must be positive and finite, got {ghz} GHz")));
        }
        Ok(Self { hz: ghz * 1e9, ghz })
    }

    pub fn hz(self) -> f64 {
        self.hz
    }

    pub fn ghz(self) -> f64 {
        self.ghz
    }

    /// Wavelength in meters.
    pub fn wavelength_m(self) -> f64 {
        SPEED_OF_LIGHT / self.hz
    }
}

impl PartialEq for Frequency {
    fn eq(&self, other: &Self) -> bool {
        self.hz == other.hz
    }
}

impl PartialOrd for Frequency {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.hz.partial_cmp(&other.hz)
    }
}

impl fmt::Debug for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} GHz", self.ghz)
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} GHz", self.ghz)
    }
}

/// Single-frequency close-in model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiParams {
    pub n: f64,
    pub sigma_db: f64,
}

impl CiParams {
    pub fn new(n: f64, sigma_db: f64) -> Result<Self> {
        let p = Self { n, sigma_db };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n.is_finite() && self.n > 0.0) {
            return Err(domain(format!("path loss exponent must be positive, got {}", self.n)));
        }
        check_sigma(self.sigma_db)
    }

    pub fn d0_m(&self) -> f64 {
        REFERENCE_DISTANCE_M
    }
}

/// Multi-frequency close-in model with frequency-weighted exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CifParams {
    pub n: f64,
    pub b: f64,
    pub f0: Frequency,
    pub sigma_db: f64,
}

/// Fitted slopes beyond this magnitude indicate corrupt input.
pub const MAX_ABS_B: f64 = 10.0;

impl CifParams {
    pub fn new(n: f64, b: f64, f0: Frequency, sigma_db: f64) -> Result<Self> {
        let p = Self { n, b, f0, sigma_db };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n.is_finite() && self.n > 0.0) {
            return Err(domain(format!("path loss exponent must be positive, got {}", self.n)));
        }
        if !(self.b.is_finite() && self.b.abs() < MAX_ABS_B) {
            return Err(domain(format!(
                "frequency slope b = {} outside sanity bound |b| < {MAX_ABS_B}",
                self.b
            )));
        }
        check_sigma(self.sigma_db)
    }

    pub fn d0_m(&self) -> f64 {
        REFERENCE_DISTANCE_M
    }

    /// `1 + b (f - f0) / f0`; must stay positive.
    pub fn slope_factor(&self, f: Frequency) -> Result<f64> {
        let factor = 1.0 + self.b * (f.hz() - self.f0.hz()) / self.f0.hz();
        if factor <= 0.0 {
            return Err(domain(format!(
                "non-positive effective exponent: slope factor {factor} at {f} (b = {}, f0 = {})",
                self.b, self.f0
            )));
        }
        Ok(factor)
    }
}

fn check_sigma(sigma_db: f64) -> Result<()> {
    if !(sigma_db.is_finite() && sigma_db >= 0.0) {
        return Err(domain(format!("shadow fading sigma must be >= 0, got {sigma_db}")));
    }
    Ok(())
}

fn check_distance(d_m: f64) -> Result<()> {
    if !(d_m.is_finite() && d_m > 0.0) {
        return Err(domain(format!("distance must be positive, got {d_m} m")));
    }
    if d_m < REFERENCE_DISTANCE_M {
        log::warn!("distance {d_m} m is inside the 1 m close-in reference; extrapolating");
    }
    Ok(())
}

/// One zero-mean Gaussian shadow fading draw in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowFading {
    pub sample_db: f64,
}

impl ShadowFading {
    pub fn draw<R: Rng + ?Sized>(sigma_db: f64, rng: &mut R) -> Self {
        let z: f64 = rng.sample(StandardNormal);
        Self {
            sample_db: z * sigma_db,
        }
    }
}

/// Friis free-space loss `20 log10(4 pi d f / c)` in dB.
pub fn fspl(f: Frequency, d_m: f64) -> Result<f64> {
    if !(d_m.is_finite() && d_m > 0.0) {
        return Err(domain(format!("distance must be positive, got {d_m} m")));
    }
    Ok(20.0 * (4.0 * std::f64::consts::PI * d_m * f.hz() / SPEED_OF_LIGHT).log10())
}

/// A path loss law selectable at runtime.
pub trait PathLossModel: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Path loss exponent in effect at `f`.
    fn effective_ple(&self, f: Frequency) -> Result<f64>;

    fn sigma_db(&self) -> f64;

    /// Mean path loss in dB: FSPL at 1 m plus `10 n_eff log10(d)`.
    fn mean_db(&self, f: Frequency, d_m: f64) -> Result<f64> {
        check_distance(d_m)?;
        Ok(fspl(f, REFERENCE_DISTANCE_M)? + 10.0 * self.effective_ple(f)? * d_m.log10())
    }

    /// Mean path loss plus one shadow fading draw.
    fn sample_db(&self, f: Frequency, d_m: f64, rng: &mut dyn RngCore) -> Result<f64> {
        let mean = self.mean_db(f, d_m)?;
        Ok(mean + ShadowFading::draw(self.sigma_db(), rng).sample_db)
    }
}

/// Free space as a model: exponent 2, no shadowing.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeSpace;

impl PathLossModel for FreeSpace {
    fn name(&self) -> &'static str {
        "fspl"
    }

    fn effective_ple(&self, _f: Frequency) -> Result<f64> {
        Ok(2.0)
    }

    fn sigma_db(&self) -> f64 {
        0.0
    }
}

impl PathLossModel for CiParams {
    fn name(&self) -> &'static str {
        "ci"
    }

    fn effective_ple(&self, _f: Frequency) -> Result<f64> {
        self.validate()?;
        Ok(self.n)
    }

    fn sigma_db(&self) -> f64 {
        self.sigma_db
    }
}

impl PathLossModel for CifParams {
    fn name(&self) -> &'static str {
        "cif"
    }

    fn effective_ple(&self, f: Frequency) -> Result<f64> {
        self.validate()?;
        Ok(self.n * self.slope_factor(f)?)
    }

    fn sigma_db(&self) -> f64 {
        self.sigma_db
    }
}

/// Either model family's parameters, for storage and serialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    Ci(CiParams),
    Cif(CifParams),
}

impl ModelParams {
    pub fn as_model(&self) -> &dyn PathLossModel {
        match self {
            ModelParams::Ci(p) => p,
            ModelParams::Cif(p) => p,
        }
    }

    pub fn n(&self) -> f64 {
        match self {
            ModelParams::Ci(p) => p.n,
            ModelParams::Cif(p) => p.n,
        }
    }

    pub fn sigma_db(&self) -> f64 {
        self.as_model().sigma_db()
    }

    /// Same model with shadow fading replaced.
    pub fn with_sigma(mut self, sigma_db: f64) -> Self {
        match &mut self {
            ModelParams::Ci(p) => p.sigma_db = sigma_db,
            ModelParams::Cif(p) => p.sigma_db = sigma_db,
        }
        self
    }
}

pub fn ci_mean(p: &CiParams, f: Frequency, d_m: f64) -> Result<f64> {
    p.mean_db(f, d_m)
}

pub fn ci_sample<R: RngCore>(p: &CiParams, f: Frequency, d_m: f64, rng: &mut R) -> Result<f64> {
    p.sample_db(f, d_m, rng)
}

pub fn cif_mean(p: &CifParams, f: Frequency, d_m: f64) -> Result<f64> {
    p.mean_db(f, d_m)
}

pub fn cif_sample<R: RngCore>(p: &CifParams, f: Frequency, d_m: f64, rng: &mut R) -> Result<f64> {
    p.sample_db(f, d_m, rng)
}

/// Count-weighted average frequency `sum(f_k N_k) / sum(N_k)`.
pub fn weighted_average_frequency(bands: &[(Frequency, f64)]) -> Result<Frequency> {
    if bands.is_empty() {
        return Err(domain("weighted average frequency needs at least one band"));
    }
    if let Some((f, w)) = bands.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
        return Err(domain(format!("band {f} has invalid count {w}")));
    }
    let total = crate::numeric::csum(bands.iter().map(|(_, w)| *w));
    if total <= 0.0 {
        return Err(domain("all band counts are zero"));
    }
    let weighted = crate::numeric::csum(bands.iter().map(|(f, w)| f.ghz() * w));
    Frequency::from_ghz(weighted / total)
}

impl From<CiParams> for ModelParams {
    fn from(p: CiParams) -> Self {
        ModelParams::Ci(p)
    }
}

impl From<CifParams> for ModelParams {
    fn from(p: CifParams) -> Self {
        ModelParams::Cif(p)
    }
}

impl std::str::FromStr for Frequency {
    type Err = Error;

    /// Parses a GHz value.
    fn from_str(s: &str) -> Result<Self> {
        let ghz: f64 = s
            .trim()
            .parse()
            .map_err(|_| domain(format!("not a frequency in GHz: '{s}'")))?;
        Frequency::from_ghz(ghz)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ghz(x: f64) -> Frequency {
        Frequency::from_ghz(x).unwrap()
    }

    // Independent hand evaluation of Friis at 1 m, using only the
    // definition and no code from this module.
    fn friis_1m_oracle(f_hz: f64) -> f64 {
        let c = 299_792_458.0_f64;
        20.0 * (4.0 * 3.141_592_653_589_793 * f_hz / c).log10()
    }

    #[test]
    fn fspl_reference_values() {
        assert!((fspl(ghz(28.0), 1.0).unwrap() - 61.39).abs() < 0.005);
        assert!((fspl(ghz(142.0), 1.0).unwrap() - 75.49).abs() < 0.005);
        assert!((fspl(ghz(28.0), 1.0).unwrap() - friis_1m_oracle(28e9)).abs() < 1e-12);
    }

    #[test]
    fn fspl_decade_is_20_db() {
        let f = ghz(73.0);
        let d = fspl(f, 37.0).unwrap() - fspl(f, 3.7).unwrap();
        assert!((d - 20.0).abs() < 1e-12);
    }

    #[test]
    fn fspl_rejects_bad_inputs() {
        assert!(matches!(fspl(ghz(28.0), 0.0), Err(Error::Domain(_))));
        assert!(matches!(fspl(ghz(28.0), -1.0), Err(Error::Domain(_))));
        assert!(Frequency::from_hz(0.0).is_err());
        assert!(Frequency::from_ghz(-3.0).is_err());
    }

    #[test]
    fn ci_mean_examples() {
        let p = CiParams::new(1.9, 2.7).unwrap();
        let pl = ci_mean(&p, ghz(142.0), 100.0).unwrap();
        assert!((pl - 113.49).abs() < 0.005);
        assert_eq!(ci_mean(&p, ghz(142.0), 1.0).unwrap(), fspl(ghz(142.0), 1.0).unwrap());
        let free = CiParams::new(2.0, 0.0).unwrap();
        for d in [1.5, 10.0, 250.0, 930.0] {
            let diff = ci_mean(&free, ghz(38.0), d).unwrap() - fspl(ghz(38.0), d).unwrap();
            assert!(diff.abs() < 1e-10, "d={d}: {diff}");
        }
        assert!(ci_mean(&p, ghz(28.0), 0.0).is_err());
    }

    #[test]
    fn ci_below_anchor_computes() {
        let p = CiParams::new(3.0, 0.0).unwrap();
        let pl = ci_mean(&p, ghz(28.0), 0.5).unwrap();
        assert!(pl < fspl(ghz(28.0), 1.0).unwrap());
    }

    #[test]
    fn ci_sample_degenerate_and_seeded() {
        let p = CiParams::new(2.3, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            ci_sample(&p, ghz(28.0), 80.0, &mut rng).unwrap(),
            ci_mean(&p, ghz(28.0), 80.0).unwrap()
        );
        let p = CiParams::new(2.3, 4.3).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| ci_sample(&p, ghz(28.0), 80.0, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }

    #[test]
    fn ci_sample_mean_converges() {
        let p = CiParams::new(2.3, 4.3).unwrap();
        let f = ghz(28.0);
        let mean = ci_mean(&p, f, 120.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let avg = (0..n)
            .map(|_| ci_sample(&p, f, 120.0, &mut rng).unwrap())
            .sum::<f64>()
            / n as f64;
        // 4.3 / sqrt(1e5) = 0.0136 dB standard error
        assert!((avg - mean).abs() < 0.05, "{avg} vs {mean}");
    }

    #[test]
    fn cif_mean_examples() {
        let p = CifParams::new(2.07, -0.10, ghz(73.0), 3.5).unwrap();
        let pl = cif_mean(&p, ghz(142.0), 100.0).unwrap();
        // 75.49 + 10 * 2.07 * (1 - 0.1 * 69 / 73) * 2
        let hand = friis_1m_oracle(142e9) + 10.0 * 2.07 * (1.0 - 0.1 * 69.0 / 73.0) * 2.0;
        assert!((pl - hand).abs() < 1e-9);
        assert!((pl - 112.98).abs() < 0.01);

        let ci = CiParams::new(2.07, 3.5).unwrap();
        for d in [1.0, 7.0, 300.0] {
            assert_eq!(cif_mean(&p, ghz(73.0), d).unwrap(), ci_mean(&ci, ghz(73.0), d).unwrap());
        }
        let flat = CifParams::new(2.07, 0.0, ghz(73.0), 3.5).unwrap();
        for f in [28.0, 38.0, 142.0] {
            let a = cif_mean(&flat, ghz(f), 55.0).unwrap();
            let b = ci_mean(&ci, ghz(f), 55.0).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cif_rejects_non_positive_slope_factor() {
        let p = CifParams::new(2.0, -1.0, ghz(50.0), 0.0).unwrap();
        assert!(matches!(cif_mean(&p, ghz(120.0), 10.0), Err(Error::Domain(_))));
        assert!(CifParams::new(2.0, 12.0, ghz(50.0), 0.0).is_err());
        assert!(CifParams::new(0.0, 0.1, ghz(50.0), 0.0).is_err());
    }

    #[test]
    fn cif_sample_std_converges() {
        let p = CifParams::new(3.21, -0.03, ghz(62.0), 9.6).unwrap();
        let f = ghz(73.0);
        let mean = cif_mean(&p, f, 60.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| cif_sample(&p, f, 60.0, &mut rng).unwrap()).collect();
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((var.sqrt() / 9.6 - 1.0).abs() < 0.02);
        let flat = CifParams { sigma_db: 0.0, ..p };
        assert_eq!(cif_sample(&flat, f, 60.0, &mut rng).unwrap(), cif_mean(&flat, f, 60.0).unwrap());
    }

    #[test]
    fn weighted_average_frequency_examples() {
        let f = weighted_average_frequency(&[(ghz(28.0), 10.0), (ghz(73.0), 10.0)]).unwrap();
        assert!((f.ghz() - 50.5).abs() < 1e-12);
        assert_eq!(weighted_average_frequency(&[(ghz(142.0), 3.0)]).unwrap().ghz(), 142.0);
        assert!(weighted_average_frequency(&[]).is_err());
        assert!(weighted_average_frequency(&[(ghz(28.0), 0.0), (ghz(73.0), 0.0)]).is_err());
        assert!(weighted_average_frequency(&[(ghz(28.0), -1.0)]).is_err());
    }

    #[test]
    fn negative_b_lowers_exponent_above_f0() {
        let p = CifParams::new(2.96, -0.05, ghz(62.0), 10.71).unwrap();
        for f in [73.0, 100.0, 142.0] {
            assert!(p.effective_ple(ghz(f)).unwrap() < p.n);
        }
    }

    proptest! {
        #[test]
        fn ghz_roundtrip_exact(x in 0.001f64..1000.0) {
            let f = Frequency::from_ghz(x).unwrap();
            prop_assert_eq!(f.ghz(), x);
            prop_assert_eq!(f.hz(), x * 1e9);
            let g = Frequency::from_hz(x * 1e9).unwrap();
            prop_assert_eq!(g.hz(), x * 1e9);
        }

        #[test]
        fn anchor_continuity(n in 0.5f64..6.0, b in -0.3f64..0.3, f in 1.0f64..300.0) {
            let fr = ghz(f);
            let at1 = fspl(fr, 1.0).unwrap();
            prop_assert_eq!(CiParams::new(n, 1.0).unwrap().mean_db(fr, 1.0).unwrap(), at1);
            let cif = CifParams::new(n, b, ghz(70.0), 1.0).unwrap();
            if cif.slope_factor(fr).is_ok() {
                prop_assert_eq!(cif.mean_db(fr, 1.0).unwrap(), at1);
            }
        }

        #[test]
        fn mean_strictly_increasing_in_distance(n in 0.5f64..6.0, d in 1.0f64..1000.0, k in 1.001f64..3.0) {
            let p = CiParams::new(n, 0.0).unwrap();
            let fr = ghz(60.0);
            prop_assert!(p.mean_db(fr, d * k).unwrap() > p.mean_db(fr, d).unwrap());
        }

        #[test]
        fn six_db_per_octave(f in 0.5f64..500.0, d in 0.5f64..2000.0) {
            let diff = fspl(ghz(2.0 * f), d).unwrap() - fspl(ghz(f), d).unwrap();
            prop_assert!((diff - 20.0 * 2f64.log10()).abs() < 1e-9);
        }
    }

    #[test]
    fn cif_degenerates_to_ci_over_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let n = rng.random_range(1.0..5.0);
            let f = ghz(rng.random_range(10.0..200.0));
            let d = rng.random_range(1.0..1000.0);
            let cif = CifParams::new(n, 0.0, ghz(rng.random_range(20.0..150.0)), 0.0).unwrap();
            let ci = CiParams::new(n, 0.0).unwrap();
            let (a, b) = (cif.mean_db(f, d).unwrap(), ci.mean_db(f, d).unwrap());
            assert!((a - b).abs() <= 1e-12 * b.abs());
        }
    }
}
