//! Small numeric helpers shared across modules.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

/// Neumaier-compensated running sum. Summation order is the caller's
/// iteration order, so results are reproducible bit for bit.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn csum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = CompensatedSum::default();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Inverse of [`normal_cdf`]: statrs' estimate polished by Newton steps
/// against the libm CDF.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut x = Normal::new(0.0, 1.0).expect("unit normal").inverse_cdf(p);
    for _ in 0..2 {
        let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if pdf < 1e-300 {
            break;
        }
        x -= (normal_cdf(x) - p) / pdf;
    }
    x
}

/// ln Φ(x), accurate deep into the lower tail.
pub fn ln_normal_cdf(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if x > -30.0 {
        return normal_cdf(x).ln();
    }
    // Mills ratio asymptotic series; relative error < 1e-10 for x < -30.
    let x2 = x * x;
    let series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    -0.5 * x2 - 0.5 * (2.0 * std::f64::consts::PI).ln() - (-x).ln() + series.ln()
}

/// ln(Φ(hi) - Φ(lo)) for lo < hi, stable when both bounds sit in the same tail.
pub fn ln_normal_interval(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return f64::NEG_INFINITY;
    }
    if hi <= 0.0 {
        let a = ln_normal_cdf(hi);
        let b = ln_normal_cdf(lo);
        a + (-(b - a).exp()).ln_1p()
    } else if lo >= 0.0 {
        ln_normal_interval(-hi, -lo)
    } else {
        (normal_cdf(hi) - normal_cdf(lo)).ln()
    }
}

/// Standard normal conditioned on [a, b], exact in either tail.
///
/// Returns the draw as an offset from the nearer finite bound when the
/// interval sits in a tail, so callers far out in the tail keep precision.
pub fn truncated_standard_normal<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> TailDraw {
    if a >= 0.0 {
        TailDraw::FromLower(one_sided(a, b, rng))
    } else if b <= 0.0 {
        TailDraw::FromUpper(-one_sided(-b, -a, rng))
    } else if b - a < (2.0 * std::f64::consts::PI).sqrt() {
        loop {
            let z = a + (b - a) * rng.random::<f64>();
            if rng.random::<f64>() <= (-0.5 * z * z).exp() {
                return TailDraw::Absolute(z);
            }
        }
    } else {
        loop {
            let z: f64 = rng.sample(StandardNormal);
            if (a..=b).contains(&z) {
                return TailDraw::Absolute(z);
            }
        }
    }
}

/// A truncated normal draw, either absolute or relative to a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailDraw {
    Absolute(f64),
    /// z - a, non-negative.
    FromLower(f64),
    /// z - b, non-positive.
    FromUpper(f64),
}

/// Offset z - a of a standard normal conditioned on [a, b], 0 <= a < b.
fn one_sided<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    let width = b - a;
    if a * width < 1.0 && width.is_finite() {
        loop {
            let t = width * rng.random::<f64>();
            // (a^2 - z^2) / 2 with z = a + t
            if rng.random::<f64>() <= (-t * (a + 0.5 * t)).exp() {
                return t;
            }
        }
    }
    let lambda = 0.5 * (a + (a * a + 4.0).sqrt());
    loop {
        let e: f64 = rng.sample(Exp1);
        let t = e / lambda;
        if t > width {
            continue;
        }
        let z = a + t;
        if rng.random::<f64>() <= (-0.5 * (z - lambda) * (z - lambda)).exp() {
            return t;
        }
    }
}

/// Rounds to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(csum(v), 2.0);
    }

    #[test]
    fn ln_cdf_matches_direct_where_both_work() {
        for &x in &[-5.0, -1.0, 0.0, 2.0] {
            assert!((ln_normal_cdf(x) - normal_cdf(x).ln()).abs() < 1e-12);
        }
        // continuity across the series switch point
        let below = ln_normal_cdf(-30.0 - 1e-9);
        let above = ln_normal_cdf(-30.0 + 1e-9);
        assert!((below - above).abs() < 1e-6);
    }

    #[test]
    fn interval_is_symmetric_and_finite_in_far_tails() {
        let a = ln_normal_interval(40.0, 41.0);
        let b = ln_normal_interval(-41.0, -40.0);
        assert!(a.is_finite());
        assert!((a - b).abs() < 1e-12);
        let mid = ln_normal_interval(-1.0, 1.0);
        assert!((mid.exp() - 0.682_689_492_137_085_9).abs() < 1e-12, "{:e}", mid.exp() - 0.682_689_492_137_085_9);
        assert_eq!(ln_normal_interval(1.0, 1.0), f64::NEG_INFINITY);
    }

    #[test]
    fn quantile_inverts_cdf() {
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        for p in [1e-12, 1e-6, 0.025, 0.3, 0.5, 0.9, 0.999_999] {
            let x = normal_quantile(p);
            assert!(((normal_cdf(x) - p) / p).abs() < 1e-12, "{p}");
        }
    }

    fn truncated_mean(a: f64, b: f64, n: usize, seed: u64) -> f64 {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let total: f64 = (0..n)
            .map(|_| match truncated_standard_normal(a, b, &mut rng) {
                TailDraw::Absolute(z) => z,
                TailDraw::FromLower(t) => a + t,
                TailDraw::FromUpper(t) => b + t,
            })
            .sum();
        total / n as f64
    }

    #[test]
    fn truncated_normal_mean_matches_closed_form() {
        let pdf = |x: f64| if x.is_infinite() { 0.0 } else { (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt() };
        for (i, &(a, b)) in [(-0.1, 0.1), (-1.0, 2.0), (-4.0, 4.0), (0.5, 8.0), (3.0, 3.1), (-9.0, -8.5), (2.0, f64::INFINITY)]
            .iter()
            .enumerate()
        {
            let want = (pdf(a) - pdf(b)) / (normal_cdf(b) - normal_cdf(a));
            let got = truncated_mean(a, b, 200_000, i as u64);
            assert!((got - want).abs() < 0.01, "[{a}, {b}]: {got} vs {want}");
        }
    }

    #[test]
    fn truncated_normal_far_tail() {
        // E[Z | Z > a] = a + 1/a - 2/a^3 + O(a^-5)
        let a: f64 = 500.0;
        let want = a + 1.0 / a - 2.0 / a.powi(3);
        let got = truncated_mean(a, f64::INFINITY, 100_000, 9);
        assert!((got - want).abs() < 2e-5, "{got} vs {want}");
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        for _ in 0..1000 {
            let TailDraw::FromUpper(t) = truncated_standard_normal(-600.0, -599.999, &mut rng) else {
                panic!("expected an upper-bound offset")
            };
            assert!((-0.001..=0.0).contains(&t));
        }
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(round_sig(112.982_345_6, 6), 112.982);
        assert_eq!(round_sig(-0.000_123_456_78, 6), -0.000_123_457);
        assert_eq!(round_sig(round_sig(3.141_592_65, 6), 6), 3.141_59);
    }
}
