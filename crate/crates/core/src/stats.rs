//! Statistical primitives for the property checks: incomplete gamma,
//! chi-square goodness of fit, Kolmogorov-Smirnov distances.
//!
//! Small and self-contained so the core stays no_std; values are pinned
//! against an independent reference implementation in the tests.

// Inherent float methods cover this when std is linked (tests); the trait
// provides them in the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

/// Natural log of the gamma function (Lanczos, g = 7), valid for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    #[allow(clippy::excessive_precision)] // published digits kept verbatim
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        let pi = core::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * core::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

// Continued fraction for Q(a, x) by modified Lentz.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Chi-square CDF with `df` degrees of freedom.
pub fn chi_square_cdf(x: f64, df: f64) -> f64 {
    gamma_p(0.5 * df, 0.5 * x)
}

/// Outcome of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofResult {
    pub statistic: f64,
    pub df: usize,
    /// Upper tail probability of the statistic under the null.
    pub p_value: f64,
}

impl GofResult {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

/// Chi-square GOF of positive-integer samples against the geometric law
/// `P(g = k) = p * (1-p)^(k-1)`, k >= 1.
///
/// Bins run k = 1, 2, ... while the expected count stays at or above
/// `min_expected`; the remainder pools into one tail bin.
pub fn geometric_gof(samples: &[u64], p: f64, min_expected: f64) -> GofResult {
    assert!(!samples.is_empty() && p > 0.0 && p < 1.0);
    let n = samples.len() as f64;
    let q = 1.0 - p;

    // Number of leading bins with expected >= min_expected; at least one.
    let mut k_max = 1usize;
    while n * p * q.powi(k_max as i32) >= min_expected && k_max < 10_000 {
        k_max += 1;
    }

    let mut counts = alloc::vec![0u64; k_max + 1]; // [k=1..k_max], tail at the end
    for &g in samples {
        let g = g.max(1) as usize;
        if g <= k_max {
            counts[g - 1] += 1;
        } else {
            counts[k_max] += 1;
        }
    }

    let mut statistic = 0.0;
    for (i, &c) in counts.iter().enumerate() {
        let expected = if i < k_max {
            n * p * q.powi(i as i32)
        } else {
            n * q.powi(k_max as i32) // tail: P(g > k_max)
        };
        let d = c as f64 - expected;
        statistic += d * d / expected;
    }
    let df = k_max; // bins - 1
    GofResult {
        statistic,
        df,
        p_value: 1.0 - chi_square_cdf(statistic, df as f64),
    }
}

/// Kolmogorov-Smirnov statistic of samples against a CDF. Sorts a copy.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!samples.is_empty());
    let mut xs: Vec<f64> = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Asymptotic Kolmogorov survival function
/// `Q(x) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2)`.
pub fn kolmogorov_q(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..200 {
        let k = k as f64;
        let term = (-2.0 * k * k * x * x).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic KS test p-value for `n` samples with statistic `d`.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    kolmogorov_q((n as f64).sqrt() * d)
}

/// Sample mean and the standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    assert!(!xs.is_empty());
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, uniform_f64};
    use approx::assert_relative_eq;

    // Reference values computed with SciPy 1.x (special.gammainc,
    // stats.chi2.cdf, special.kolmogorov) and libm lgamma.
    #[test]
    fn ln_gamma_matches_reference() {
        assert_relative_eq!(ln_gamma(0.5), 0.5723649429247004, epsilon = 1e-12);
        assert_relative_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(ln_gamma(3.7), 1.4280723266653883, epsilon = 1e-12);
        assert_relative_eq!(ln_gamma(10.3), 13.48203678613836, epsilon = 1e-11);
    }

    #[test]
    fn gamma_p_matches_reference() {
        assert_relative_eq!(gamma_p(3.5, 2.0), 0.22022259152428406, epsilon = 1e-12);
        assert_relative_eq!(gamma_p(0.5, 0.25), 0.5204998778130466, epsilon = 1e-12);
        assert_relative_eq!(gamma_p(7.0, 7.0), 0.5502889441513008, epsilon = 1e-12);
        assert_relative_eq!(gamma_p(50.0, 40.0), 0.07033506665939494, epsilon = 1e-11);
    }

    #[test]
    fn chi_square_cdf_matches_reference() {
        assert_relative_eq!(chi_square_cdf(12.3, 7.0), 0.9088851139996869, epsilon = 1e-12);
        assert_relative_eq!(
            chi_square_cdf(36.123, 14.0),
            0.9989999055124767,
            epsilon = 1e-12
        );
    }

    #[test]
    fn kolmogorov_q_matches_reference() {
        assert_relative_eq!(kolmogorov_q(0.5), 0.9639452436648751, epsilon = 1e-12);
        assert_relative_eq!(kolmogorov_q(1.0), 0.26999967167735456, epsilon = 1e-12);
        assert_relative_eq!(kolmogorov_q(1.36), 0.049485876755377876, epsilon = 1e-12);
    }

    #[test]
    fn geometric_gof_accepts_true_law() {
        // Inverse-CDF sampling of geometric(1/2).
        let mut rng = stream(42, 0);
        let samples: alloc::vec::Vec<u64> = (0..100_000)
            .map(|_| {
                let u = uniform_f64(&mut rng);
                ((1.0 - u).ln() / (0.5f64).ln()).floor() as u64 + 1
            })
            .collect();
        let r = geometric_gof(&samples, 0.5, 5.0);
        assert!(r.passes(0.001), "statistic {} p {}", r.statistic, r.p_value);
    }

    #[test]
    fn geometric_gof_rejects_wrong_law() {
        let mut rng = stream(42, 1);
        let samples: alloc::vec::Vec<u64> = (0..100_000)
            .map(|_| {
                let u = uniform_f64(&mut rng);
                ((1.0 - u).ln() / (0.7f64).ln()).floor() as u64 + 1
            })
            .collect();
        let r = geometric_gof(&samples, 0.5, 5.0);
        assert!(!r.passes(0.001));
    }

    #[test]
    fn ks_uniform_accepts_uniform() {
        let mut rng = stream(7, 0);
        let xs: alloc::vec::Vec<f64> = (0..50_000).map(|_| uniform_f64(&mut rng)).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
        assert!(ks_p_value(d, xs.len()) > 0.01, "d = {d}");
    }
}
