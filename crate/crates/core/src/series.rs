//! Two scalar side checks: the series `Σ_m m^{-2α} Σ_{k<m} k(m-k)` that
//! separates bounded from unbounded front speed, and a lower-tail bound for
//! Poisson variables.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{check_alpha, Error, Result};

/// `Σ_{k=1}^{m} k (m - k)`, term by term.
pub fn inner_sum_brute(m: u64) -> u64 {
    (1..=m).map(|k| k * (m - k)).sum()
}

/// `(m³ - m) / 6`.
pub fn inner_sum(m: u64) -> f64 {
    let m = m as u128;
    ((m * m * m - m) / 6) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Diverges,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub alpha: f64,
    pub terms: u64,
    pub partial_sum: f64,
    /// Upper bound on the remainder `Σ_{m>M}`; infinite when the series diverges.
    pub tail_bound: f64,
    /// `S(M) - S(M/10)`: tends to zero for a convergent series.
    pub last_decade_increment: f64,
    pub verdict: Verdict,
}

/// Partial sums of `Σ_m m^{-2α} (m³ - m) / 6` up to `M`, with the remainder
/// bounded by `∫_M^∞ x^{3-2α} dx / 6`.
pub fn heuristic_series(alpha: f64, terms: u64) -> Result<SeriesReport> {
    check_alpha(alpha)?;
    if terms < 100 {
        return Err(Error::Config(format!("need at least 100 terms, got {terms}")));
    }
    let term = |m: u64| inner_sum(m) * (m as f64).powf(-2.0 * alpha);
    let decade = terms / 10;
    // Smallest terms first.
    let mut upper = 0.0;
    for m in (decade + 1..=terms).rev() {
        upper += term(m);
    }
    let mut lower = 0.0;
    for m in (1..=decade).rev() {
        lower += term(m);
    }
    let partial_sum = lower + upper;
    let p = 2.0 * alpha - 3.0;
    let (tail_bound, verdict) = if p > 1.0 {
        ((terms as f64).powf(1.0 - p) / (6.0 * (p - 1.0)), Verdict::Converges)
    } else {
        (f64::INFINITY, Verdict::Diverges)
    };
    Ok(SeriesReport {
        alpha,
        terms,
        partial_sum,
        tail_bound,
        last_decade_increment: upper,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdpReport {
    pub lambda: f64,
    /// `P(χ ≤ λ/3)` for `χ ~ Poisson(λ)`.
    pub exact_prob: f64,
    /// `e^{-λ/6}`.
    pub bound: f64,
    pub holds: bool,
}

/// `ln P(χ = k)`.
fn ln_pmf(lambda: f64, k: u64) -> f64 {
    -lambda + k as f64 * lambda.ln() - ln_gamma(k as f64 + 1.0)
}

/// Exact lower-tail probability summed in log space.
pub fn poisson_ldp_check(lambda: f64) -> Result<LdpReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be positive and finite, got {lambda}")));
    }
    let k_max = (lambda / 3.0).floor() as u64;
    let logs: Vec<f64> = (0..=k_max).map(|k| ln_pmf(lambda, k)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exact_prob = top.exp() * logs.iter().map(|l| (l - top).exp()).sum::<f64>();
    let bound = (-lambda / 6.0).exp();
    Ok(LdpReport {
        lambda,
        exact_prob,
        bound,
        holds: exact_prob <= bound,
    })
}

/// Fraction of `n` Poisson draws at or below `λ/3`.
pub fn poisson_lower_tail_mc<R: Rng + ?Sized>(lambda: f64, n: u64, rng: &mut R) -> Result<f64> {
    let dist = Poisson::new(lambda).map_err(|e| Error::Domain(e.to_string()))?;
    let cut = lambda / 3.0;
    let hits = (0..n).filter(|_| dist.sample(rng) <= cut).count();
    Ok(hits as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn inner_sum_closed_form() {
        assert_eq!(inner_sum_brute(3), 4);
        for m in 1..=100 {
            assert_eq!(inner_sum(m), inner_sum_brute(m) as f64, "m = {m}");
        }
    }

    #[test]
    fn alpha_three_value() {
        // Σ (m^{3-6} - m^{1-6}) / 6 = (ζ(3) - ζ(5)) / 6.
        let zeta3 = 1.202_056_903_159_594_3;
        let zeta5 = 1.036_927_755_143_37;
        let r = heuristic_series(3.0, 1_000_000).unwrap();
        assert_eq!(r.verdict, Verdict::Converges);
        assert!(r.tail_bound < 1e-10);
        assert!((r.partial_sum - (zeta3 - zeta5) / 6.0).abs() < 1e-10, "{}", r.partial_sum);
        assert!((r.partial_sum - 0.0275215).abs() < 1e-6);
    }

    #[test]
    fn alpha_two_grows_logarithmically() {
        let sums: Vec<f64> = [1_000, 10_000, 100_000]
            .iter()
            .map(|&m| heuristic_series(2.0, m).unwrap().partial_sum)
            .collect();
        let step = 10f64.ln() / 6.0;
        for w in sums.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-3, "{sums:?}");
        }
        assert_eq!(heuristic_series(2.0, 1000).unwrap().verdict, Verdict::Diverges);
        assert_eq!(heuristic_series(1.5, 1000).unwrap().verdict, Verdict::Diverges);
        assert_eq!(heuristic_series(2.5, 1000).unwrap().verdict, Verdict::Converges);
    }

    #[test]
    fn poisson_small_lambda() {
        let r = poisson_ldp_check(0.1).unwrap();
        assert!((r.exact_prob - (-0.1f64).exp()).abs() < 1e-15);
        assert!(r.holds);
    }

    #[test]
    fn poisson_sweep_holds() {
        for lambda in [30.0, 60.0, 120.0, 240.0] {
            let r = poisson_ldp_check(lambda).unwrap();
            assert!(r.holds, "{r:?}");
        }
        let r = poisson_ldp_check(60.0).unwrap();
        assert!((r.bound - (-10f64).exp()).abs() < 1e-18);
    }

    #[test]
    fn poisson_matches_direct_cdf() {
        // Recursive pmf p_k = p_{k-1} λ / k as an independent oracle.
        let lambda: f64 = 60.0;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        for k in 1..=20 {
            p *= lambda / k as f64;
            cdf += p;
        }
        let r = poisson_ldp_check(lambda).unwrap();
        assert!((r.exact_prob - cdf).abs() < 1e-12 * cdf, "{} vs {cdf}", r.exact_prob);
    }

    #[test]
    fn poisson_matches_monte_carlo() {
        let mut rng = stream(11);
        for lambda in [10.0, 60.0] {
            let p = poisson_ldp_check(lambda).unwrap().exact_prob;
            let n = 1_000_000;
            let est = poisson_lower_tail_mc(lambda, n, &mut rng).unwrap();
            let se = (p * (1.0 - p) / n as f64).sqrt().max(1.0 / n as f64);
            assert!((est - p).abs() <= 3.0 * se, "λ {lambda}: {est} vs {p}");
        }
    }
}
