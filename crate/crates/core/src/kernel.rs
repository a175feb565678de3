//! Dispersal kernels.
//!
//! The continuous kernel is `a(z) = c_α / (1 + z²)^α` with `c_α` chosen so it
//! integrates to one; it is a rescaled Student-t density with `2α - 1` degrees
//! of freedom. The lattice kernel is the unnormalised `a⁽ᵈ⁾(k) = 1 / (1 ∨ k²)^α`,
//! so `a⁽ᵈ⁾(0) = a⁽ᵈ⁾(±1) = 1`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StudentT};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{check_alpha, Error, Result};
use crate::quad::{self, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelVariant {
    Continuous,
    Lattice,
}

/// How continuous displacements are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    /// Rescaled Student-t variate.
    #[default]
    StudentT,
    /// Numerical inversion of the tabulated tail.
    InverseCdf,
}

/// `c_α` computed by quadrature: with `z = tan θ`,
/// `∫ (1 + z²)^{-α} dz = 2 ∫_0^{π/2} cos^{2α-2} θ dθ`.
pub fn normalization_constant(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    // With φ = π/2 - θ and w = φ^{p+1}, p = 2α - 2, the integrand becomes the
    // smooth (sin φ / φ)^p / (p + 1) even when p < 0.
    let p = 2.0 * alpha - 2.0;
    let q = p + 1.0;
    let f = |w: f64| {
        let phi = w.powf(1.0 / q);
        let sinc = if phi == 0.0 { 1.0 } else { phi.sin() / phi };
        sinc.powf(p) / q
    };
    let integral = quad::integrate(f, 0.0, FRAC_PI_2.powf(q), Tolerance::new(1e-15, 1e-14))?.value;
    let total = 2.0 * integral;
    Ok(1.0 / total)
}

/// `Γ(α) / (√π Γ(α - ½))`.
pub fn normalization_closed_form(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((ln_gamma(alpha) - ln_gamma(alpha - 0.5)).exp() / PI.sqrt())
}

/// `a(z)` for a given normalisation.
#[inline]
pub fn density(z: f64, alpha: f64, c_alpha: f64) -> f64 {
    c_alpha * (1.0 + z * z).powf(-alpha)
}

/// `a(z)`; recomputes `c_α` on each call, so prefer [`KernelSpec`] in loops.
pub fn kernel_continuous(z: f64, alpha: f64) -> Result<f64> {
    Ok(density(z, alpha, normalization_constant(alpha)?))
}

/// `a⁽ᵈ⁾(k) = 1 / (1 ∨ k²)^α`.
#[inline]
pub fn kernel_lattice(k: i64, alpha: f64) -> f64 {
    let m = k.unsigned_abs();
    if m <= 1 {
        1.0
    } else {
        (m as f64).powf(-2.0 * alpha)
    }
}

/// `Σ_{k ≥ m} k^{-p}` for `p > 1`, `m ≥ 1`: explicit terms up to 64, then an
/// Euler–Maclaurin tail whose remainder is below the last included correction.
pub fn power_sum_from(p: f64, m: u64) -> f64 {
    assert!(p > 1.0 && m >= 1, "power_sum_from needs p > 1 and m >= 1");
    let m0 = m.max(64);
    let mut head = 0.0;
    for k in (m..m0).rev() {
        head += (k as f64).powf(-p);
    }
    head + euler_maclaurin_tail(p, m0 as f64)
}

fn euler_maclaurin_tail(p: f64, m: f64) -> f64 {
    let fm = m.powf(-p);
    let integral = m * fm / (p - 1.0);
    let d1 = p * fm / m / 12.0;
    let d3 = p * (p + 1.0) * (p + 2.0) * fm / m.powi(3) / 720.0;
    let d5 = p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) * fm / m.powi(5) / 30240.0;
    integral + 0.5 * fm + d1 - d3 + d5
}

/// Rigorous bounds `∫_m^∞ y^{-p} ≤ Σ_{k ≥ m} k^{-p} ≤ m^{-p} + ∫_m^∞ y^{-p}`.
pub fn power_sum_bounds(p: f64, m: u64) -> (f64, f64) {
    assert!(p > 1.0 && m >= 1);
    let m = m as f64;
    let integral = m.powf(1.0 - p) / (p - 1.0);
    (integral, integral + m.powf(-p))
}

/// `Σ_k a⁽ᵈ⁾(k) = 3 + 2 Σ_{k ≥ 2} k^{-2α}`.
pub fn lattice_kernel_mass(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(3.0 + 2.0 * power_sum_from(2.0 * alpha, 2))
}

/// `∫_x^∞ a`.
pub fn kernel_tail_integral(x: f64, alpha: f64) -> Result<f64> {
    KernelSpec::continuous(alpha).map(|k| k.tail(x))
}

/// A draw from `a` using the default sampler.
pub fn sample_displacement<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> Result<f64> {
    let nu = 2.0 * alpha - 1.0;
    check_alpha(alpha)?;
    let t = StudentT::new(nu).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(t.sample(rng) / nu.sqrt())
}

const TABLE_LO: f64 = 1e-2;
const TABLE_HI: f64 = 1e8;
const TABLE_NODES: usize = 4097;

/// Tail `∫_x^∞ a` on a log-spaced grid, interpolated with cubic Hermite
/// polynomials in `(ln x, ln tail)` using the exact slope `-x a(x) / tail(x)`.
#[derive(Debug)]
struct TailTable {
    ln_lo: f64,
    step: f64,
    ln_tail: Vec<f64>,
    slope: Vec<f64>,
}

impl TailTable {
    fn build(alpha: f64, c: f64) -> Result<TailTable> {
        let ln_lo = TABLE_LO.ln();
        let step = (TABLE_HI.ln() - ln_lo) / (TABLE_NODES - 1) as f64;
        let xs: Vec<f64> = (0..TABLE_NODES).map(|i| (ln_lo + step * i as f64).exp()).collect();
        let mut tail = vec![0.0; TABLE_NODES];
        tail[TABLE_NODES - 1] = asymptotic_tail(TABLE_HI, alpha, c);
        let f = |z: f64| density(z, alpha, c);
        for i in (0..TABLE_NODES - 1).rev() {
            let seg = quad::integrate(f, xs[i], xs[i + 1], Tolerance::new(0.0, 1e-14))?;
            tail[i] = tail[i + 1] + seg.value;
        }
        let ln_tail: Vec<f64> = tail.iter().map(|t| t.ln()).collect();
        let slope = xs
            .iter()
            .zip(&tail)
            .map(|(&x, &t)| -x * density(x, alpha, c) / t)
            .collect();
        Ok(TailTable {
            ln_lo,
            step,
            ln_tail,
            slope,
        })
    }

    fn eval(&self, x: f64) -> f64 {
        let s = (x.ln() - self.ln_lo) / self.step;
        let i = (s.floor() as usize).min(TABLE_NODES - 2);
        let u = s - i as f64;
        let (y0, y1) = (self.ln_tail[i], self.ln_tail[i + 1]);
        let (m0, m1) = (self.slope[i] * self.step, self.slope[i + 1] * self.step);
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        (h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1).exp()
    }
}

/// `∫_z^∞ c (1 + y²)^{-α} dy` from the binomial series in `1/y²`; accurate to
/// double precision once `z ≥ 10⁴`.
fn asymptotic_tail(z: f64, alpha: f64, c: f64) -> f64 {
    let p = 2.0 * alpha;
    let mut sum = 0.0;
    let mut coef = 1.0;
    for j in 0..6 {
        let e = p + 2.0 * j as f64 - 1.0;
        sum += coef * z.powf(-e) / e;
        coef *= -(alpha + j as f64) / (j as f64 + 1.0);
    }
    c * sum
}

/// Kernel family with precomputed normalisation, tail table and sampler.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub alpha: f64,
    pub variant: KernelVariant,
    /// `c_α` for the continuous kernel, `1` for the lattice kernel.
    pub c_alpha: f64,
    pub sampler: SamplerKind,
    table: Option<Arc<TailTable>>,
    student: Option<StudentT<f64>>,
}

impl KernelSpec {
    pub fn continuous(alpha: f64) -> Result<KernelSpec> {
        check_alpha(alpha)?;
        let c = normalization_constant(alpha)?;
        let table = TailTable::build(alpha, c)?;
        let nu = 2.0 * alpha - 1.0;
        let student = StudentT::new(nu).ok();
        Ok(KernelSpec {
            alpha,
            variant: KernelVariant::Continuous,
            c_alpha: c,
            sampler: SamplerKind::StudentT,
            table: Some(Arc::new(table)),
            student,
        })
    }

    pub fn lattice(alpha: f64) -> Result<KernelSpec> {
        check_alpha(alpha)?;
        Ok(KernelSpec {
            alpha,
            variant: KernelVariant::Lattice,
            c_alpha: 1.0,
            sampler: SamplerKind::StudentT,
            table: None,
            student: None,
        })
    }

    pub fn with_sampler(mut self, sampler: SamplerKind) -> Self {
        self.sampler = sampler;
        self
    }

    /// `a(z)` for the continuous kernel, `a⁽ᵈ⁾(round z)` for the lattice one.
    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        match self.variant {
            KernelVariant::Continuous => density(z, self.alpha, self.c_alpha),
            KernelVariant::Lattice => kernel_lattice(round_half_down(z), self.alpha),
        }
    }

    /// `∫_x^∞ a` for the continuous kernel.
    pub fn tail(&self, x: f64) -> f64 {
        debug_assert_eq!(self.variant, KernelVariant::Continuous);
        if x.is_nan() {
            return f64::NAN;
        }
        if x < 0.0 {
            return 1.0 - self.tail(-x);
        }
        if x < TABLE_LO {
            let f = |z: f64| density(z, self.alpha, self.c_alpha);
            return 0.5 - quad::gk21(&f, 0.0, x).0;
        }
        if x >= TABLE_HI {
            return asymptotic_tail(x, self.alpha, self.c_alpha);
        }
        match &self.table {
            Some(t) => t.eval(x),
            None => f64::NAN,
        }
    }

    /// `∫_x^∞ a` by adaptive quadrature, bypassing the table.
    pub fn tail_exact(&self, x: f64) -> Result<f64> {
        let f = |z: f64| density(z, self.alpha, self.c_alpha);
        if x < 0.0 {
            return Ok(1.0 - self.tail_exact(-x)?);
        }
        if x >= 1e4 {
            return Ok(asymptotic_tail(x, self.alpha, self.c_alpha));
        }
        let tol = Tolerance::new(0.0, 1e-14);
        let head = quad::integrate(f, x, 1e4, tol)?.value;
        Ok(head + asymptotic_tail(1e4, self.alpha, self.c_alpha))
    }

    /// `∫_lo^hi a`, computed from whichever tail is closer to zero to avoid
    /// cancellation.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        if lo >= 0.0 {
            self.tail(lo) - self.tail(hi)
        } else if hi <= 0.0 {
            self.tail(-hi) - self.tail(-lo)
        } else {
            1.0 - self.tail(-lo) - self.tail(hi)
        }
    }

    /// One draw from the continuous kernel.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match (self.sampler, &self.student) {
            (SamplerKind::StudentT, Some(t)) => {
                let nu = 2.0 * self.alpha - 1.0;
                t.sample(rng) / nu.sqrt()
            }
            _ => self.inverse_tail(rng.random::<f64>()),
        }
    }

    /// The `z` with `∫_z^∞ a = u`, for `u ∈ (0, 1)`.
    pub fn inverse_tail(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::INFINITY;
        }
        if u >= 1.0 {
            return f64::NEG_INFINITY;
        }
        if u > 0.5 {
            return -self.inverse_tail(1.0 - u);
        }
        if u == 0.5 {
            return 0.0;
        }
        // Bracket, then safeguarded Newton on tail(z) - u.
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.tail(hi) > u {
            lo = hi;
            hi *= 4.0;
            if !hi.is_finite() {
                return f64::MAX;
            }
        }
        let mut z = 0.5 * (lo + hi);
        for _ in 0..200 {
            let g = self.tail(z) - u;
            if g > 0.0 {
                lo = z;
            } else {
                hi = z;
            }
            let d = -density(z, self.alpha, self.c_alpha);
            let mut next = z - g / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - z).abs() <= 1e-14 * z.abs().max(1e-300) || hi - lo <= 1e-15 * hi {
                return next;
            }
            z = next;
        }
        z
    }
}

/// Lattice bin of a real position: `round(m + ½) = m`, so bin `k` is
/// `(k - ½, k + ½]`.
#[inline]
pub fn round_half_down(x: f64) -> i64 {
    (x - 0.5).ceil() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalisation_known_values() {
        assert!((normalization_constant(1.0).unwrap() - 1.0 / PI).abs() < 1e-12);
        assert!((normalization_constant(1.5).unwrap() - 0.5).abs() < 1e-12);
        assert!((normalization_constant(2.0).unwrap() - 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn normalisation_matches_gamma_ratio() {
        for &a in &[0.55, 0.75, 1.0, 1.25, 2.5, 3.0, 7.0] {
            let q = normalization_constant(a).unwrap();
            let g = normalization_closed_form(a).unwrap();
            assert!((q - g).abs() < 1e-10 * g, "alpha {a}: {q} vs {g}");
        }
    }

    #[test]
    fn alpha_half_is_rejected() {
        assert!(matches!(normalization_constant(0.5), Err(Error::Domain(_))));
        assert!(KernelSpec::continuous(0.3).is_err());
    }

    #[test]
    fn lattice_values_and_mass() {
        assert_eq!(kernel_lattice(0, 2.0), 1.0);
        assert_eq!(kernel_lattice(-1, 2.0), 1.0);
        assert_eq!(kernel_lattice(2, 1.0), 0.25);
        // 3 + 2 (ζ(2α) - 1) with ζ(2) = π²/6 and ζ(6) = π⁶/945.
        let m1 = 3.0 + 2.0 * (PI * PI / 6.0 - 1.0);
        let m3 = 3.0 + 2.0 * (PI.powi(6) / 945.0 - 1.0);
        assert!((lattice_kernel_mass(1.0).unwrap() - m1).abs() < 1e-10);
        assert!((lattice_kernel_mass(3.0).unwrap() - m3).abs() < 1e-10);
    }

    #[test]
    fn power_sum_matches_brute_force() {
        for &p in &[1.2, 2.5, 6.0] {
            let brute: f64 = (3..2_000_000u64).map(|k| (k as f64).powf(-p)).sum();
            let tail = (2_000_000f64).powf(1.0 - p) / (p - 1.0);
            let est = power_sum_from(p, 3);
            assert!((est - brute - tail).abs() < 1e-7 * est, "p {p}");
            let (lo, hi) = power_sum_bounds(p, 3);
            assert!(lo <= est && est <= hi);
        }
    }

    #[test]
    fn tail_known_values() {
        let k = KernelSpec::continuous(1.0).unwrap();
        assert!((k.tail(0.0) - 0.5).abs() < 1e-13);
        assert!((k.tail(1.0) - 0.25).abs() < 1e-12);
        for &x in &[0.003, 0.2, 3.0, 77.0, 5e4, 2e7, 3e9] {
            let exact = (1.0 / x as f64).atan() / PI;
            assert!((k.tail(x) - exact).abs() < 1e-11 * exact, "x {x}");
        }
        assert!((k.tail(-2.0) - (1.0 - k.tail(2.0))).abs() < 1e-15);
    }

    #[test]
    fn table_agrees_with_direct_quadrature() {
        let k = KernelSpec::continuous(1.25).unwrap();
        for &x in &[0.011, 0.5, 1.7, 40.0, 1234.5] {
            let t = k.tail(x);
            let e = k.tail_exact(x).unwrap();
            assert!((t - e).abs() < 1e-10 * e, "x {x}: {t} vs {e}");
        }
    }

    #[test]
    fn sandwich_bounds_hold_on_grid() {
        for &alpha in &[0.75, 1.0, 1.5, 3.0] {
            let c = normalization_constant(alpha).unwrap();
            let lo = c * 4f64.powf(-alpha);
            let hi = c * 2f64.powf(alpha);
            for i in -5000..=5000 {
                let x = i as f64 * 0.01;
                let ad = kernel_lattice(round_half_down(x), alpha);
                let a = density(x, alpha, c);
                assert!(lo * ad <= a * (1.0 + 1e-14), "alpha {alpha} x {x}");
                assert!(a <= hi * ad * (1.0 + 1e-14), "alpha {alpha} x {x}");
            }
        }
    }

    #[test]
    fn rounding_convention() {
        assert_eq!(round_half_down(0.5), 0);
        assert_eq!(round_half_down(0.51), 1);
        assert_eq!(round_half_down(-0.5), -1);
        assert_eq!(round_half_down(-0.49), 0);
        assert_eq!(round_half_down(2.0), 2);
    }

    #[test]
    fn inverse_tail_round_trip() {
        let k = KernelSpec::continuous(1.5).unwrap();
        for &u in &[1e-9, 0.01, 0.3, 0.5, 0.77, 0.999] {
            let z = k.inverse_tail(u);
            assert!((k.tail(z) - u).abs() < 1e-10 * u.min(1.0 - u).max(1e-3), "u {u}");
        }
    }

    fn ks_statistic(kernel: &KernelSpec, draws: &mut [f64]) -> f64 {
        draws.sort_by(f64::total_cmp);
        let n = draws.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &z) in draws.iter().enumerate() {
            let cdf = 1.0 - kernel.tail(z);
            d = d.max((cdf - i as f64 / n).abs()).max(((i + 1) as f64 / n - cdf).abs());
        }
        d
    }

    #[test]
    fn samplers_pass_ks_at_one_percent() {
        for (alpha, sampler) in [
            (1.0, SamplerKind::StudentT),
            (3.0, SamplerKind::StudentT),
            (1.25, SamplerKind::InverseCdf),
        ] {
            let k = KernelSpec::continuous(alpha).unwrap().with_sampler(sampler);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let n = 100_000;
            let mut draws: Vec<f64> = (0..n).map(|_| k.sample(&mut rng)).collect();
            let d = ks_statistic(&k, &mut draws);
            assert!(d < 1.628 / (n as f64).sqrt(), "alpha {alpha} {sampler:?}: D = {d}");
        }
    }

    #[test]
    fn cauchy_central_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 1_000_000;
        let inside = (0..n)
            .filter(|_| sample_displacement(&mut rng, 1.0).unwrap().abs() <= 1.0)
            .count();
        let frac = inside as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.002, "{frac}");
    }
}
