//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 21-point Kronrod rule with an embedded 10-point Gauss rule drives a global
//! adaptive bisection: the interval with the largest error estimate is split
//! until the summed estimate meets the requested tolerance. Semi-infinite
//! ranges are mapped onto `[0, 1)` with `z = a + s / (1 - s)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_059_5,
    0.865_063_366_688_984_510_732_096_688_423_5,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_114_9,
    0.562_757_134_668_604_683_339_000_099_272_7,
    0.433_395_394_129_247_190_799_265_943_165_8,
    0.294_392_862_701_460_198_131_126_603_103_9,
    0.148_874_338_981_631_210_884_826_001_129_7,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_19,
    0.032_558_162_307_964_727_478_818_972_459_39,
    0.054_755_896_574_351_996_031_381_300_244_58,
    0.075_039_674_810_919_952_767_043_140_916_19,
    0.093_125_454_583_697_605_535_065_465_083_37,
    0.109_387_158_802_297_641_899_210_590_325_8,
    0.123_491_976_262_065_851_077_600_525_478,
    0.134_709_217_311_473_325_928_054_001_771_7,
    0.142_775_938_577_060_080_797_094_273_138_7,
    0.147_739_104_901_338_491_374_841_515_972_1,
    0.149_445_554_002_916_905_664_936_468_389_8,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_33,
    0.149_451_349_150_580_593_145_776_339_657_7,
    0.219_086_362_515_982_043_995_534_934_228_2,
    0.269_266_719_309_996_355_091_226_921_569_5,
    0.295_524_224_714_752_870_173_892_994_651_3,
];

/// Requested accuracy: stop once `error <= max(abs, rel * |value|)`.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-13,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

/// One 21-point Kronrod panel on `[a, b]`, returning the value and the
/// Kronrod–Gauss difference as an error estimate.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[10] * fc;
    let mut gauss = 0.0;
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).abs())
}

/// Ten-point Gauss–Legendre rule on `[a, b]`, for integrands known to be smooth
/// on the panel.
pub fn gauss10<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..5 {
        let dx = h * XGK[2 * i + 1];
        s += WG[i] * (f(c - dx) + f(c + dx));
    }
    s * h
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrates `f` over a finite range split at the sorted `points`.
///
/// Interior breakpoints let the caller mark kinks and peaks so the adaptive
/// refinement does not have to discover them.
pub fn integrate_points<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::Quadrature("need at least two breakpoints".into()));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::Quadrature("breakpoints must be finite".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut err = 0.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b < a {
            return Err(Error::Quadrature("breakpoints must be sorted".into()));
        }
        if b == a {
            continue;
        }
        let (v, e) = gk21(&f, a, b);
        value += v;
        err += e;
        heap.push(Panel { a, b, value: v, err: e });
    }
    let mut intervals = heap.len();
    loop {
        if !value.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand sum {value}")));
        }
        if err <= tol.abs.max(tol.rel * value.abs()) {
            break;
        }
        if intervals >= tol.max_intervals {
            return Err(Error::Quadrature(format!(
                "no convergence after {intervals} intervals: value {value:e}, error {err:e}"
            )));
        }
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // Interval collapsed to adjacent floats; accept what we have.
            heap.push(Panel { err: 0.0, ..p });
            err = heap.iter().map(|q| q.err).sum();
            continue;
        }
        let (v1, e1) = gk21(&f, p.a, m);
        let (v2, e2) = gk21(&f, m, p.b);
        value += v1 + v2 - p.value;
        err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, value: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, err: e2 });
        intervals += 1;
        // Resum periodically so cancellation in the running totals cannot drift.
        if intervals % 64 == 0 {
            value = heap.iter().map(|q| q.value).sum();
            err = heap.iter().map(|q| q.err).sum();
        }
    }
    let value = heap.iter().map(|q| q.value).sum();
    let abs_error = heap.iter().map(|q| q.err).sum();
    Ok(QuadResult {
        value,
        abs_error,
        intervals,
    })
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if a <= b {
        integrate_points(f, &[a, b], tol)
    } else {
        integrate_points(f, &[b, a], tol).map(|r| QuadResult {
            value: -r.value,
            ..r
        })
    }
}

/// `∫_a^∞ f`.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<QuadResult> {
    let g = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - s;
        let z = a + s / one_minus;
        let v = f(z) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_points(g, &[0.0, 1.0], tol)
}

/// `∫_{-∞}^b f`.
pub fn integrate_from_neg_inf<F: Fn(f64) -> f64>(f: F, b: f64, tol: Tolerance) -> Result<QuadResult> {
    integrate_to_inf(|z| f(-z), -b, tol)
}

/// `∫_ℝ f`, with the sorted finite `points` as breakpoints.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> Result<QuadResult> {
    if points.is_empty() {
        return integrate_line(f, &[0.0], tol);
    }
    let lo = points[0];
    let hi = points[points.len() - 1];
    let left = integrate_from_neg_inf(&f, lo, tol)?;
    let right = integrate_to_inf(&f, hi, tol)?;
    let mid = if points.len() >= 2 {
        integrate_points(&f, points, tol)?
    } else {
        QuadResult {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        }
    };
    Ok(QuadResult {
        value: left.value + mid.value + right.value,
        abs_error: left.abs_error + mid.abs_error + right.abs_error,
        intervals: left.intervals + mid.intervals + right.intervals,
    })
}

/// Sorted, deduplicated breakpoints from an unordered list.
pub fn breakpoints(mut pts: Vec<f64>) -> Vec<f64> {
    pts.retain(|p| p.is_finite());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0, Tolerance::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0) + 3.0;
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = integrate(|x| x.exp(), 1.0, 0.0, Tolerance::default()).unwrap();
        assert!((r.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn semi_infinite_cauchy_tail() {
        let r = integrate_to_inf(|x| 1.0 / (1.0 + x * x), 1.0, Tolerance::default()).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_4).abs() < 1e-11);
    }

    #[test]
    fn whole_line_gaussian() {
        let r = integrate_line(|x| (-x * x).exp(), &[-1.0, 0.0, 1.0], Tolerance::default()).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn kink_at_breakpoint() {
        let r = integrate_points(|x: f64| x.abs().sqrt(), &[-1.0, 0.0, 4.0], Tolerance::default()).unwrap();
        let exact = 2.0 / 3.0 + 2.0 / 3.0 * 8.0;
        assert!((r.value - exact).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn non_finite_breakpoint_rejected() {
        assert!(integrate_points(|x| x, &[0.0, f64::INFINITY], Tolerance::default()).is_err());
    }
}
