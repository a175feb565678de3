//! `(a * u)(x_i)` on a uniform grid.
//!
//! Cell values are treated as cell averages, so the weight between cells `i`
//! and `j` is the kernel mass of cell `i - j`. The discrete convolution is
//! linear (zero-padded to twice the grid length) and evaluated with an FFT.
//! Plateau closures add the mass that would come from beyond an edge.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::kernel::{KernelSpec, KernelVariant};
use crate::meso::{Closure, GridSpec};
use crate::quad::gauss10;

pub struct Convolver {
    grid: GridSpec,
    /// `w[k]` for `k ≥ 0`; the stencil is symmetric.
    weights: Vec<f64>,
    spectrum: Vec<Complex<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
    /// `∫_{x_i - x_min}^∞ a`, the mass reaching cell `i` from left of the grid.
    left_tail: Vec<f64>,
    /// `∫_{x_max - x_i}^∞ a`.
    right_tail: Vec<f64>,
    /// `|Σ_k w_k + 2 ∫_{(n-½)h}^∞ a - 1|`.
    pub mass_defect: f64,
}

/// Kernel mass of cell `k ≥ 0`, i.e. `∫_{(k-½)h}^{(k+½)h} a` (`k = 0` covers
/// `[-h/2, h/2]`).
pub fn cell_mass(kernel: &KernelSpec, k: usize, h: f64) -> f64 {
    if k == 0 {
        return 1.0 - 2.0 * kernel.tail(0.5 * h);
    }
    let lo = (k as f64 - 0.5) * h;
    let hi = lo + h;
    if lo >= 8.0 * h.max(1.0) {
        gauss10(&|z| kernel.eval(z), lo, hi)
    } else {
        kernel.tail(lo) - kernel.tail(hi)
    }
}

impl Convolver {
    /// Precomputes weights and their transform. Fails if the discrete kernel
    /// mass is inconsistent with the tail beyond the stencil by more than
    /// `mass_tol`.
    pub fn new(kernel: &KernelSpec, grid: &GridSpec, mass_tol: f64) -> Result<Convolver> {
        grid.validate()?;
        if kernel.variant != KernelVariant::Continuous {
            return Err(Error::Config("the grid solver needs the continuous kernel".into()));
        }
        let n = grid.n_cells;
        let h = grid.h();
        let weights: Vec<f64> = (0..n).map(|k| cell_mass(kernel, k, h)).collect();
        let total = weights[0] + 2.0 * weights[1..].iter().rev().sum::<f64>();
        let mass_defect = (total + 2.0 * kernel.tail((n as f64 - 0.5) * h) - 1.0).abs();
        if mass_defect > mass_tol {
            return Err(Error::Config(format!(
                "kernel stencil mass defect {mass_defect:e} exceeds {mass_tol:e}; refine the grid"
            )));
        }
        let len = 2 * n;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut spectrum = vec![Complex::new(0.0, 0.0); len];
        spectrum[0].re = weights[0];
        for k in 1..n {
            spectrum[k].re = weights[k];
            spectrum[len - k].re = weights[k];
        }
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        let mut scratch = vec![Complex::new(0.0, 0.0); scratch_len];
        forward.process_with_scratch(&mut spectrum, &mut scratch);
        let scale = 1.0 / len as f64;
        for c in &mut spectrum {
            *c *= scale;
        }
        let left_tail = (0..n).map(|i| kernel.tail((i as f64 + 0.5) * h)).collect();
        let right_tail = (0..n).map(|i| kernel.tail((n - i) as f64 * h - 0.5 * h)).collect();
        Ok(Convolver {
            grid: grid.clone(),
            weights,
            spectrum,
            forward,
            inverse,
            buf: vec![Complex::new(0.0, 0.0); len],
            scratch,
            left_tail,
            right_tail,
            mass_defect,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Writes `(a * u)(x_i)` into `out`.
    pub fn apply(&mut self, u: &[f64], out: &mut [f64]) {
        let n = self.grid.n_cells;
        debug_assert_eq!(u.len(), n);
        for (b, &v) in self.buf.iter_mut().zip(u) {
            *b = Complex::new(v, 0.0);
        }
        for b in &mut self.buf[n..] {
            *b = Complex::new(0.0, 0.0);
        }
        self.forward.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (b, s) in self.buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        self.inverse.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (o, b) in out.iter_mut().zip(&self.buf) {
            *o = b.re;
        }
        if self.grid.left == Closure::Plateau {
            let p = u[0];
            for (o, t) in out.iter_mut().zip(&self.left_tail) {
                *o += p * t;
            }
        }
        if self.grid.right == Closure::Plateau {
            let p = u[n - 1];
            for (o, t) in out.iter_mut().zip(&self.right_tail) {
                *o += p * t;
            }
        }
    }

    /// Direct `O(n²)` evaluation, for testing the transform.
    pub fn apply_direct(&self, u: &[f64], out: &mut [f64]) {
        let n = self.grid.n_cells;
        for i in 0..n {
            let mut s = 0.0;
            for (j, &v) in u.iter().enumerate() {
                s += self.weights[i.abs_diff(j)] * v;
            }
            if self.grid.left == Closure::Plateau {
                s += u[0] * self.left_tail[i];
            }
            if self.grid.right == Closure::Plateau {
                s += u[n - 1] * self.right_tail[i];
            }
            out[i] = s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Tolerance;
    use proptest::prelude::*;

    #[test]
    fn plateau_constant_is_fixed() {
        let k = KernelSpec::continuous(1.0).unwrap();
        let g = GridSpec::new(-100.0, 100.0, 1024)
            .unwrap()
            .with_closures(Closure::Plateau, Closure::Plateau);
        let mut c = Convolver::new(&k, &g, 1e-9).unwrap();
        let u = vec![1.0; 1024];
        let mut out = vec![0.0; 1024];
        c.apply(&u, &mut out);
        let err = out.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn single_cell_returns_weights() {
        let k = KernelSpec::continuous(1.5).unwrap();
        let g = GridSpec::new(-8.0, 8.0, 256).unwrap();
        let mut c = Convolver::new(&k, &g, 1e-9).unwrap();
        let mut u = vec![0.0; 256];
        u[128] = 1.0;
        let mut out = vec![0.0; 256];
        c.apply(&u, &mut out);
        for i in 0..256 {
            assert!((out[i] - c.weights()[i.abs_diff(128)]).abs() < 1e-15);
        }
        // The weights telescope to the kernel mass over the grid's reach.
        let h = g.h();
        let total: f64 = out.iter().sum();
        let exact = k.mass_between(-128.5 * h, 127.5 * h);
        assert!((total - exact).abs() < 1e-12, "{total} vs {exact}");
    }

    #[test]
    fn kernel_self_convolution_matches_quadrature() {
        let k = KernelSpec::continuous(1.0).unwrap();
        let n = 1 << 17;
        let (lo, hi) = (-128.0, 128.0);
        let g = GridSpec::new(lo, hi, n).unwrap();
        let mut c = Convolver::new(&k, &g, 1e-9).unwrap();
        let u: Vec<f64> = g.xs().iter().map(|&x| k.eval(x)).collect();
        let mut out = vec![0.0; n];
        c.apply(&u, &mut out);
        let probes = [0, 7, 60, 500, 2500, 9000, 20000, 40000, -30000, -64000];
        for &p in &probes {
            let i = (n as i64 / 2 + p) as usize;
            let x = g.x(i);
            let pts = crate::quad::breakpoints(vec![lo, 0.0, x, hi]);
            let exact = crate::quad::integrate_points(|y| k.eval(x - y) * k.eval(y), &pts, Tolerance::default())
                .unwrap()
                .value;
            assert!((out[i] - exact).abs() < 1e-6, "x {x}: {} vs {exact}", out[i]);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn transform_matches_direct_sum(vals in prop::collection::vec(0.0f64..2.0, 64), plateau in any::<bool>()) {
            let k = KernelSpec::continuous(1.25).unwrap();
            let cl = if plateau { Closure::Plateau } else { Closure::Zero };
            let g = GridSpec::new(-10.0, 10.0, 64).unwrap().with_closures(cl, Closure::Zero);
            let mut c = Convolver::new(&k, &g, 1e-9).unwrap();
            let mut a = vec![0.0; 64];
            let mut b = vec![0.0; 64];
            c.apply(&vals, &mut a);
            c.apply_direct(&vals, &mut b);
            for i in 0..64 {
                prop_assert!((a[i] - b[i]).abs() < 1e-13);
            }
        }
    }
}
