//! Time stepping for `∂t u = min{a * u, 1}`.
//!
//! Heun's predictor-corrector is the production integrator. A Picard
//! iteration of the integral form on short blocks serves as an independent
//! cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::meso::{Convolver, GridSpec, MesoField};

pub struct MesoSolver {
    conv: Convolver,
    k1: Vec<f64>,
    k2: Vec<f64>,
    stage: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PicardOptions {
    /// Block length; contraction needs `block < 1`.
    pub block: f64,
    /// Trapezoid panels per block.
    pub inner_steps: usize,
    /// Sup-norm distance between successive iterates that ends a block.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            block: 0.5,
            inner_steps: 100,
            tol: 1e-10,
            max_iterations: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    /// Iterations used in each block.
    pub iterations: Vec<usize>,
    /// Final successive-iterate distance in each block.
    pub residuals: Vec<f64>,
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

impl MesoSolver {
    pub fn new(kernel: &KernelSpec, grid: &GridSpec, mass_tol: f64) -> Result<MesoSolver> {
        let conv = Convolver::new(kernel, grid, mass_tol)?;
        let n = grid.n_cells;
        Ok(MesoSolver {
            conv,
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            stage: vec![0.0; n],
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.conv.grid()
    }

    pub fn convolver_mut(&mut self) -> &mut Convolver {
        &mut self.conv
    }

    /// `min(1, a * u)`, floored at zero so transform round-off cannot make
    /// the right-hand side negative.
    pub fn rhs(&mut self, u: &[f64], out: &mut [f64]) {
        self.conv.apply(u, out);
        for v in out.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
    }

    /// One Heun step. On error the field is left at its previous state.
    pub fn step(&mut self, field: &mut MesoField, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt <= 0.5) {
            return Err(Error::Config(format!("time step must lie in (0, 0.5], got {dt}")));
        }
        let mut k1 = std::mem::take(&mut self.k1);
        let mut k2 = std::mem::take(&mut self.k2);
        let mut stage = std::mem::take(&mut self.stage);
        self.rhs(&field.u, &mut k1);
        for ((s, &u), &k) in stage.iter_mut().zip(&field.u).zip(&k1) {
            *s = u + dt * k;
        }
        self.rhs(&stage, &mut k2);
        let mut bad = None;
        for (i, s) in stage.iter_mut().enumerate() {
            *s = field.u[i] + 0.5 * dt * (k1[i] + k2[i]);
            if !(s.is_finite() && *s >= 0.0) && bad.is_none() {
                bad = Some((i, *s));
            }
        }
        let result = match bad {
            Some((i, v)) => Err(Error::Numerical {
                t: field.t,
                reason: format!("value {v} at x = {}", field.grid.x(i)),
            }),
            None => {
                std::mem::swap(&mut field.u, &mut stage);
                field.t += dt;
                Ok(())
            }
        };
        self.k1 = k1;
        self.k2 = k2;
        self.stage = stage;
        result
    }

    /// Advances `field` by `horizon` in equal steps no longer than `dt`,
    /// calling `observe` on the initial field, every `frame_interval`, and at
    /// the end.
    pub fn solve(
        &mut self,
        field: &mut MesoField,
        horizon: f64,
        dt: f64,
        frame_interval: f64,
        mut observe: impl FnMut(&MesoField),
    ) -> Result<()> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::Config("horizon must be finite and >= 0".into()));
        }
        observe(field);
        if horizon == 0.0 {
            return Ok(());
        }
        let n_steps = (horizon / dt - 1e-9).ceil().max(1.0) as usize;
        let h = horizon / n_steps as f64;
        let per_frame = ((frame_interval / h).round() as usize).max(1);
        let t0 = field.t;
        for k in 1..=n_steps {
            self.step(field, h)?;
            // Avoid drift from repeated addition.
            field.t = t0 + k as f64 * h;
            if k % per_frame == 0 || k == n_steps {
                observe(field);
            }
        }
        Ok(())
    }

    /// Solves on `[t, t + horizon]` by Picard iteration of
    /// `v ↦ w + ∫ min(1, a * v) ds`, block by block.
    pub fn picard(&mut self, field: &MesoField, horizon: f64, opts: &PicardOptions) -> Result<(MesoField, PicardReport)> {
        if !(opts.block > 0.0 && opts.block < 1.0) {
            return Err(Error::Config(format!("Picard block must lie in (0, 1), got {}", opts.block)));
        }
        if opts.inner_steps == 0 {
            return Err(Error::Config("Picard needs at least one inner step".into()));
        }
        let n = field.u.len();
        let mut out = field.clone();
        let mut report = PicardReport {
            iterations: Vec::new(),
            residuals: Vec::new(),
        };
        let n_blocks = (horizon / opts.block - 1e-9).ceil().max(0.0) as usize;
        let m = opts.inner_steps;
        let mut rates = vec![vec![0.0; n]; m + 1];
        let mut next = vec![vec![0.0; n]; m + 1];
        for b in 0..n_blocks {
            let len = (horizon - b as f64 * opts.block).min(opts.block);
            let ds = len / m as f64;
            let w = out.u.clone();
            // Start from the constant path v(s) = w.
            let mut path = vec![w.clone(); m + 1];
            let mut prev = f64::INFINITY;
            let mut iters = 0;
            let mut dist;
            loop {
                iters += 1;
                for (j, v) in path.iter().enumerate() {
                    let mut r = std::mem::take(&mut rates[j]);
                    self.rhs(v, &mut r);
                    rates[j] = r;
                }
                next[0].copy_from_slice(&w);
                for j in 1..=m {
                    let (done, todo) = next.split_at_mut(j);
                    let (lo, hi) = (&rates[j - 1], &rates[j]);
                    for i in 0..n {
                        todo[0][i] = done[j - 1][i] + 0.5 * ds * (lo[i] + hi[i]);
                    }
                }
                dist = path.iter().zip(&next).map(|(a, b)| sup_dist(a, b)).fold(0.0, f64::max);
                std::mem::swap(&mut path, &mut next);
                if !dist.is_finite() {
                    return Err(Error::Numerical {
                        t: out.t,
                        reason: "Picard iterate is not finite".into(),
                    });
                }
                if dist < opts.tol {
                    break;
                }
                if iters >= 2 && dist > prev {
                    return Err(Error::Config(format!(
                        "Picard iterates are not contracting (distance {dist:e} after {prev:e}); shorten the block"
                    )));
                }
                if iters >= opts.max_iterations {
                    return Err(Error::Config(format!(
                        "Picard did not reach {:e} in {iters} iterations (distance {dist:e})",
                        opts.tol
                    )));
                }
                prev = dist;
            }
            out.u.copy_from_slice(&path[m]);
            out.t += len;
            report.iterations.push(iters);
            report.residuals.push(dist);
        }
        Ok((out, report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meso::{Closure, InitialCondition};

    fn kernel() -> KernelSpec {
        KernelSpec::continuous(1.0).unwrap()
    }

    fn plateau_grid(n: usize) -> GridSpec {
        GridSpec::new(-50.0, 50.0, n)
            .unwrap()
            .with_closures(Closure::Plateau, Closure::Plateau)
    }

    fn smooth_field(grid: GridSpec) -> MesoField {
        let init = InitialCondition::Gaussian {
            amplitude: 0.3,
            center: 0.0,
            width: 3.0,
        };
        MesoField::from_initial(grid, &init, &kernel()).unwrap()
    }

    #[test]
    fn saturated_plateau_grows_linearly() {
        let g = plateau_grid(256);
        let mut s = MesoSolver::new(&kernel(), &g, 1e-6).unwrap();
        let mut f = MesoField::from_fn(g, |_| 1.0).unwrap();
        s.step(&mut f, 0.1).unwrap();
        assert!(f.u.iter().all(|&v| (v - 1.1).abs() < 1e-12));
        assert!((f.t - 0.1).abs() < 1e-15);
    }

    #[test]
    fn zero_stays_zero() {
        let g = GridSpec::new(-10.0, 10.0, 128).unwrap();
        let mut s = MesoSolver::new(&kernel(), &g, 1e-1).unwrap();
        let mut f = MesoField::from_fn(g, |_| 0.0).unwrap();
        s.solve(&mut f, 2.0, 0.1, 1.0, |_| {}).unwrap();
        assert!(f.u.iter().all(|&v| v == 0.0));
        assert!((f.t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn step_size_is_validated() {
        let g = GridSpec::new(-10.0, 10.0, 128).unwrap();
        let mut s = MesoSolver::new(&kernel(), &g, 1e-1).unwrap();
        let mut f = MesoField::from_fn(g, |_| 0.0).unwrap();
        assert!(s.step(&mut f, 0.6).is_err());
        assert!(s.step(&mut f, 0.0).is_err());
    }

    #[test]
    fn heun_converges_at_second_order() {
        let g = plateau_grid(1024);
        let mut s = MesoSolver::new(&kernel(), &g, 1e-6).unwrap();
        let run = |s: &mut MesoSolver, dt: f64| {
            let mut f = smooth_field(g.clone());
            s.solve(&mut f, 1.0, dt, 1.0, |_| {}).unwrap();
            f.u
        };
        let reference = run(&mut s, 0.1 / 8.0);
        let e1 = sup_dist(&run(&mut s, 0.1), &reference);
        let e2 = sup_dist(&run(&mut s, 0.05), &reference);
        let ratio = e1 / e2;
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio} ({e1:e}, {e2:e})");
    }

    #[test]
    fn frames_are_observed_on_cadence() {
        let g = plateau_grid(128);
        let mut s = MesoSolver::new(&kernel(), &g, 1e-6).unwrap();
        let mut f = smooth_field(g);
        let mut times = Vec::new();
        s.solve(&mut f, 1.0, 0.05, 0.25, |fr| times.push(fr.t)).unwrap();
        let expected = [0.0, 0.25, 0.5, 0.75, 1.0];
        assert_eq!(times.len(), expected.len());
        for (a, b) in times.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn picard_trivial_fixed_points() {
        let g = plateau_grid(128);
        let mut s = MesoSolver::new(&kernel(), &g, 1e-6).unwrap();
        let zero = MesoField::from_fn(g.clone(), |_| 0.0).unwrap();
        let (out, rep) = s.picard(&zero, 0.5, &PicardOptions::default()).unwrap();
        assert_eq!(rep.iterations, vec![1]);
        assert!(out.u.iter().all(|&v| v == 0.0));

        let one = MesoField::from_fn(g, |_| 1.0).unwrap();
        let (out, rep) = s.picard(&one, 0.5, &PicardOptions::default()).unwrap();
        assert!(rep.iterations[0] <= 2, "{:?}", rep.iterations);
        assert!(out.u.iter().all(|&v| (v - 1.5).abs() < 1e-10));
    }

    #[test]
    fn picard_agrees_with_heun() {
        let g = plateau_grid(512);
        let mut s = MesoSolver::new(&kernel(), &g, 1e-6).unwrap();
        let f0 = smooth_field(g);
        let (p, _) = s.picard(&f0, 0.5, &PicardOptions::default()).unwrap();
        let mut h = f0.clone();
        s.solve(&mut h, 0.5, 1e-3, 0.5, |_| {}).unwrap();
        let gap = sup_dist(&p.u, &h.u);
        assert!(gap < 1e-4, "{gap:e}");
    }

    #[test]
    fn picard_rejects_long_blocks() {
        let g = plateau_grid(64);
        let mut s = MesoSolver::new(&kernel(), &g, 1e-6).unwrap();
        let f0 = smooth_field(g);
        let opts = PicardOptions {
            block: 1.5,
            ..Default::default()
        };
        assert!(s.picard(&f0, 0.5, &opts).is_err());
    }
}
