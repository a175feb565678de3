//! Birth process on `ℝ` with rate `b(x) = 1 ∧ Σ_y η(y) a(x - y)`.
//!
//! Simulated by thinning: proposals arrive at rate `n`, each choosing a
//! uniform parent and a displacement from `a`, so a site receives proposals
//! with intensity `S(x)`. A proposal is kept with probability
//! `min(1, S) / S = min(1, 1 / S)`. The sum `S` is accumulated outward from the
//! proposed point in order of distance, bracketing it between the partial sum
//! and the partial sum plus `remaining · a(next distance)`, and stops as soon
//! as the bracket decides the uniform mark.

use std::collections::BTreeMap;
use std::ops::Bound;

use ordered_float::OrderedFloat;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, Error, Result};
use crate::kernel::{round_half_down, KernelSpec, KernelVariant};
use crate::rng::stream;
use crate::trajectory::{Cadence, PositionKind, StopReason, TipSample, TipTrajectory};

/// Site `k` receives the positions in `(k - ½, k + ½]`. Returns occupied
/// sites in increasing order.
pub fn discretize(positions: &[f64]) -> Vec<(i64, u64)> {
    let mut bins = BTreeMap::new();
    for &x in positions {
        *bins.entry(round_half_down(x)).or_insert(0u64) += 1;
    }
    bins.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuumEvent {
    pub t: f64,
    pub x: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct PointState {
    kernel: KernelSpec,
    sorted: BTreeMap<OrderedFloat<f64>, u32>,
    positions: Vec<f64>,
    pub time: f64,
    /// Particles visited by the lazy intensity sums, for diagnostics.
    pub visits: u64,
}

impl PointState {
    pub fn new(kernel: KernelSpec, initial: &[f64]) -> Result<Self> {
        if kernel.variant != KernelVariant::Continuous {
            return Err(Error::Config("the continuum process needs the continuous kernel".into()));
        }
        if initial.is_empty() {
            return Err(Error::Domain("initial configuration must be non-empty".into()));
        }
        let mut s = PointState {
            kernel,
            sorted: BTreeMap::new(),
            positions: Vec::with_capacity(initial.len()),
            time: 0.0,
            visits: 0,
        };
        for &x in initial {
            if !x.is_finite() {
                return Err(Error::Domain("positions must be finite".into()));
            }
            s.insert(x);
        }
        Ok(s)
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn n_particles(&self) -> u64 {
        self.positions.len() as u64
    }

    pub fn left_tip(&self) -> f64 {
        self.sorted.keys().next().map_or(f64::NAN, |k| k.0)
    }

    pub fn right_tip(&self) -> f64 {
        self.sorted.keys().next_back().map_or(f64::NAN, |k| k.0)
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    fn insert(&mut self, x: f64) {
        *self.sorted.entry(OrderedFloat(x)).or_insert(0) += 1;
        self.positions.push(x);
    }

    /// `S(x)` summed over every particle.
    pub fn intensity(&self, x: f64) -> f64 {
        self.sorted.iter().map(|(y, &c)| c as f64 * self.kernel.eval(x - y.0)).sum()
    }

    /// Occupation rounded to the lattice: `(site, count)` in increasing order.
    pub fn discretize(&self) -> Vec<(i64, u64)> {
        let mut out: Vec<(i64, u64)> = Vec::new();
        for (y, &c) in &self.sorted {
            let k = round_half_down(y.0);
            match out.last_mut() {
                Some((site, n)) if *site == k => *n += c as u64,
                _ => out.push((k, c as u64)),
            }
        }
        out
    }

    /// Number of particles at positions `≤ x`.
    pub fn count_at_or_below(&self, x: f64) -> u64 {
        self.sorted
            .range(..=OrderedFloat(x))
            .map(|(_, &c)| c as u64)
            .sum()
    }

    /// Decides `u < min(1, 1 / S(x))` while summing as few terms as possible.
    fn accept(&mut self, x: f64, u: f64) -> bool {
        let n = self.positions.len() as f64;
        let a = |d: f64| self.kernel.eval(d);
        let mut left = self
            .sorted
            .range((Bound::Unbounded, Bound::Excluded(OrderedFloat(x))))
            .rev()
            .peekable();
        let mut right = self.sorted.range(OrderedFloat(x)..).peekable();
        let mut s_lo = 0.0;
        let mut seen = 0.0;
        let mut visits = 0;
        let decision = loop {
            let dl = left.peek().map(|(y, _)| x - y.0);
            let dr = right.peek().map(|(y, _)| y.0 - x);
            let next = match (dl, dr) {
                (Some(l), Some(r)) => l.min(r),
                (Some(l), None) => l,
                (None, Some(r)) => r,
                (None, None) => break u * s_lo < 1.0,
            };
            let s_hi = s_lo + (n - seen) * a(next);
            if u * s_hi < 1.0 {
                break true;
            }
            if u * s_lo >= 1.0 {
                break false;
            }
            let take_left = match (dl, dr) {
                (Some(l), Some(r)) => l < r,
                (Some(_), None) => true,
                _ => false,
            };
            let (y, c) = if take_left {
                left.next().unwrap()
            } else {
                right.next().unwrap()
            };
            let c = *c as f64;
            s_lo += c * a(x - y.0);
            seen += c;
            visits += 1;
        };
        self.visits += visits;
        decision
    }

    /// Draws one proposal epoch: advances time and possibly adds a particle.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> ContinuumEvent {
        let e: f64 = Exp1.sample(rng);
        self.time += e / self.positions.len() as f64;
        let parent = self.positions[rng.random_range(0..self.positions.len())];
        let x = parent + self.kernel.sample(rng);
        let u: f64 = rng.random();
        let accepted = x.is_finite() && self.accept(x, u);
        if accepted {
            self.insert(x);
        }
        ContinuumEvent {
            t: self.time,
            x,
            accepted,
        }
    }

    /// Time of the next proposal without applying it.
    fn next_time<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = Exp1.sample(rng);
        self.time + e / self.positions.len() as f64
    }

    /// Applies a proposal at the already drawn time `t`.
    fn propose_at<R: Rng + ?Sized>(&mut self, t: f64, rng: &mut R) -> bool {
        self.time = t;
        let parent = self.positions[rng.random_range(0..self.positions.len())];
        let x = parent + self.kernel.sample(rng);
        let u: f64 = rng.random();
        let accepted = x.is_finite() && self.accept(x, u);
        if accepted {
            self.insert(x);
        }
        accepted
    }

    /// Runs until `t_end`, stopping just before the first proposal after it.
    pub fn advance_to<R: Rng + ?Sized>(&mut self, t_end: f64, rng: &mut R) {
        loop {
            let t = self.next_time(rng);
            if t > t_end {
                self.time = t_end;
                return;
            }
            self.propose_at(t, rng);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContinuumSimConfig {
    pub alpha: f64,
    pub horizon: f64,
    pub sample_interval: f64,
    /// Stop after this many accepted births.
    pub event_budget: Option<u64>,
}

impl Default for ContinuumSimConfig {
    fn default() -> Self {
        ContinuumSimConfig {
            alpha: 3.0,
            horizon: 50.0,
            sample_interval: 0.5,
            event_budget: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuumRun {
    pub seed: u64,
    pub trajectory: TipTrajectory,
}

/// Runs the continuum process from one particle at the origin.
pub fn simulate_continuum(cfg: &ContinuumSimConfig, seed: u64) -> Result<ContinuumRun> {
    check_alpha(cfg.alpha)?;
    if !(cfg.horizon >= 0.0 && cfg.horizon.is_finite() && cfg.sample_interval > 0.0) {
        return Err(Error::Config("horizon must be finite and >= 0, sample_interval > 0".into()));
    }
    let kernel = KernelSpec::continuous(cfg.alpha)?;
    let mut st = PointState::new(kernel, &[0.0])?;
    let mut rng = stream(seed);
    let mut traj = TipTrajectory::new(PositionKind::Continuum);
    let mut cad = Cadence::new(cfg.sample_interval, cfg.horizon);
    let births0 = st.n_particles();
    loop {
        let t = st.next_time(&mut rng);
        cad.drain_before(t, |s| {
            traj.samples.push(TipSample {
                t: s,
                left_tip: st.left_tip(),
                right_tip: st.right_tip(),
                n_particles: st.n_particles(),
                q_estimate: None,
            })
        });
        if cad.peek().is_none() {
            traj.stop = StopReason::Horizon;
            break;
        }
        if cfg.event_budget.is_some_and(|b| st.n_particles() - births0 >= b) {
            traj.stop = StopReason::EventBudget;
            break;
        }
        traj.proposals += 1;
        st.propose_at(t, &mut rng);
    }
    traj.births = st.n_particles() - births0;
    Ok(ContinuumRun { seed, trajectory: traj })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(alpha: f64, xs: &[f64]) -> PointState {
        PointState::new(KernelSpec::continuous(alpha).unwrap(), xs).unwrap()
    }

    #[test]
    fn lazy_decision_matches_full_sum() {
        let mut rng = stream(17);
        let xs: Vec<f64> = (0..300).map(|_| rng.random_range(-20.0..20.0)).collect();
        let mut s = state(1.5, &xs);
        for _ in 0..2000 {
            let x: f64 = rng.random_range(-40.0..40.0);
            let u: f64 = rng.random();
            let exact = u < (1.0 / s.intensity(x)).min(1.0);
            assert_eq!(s.accept(x, u), exact, "x {x} u {u}");
        }
    }

    #[test]
    fn duplicate_positions_are_counted() {
        let s = state(2.0, &[0.0, 0.0, 1.0]);
        let k = KernelSpec::continuous(2.0).unwrap();
        let expected = 2.0 * k.eval(0.3) + k.eval(0.7);
        assert!((s.intensity(0.3) - expected).abs() < 1e-15);
        assert_eq!(s.discretize(), vec![(0, 2), (1, 1)]);
    }

    #[test]
    fn isolated_particle_always_accepts() {
        // A single particle has S(x) = a(z) ≤ c_α < 1, so every proposal is kept.
        let mut s = state(3.0, &[0.0]);
        let mut rng = stream(2);
        let ev = s.step(&mut rng);
        assert!(ev.accepted);
        assert_eq!(s.n_particles(), 2);
    }

    #[test]
    fn trajectory_is_reproducible_and_monotone() {
        let cfg = ContinuumSimConfig {
            alpha: 2.0,
            horizon: 8.0,
            ..Default::default()
        };
        let a = simulate_continuum(&cfg, 5).unwrap();
        let b = simulate_continuum(&cfg, 5).unwrap();
        assert_eq!(a, b);
        for w in a.trajectory.samples.windows(2) {
            assert!(w[1].left_tip <= w[0].left_tip && w[1].right_tip >= w[0].right_tip);
        }
        assert_eq!(a.trajectory.last().unwrap().t, 8.0);
    }

    #[test]
    fn wrong_kernel_variant_rejected() {
        assert!(PointState::new(KernelSpec::lattice(2.0).unwrap(), &[0.0]).is_err());
    }

    #[test]
    fn discretize_uses_half_open_bins() {
        assert_eq!(discretize(&[0.4, 0.6, -0.5]), vec![(-1, 1), (0, 1), (1, 1)]);
        assert_eq!(discretize(&[0.5, -1.5, -1.4999]), vec![(-2, 1), (-1, 1), (0, 1)]);
        assert!(discretize(&[]).is_empty());
    }

    #[test]
    fn discretize_preserves_count_along_a_run() {
        let mut s = state(2.0, &[0.0]);
        let mut rng = stream(8);
        for t in [1.0, 2.0, 4.0, 6.0] {
            s.advance_to(t, &mut rng);
            let bins = s.discretize();
            assert_eq!(bins.iter().map(|b| b.1).sum::<u64>(), s.n_particles());
            assert_eq!(bins, discretize(s.positions()));
            assert!(bins.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn stacked_particles_accept_with_ratio() {
        // n particles at 0 give S(0) = n c_α, so a proposal at 0 is kept iff u < 1 / (n c_α).
        let k = KernelSpec::continuous(1.5).unwrap();
        for n in [1usize, 2, 5, 40] {
            let mut s = state(1.5, &vec![0.0; n]);
            let p = (n as f64 * k.c_alpha).min(1.0) / (n as f64 * k.c_alpha);
            assert!(p > 0.0 && p <= 1.0);
            if p < 1.0 {
                assert!(s.accept(0.0, p * (1.0 - 1e-9)));
                assert!(!s.accept(0.0, p * (1.0 + 1e-9)));
            } else {
                assert!(s.accept(0.0, 1.0 - 1e-12));
            }
        }
    }

    fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        samples.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
            let f = cdf(x);
            d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
    }

    /// Accepted proposals from one frozen parent at 0.
    fn frozen_parent_draws(alpha: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut s = state(alpha, &[0.0]);
        let mut rng = stream(seed);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let x = s.kernel.sample(&mut rng);
            let u: f64 = rng.random();
            if s.accept(x, u) {
                out.push(x);
            }
        }
        out
    }

    #[test]
    fn frozen_parent_thinning_matches_kernel() {
        // c_α < 1 here, so every proposal is kept and the law is a itself.
        let n = 100_000;
        let k = KernelSpec::continuous(1.5).unwrap();
        let mut xs = frozen_parent_draws(1.5, n, 31);
        let d = ks_distance(&mut xs, |x| 1.0 - k.tail(x));
        assert!(d < 1.628 / (n as f64).sqrt(), "D = {d}");
    }

    #[test]
    fn frozen_parent_thinning_clips_peak() {
        // c_5 > 1: kept points have density proportional to min(1, a).
        let alpha = 5.0;
        let k = KernelSpec::continuous(alpha).unwrap();
        assert!(k.c_alpha > 1.0);
        // a(z) = 1 at |z| = z1; on [-z1, z1] the clipped density is flat.
        let z1 = (k.c_alpha.powf(1.0 / alpha) - 1.0).sqrt();
        let mass = 2.0 * z1 + 2.0 * k.tail(z1);
        let cdf = |x: f64| {
            let m = if x <= -z1 {
                1.0 - k.tail(x)
            } else if x <= z1 {
                k.tail(z1) + (x + z1)
            } else {
                k.tail(z1) + 2.0 * z1 + (k.tail(z1) - k.tail(x))
            };
            m / mass
        };
        let n = 100_000;
        let mut xs = frozen_parent_draws(alpha, n, 32);
        let d = ks_distance(&mut xs, cdf);
        assert!(d < 1.628 / (n as f64).sqrt(), "D = {d}");
    }
}
