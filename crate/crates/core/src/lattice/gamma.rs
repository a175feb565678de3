//! Nearest-neighbour comparison process.
//!
//! `γ` gives birth at rate one at every site `x` with `γ(x) + γ(x - 1) > 0`.
//! Started from one particle at the origin it occupies `{0, ..., R}` with the
//! right end `R` a rate-one Poisson process, and it can be coupled below the
//! lattice process `η` by letting both share the clocks on `{0, ..., R + 1}`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::state::{LatticeParams, LatticeState, Proposal};
use crate::rng::stream;
use crate::trajectory::{Cadence, PositionKind, StopReason, TipSample, TipTrajectory};

#[derive(Clone, Debug, Default)]
pub struct GammaState {
    counts: Vec<u64>,
    pub time: f64,
    n: u64,
}

impl GammaState {
    pub fn new() -> Self {
        GammaState {
            counts: vec![1],
            time: 0.0,
            n: 1,
        }
    }

    pub fn right_tip(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n_particles(&self) -> u64 {
        self.n
    }

    /// Number of sites with unit birth rate, `R + 2`.
    pub fn active_sites(&self) -> usize {
        self.counts.len() + 1
    }

    pub fn birth(&mut self, x: usize) {
        if x == self.counts.len() {
            self.counts.push(0);
        }
        self.counts[x] += 1;
        self.n += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaRun {
    pub trajectory: TipTrajectory,
    pub counts: Vec<u64>,
}

/// Runs `γ` alone up to `horizon`.
pub fn simulate_gamma(horizon: f64, sample_interval: f64, seed: u64) -> Result<GammaRun> {
    if !(horizon >= 0.0 && sample_interval > 0.0) {
        return Err(Error::Config("horizon must be >= 0 and sample_interval > 0".into()));
    }
    let mut rng = stream(seed);
    let mut g = GammaState::new();
    let mut traj = TipTrajectory::new(PositionKind::Lattice);
    let mut cad = Cadence::new(sample_interval, horizon);
    loop {
        let e: f64 = Exp1.sample(&mut rng);
        let t_next = g.time + e / g.active_sites() as f64;
        cad.drain_before(t_next, |s| traj.samples.push(sample(&g, s)));
        if cad.peek().is_none() {
            break;
        }
        g.time = t_next;
        let x = rng.random_range(0..g.active_sites());
        g.birth(x);
        traj.births += 1;
        traj.proposals += 1;
    }
    traj.stop = StopReason::Horizon;
    Ok(GammaRun {
        trajectory: traj,
        counts: g.counts,
    })
}

fn sample(g: &GammaState, t: f64) -> TipSample {
    TipSample {
        t,
        left_tip: 0.0,
        right_tip: g.right_tip() as f64,
        n_particles: g.n,
        q_estimate: None,
    }
}

/// `min_{0 ≤ x ≤ x_max} γ(x)`, with unvisited sites counting as zero.
pub fn rectangle_minimum(counts: &[u64], x_max: usize) -> u64 {
    (0..=x_max).map(|x| counts.get(x).copied().unwrap_or(0)).min().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaCouplingReport {
    pub seed: u64,
    pub horizon: f64,
    /// Site comparisons `γ(x) ≤ η(x)` made after every `γ` birth.
    pub checks: u64,
    pub violations: u64,
    pub gamma_right_tip: usize,
    pub eta_right_tip: i64,
    pub eta_particles: u64,
}

/// Runs `γ` and the lattice process `η` on shared clocks and checks
/// `γ ≤ η` after every `γ` birth.
///
/// Sites `0..=R + 1` carry rate-one clocks with a uniform mark `u`; `γ` always
/// gives birth there and `η` does when `u ≤ b(x, η)`. Elsewhere `η` uses its
/// own proposals, discarding any that land inside the window.
pub fn couple_gamma_eta(params: LatticeParams, horizon: f64, seed: u64) -> Result<GammaCouplingReport> {
    if !(horizon >= 0.0) {
        return Err(Error::Config("horizon must be >= 0".into()));
    }
    let mult = params.rate_multiplier;
    if mult != 1.0 {
        return Err(Error::Config("the comparison coupling runs at unit rate".into()));
    }
    let mut rng = stream(seed);
    let mut eta = LatticeState::new(params)?;
    let mut g = GammaState::new();
    let mut t = 0.0;
    let mut checks = 0;
    let mut violations = 0;
    loop {
        let window = g.active_sites() as f64;
        let eta_rate = eta.rate_bound();
        let e: f64 = Exp1.sample(&mut rng);
        t += e / (window + eta_rate);
        if t > horizon {
            break;
        }
        if rng.random::<f64>() * (window + eta_rate) < window {
            let x = rng.random_range(0..g.active_sites());
            let u: f64 = rng.random();
            g.birth(x);
            if u <= eta.birth_rate(x as i64) {
                eta.birth(x as i64)?;
            }
            checks += 1;
            if g.counts()[x] > eta.count_at(x as i64) as u64 {
                violations += 1;
            }
        } else if let Proposal::Birth(x) = eta.propose(&mut rng)? {
            let inside = x >= 0 && (x as usize) < g.active_sites();
            if !inside {
                eta.birth(x)?;
            }
        }
    }
    eta.time = t;
    g.time = t;
    Ok(GammaCouplingReport {
        seed,
        horizon,
        checks,
        violations,
        gamma_right_tip: g.right_tip(),
        eta_right_tip: eta.right_tip(),
        eta_particles: eta.n_particles(),
    })
}
