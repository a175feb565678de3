//! Spread of the continuum process in both tail regimes, and its stochastic
//! ordering against sped-up and slowed lattice processes.

use truncfront::analysis::{
    domination_statistics, fit_speed_trend, ols, quantile, superlinearity_statistic, Dominance,
};
use truncfront::continuum::{discretize, simulate_continuum, ContinuumSimConfig, PointState};
use truncfront::experiment::batch;
use truncfront::lattice::{domination_multipliers, simulate, LatticeParams, LatticeSimConfig};
use truncfront::rng::derive_seed;
use truncfront::{KernelSpec, TipTrajectory};

fn seeds(tag: u64, n: u64) -> Vec<u64> {
    (0..n).map(|i| derive_seed(tag, i)).collect()
}

fn continuum(alpha: f64, horizon: f64, budget: Option<u64>, seeds: &[u64]) -> Vec<TipTrajectory> {
    let cfg = ContinuumSimConfig {
        alpha,
        horizon,
        sample_interval: if budget.is_some() { 0.05 } else { 1.0 },
        event_budget: budget,
    };
    batch(seeds, |&s| simulate_continuum(&cfg, s).unwrap().trajectory)
}

#[test]
fn zero_horizon_is_the_initial_particle() {
    let cfg = ContinuumSimConfig {
        alpha: 2.0,
        horizon: 0.0,
        ..Default::default()
    };
    let tr = simulate_continuum(&cfg, 1).unwrap().trajectory;
    assert_eq!(tr.samples.len(), 1);
    let s = &tr.samples[0];
    assert_eq!((s.t, s.left_tip, s.right_tip, s.n_particles), (0.0, 0.0, 0.0, 1));
}

#[test]
fn alpha_three_spreads_at_constant_speed() {
    // The front lags a straight line, `|tip| ≈ v t - c`, so `|tip| / t`
    // creeps up like `v - c / t`. Finite speed shows up as a straight
    // ensemble-mean `|tip|` with no acceleration across the window.
    let runs = continuum(3.0, 150.0, None, &seeds(301, 16));
    let mean_tip = |lo: u32, hi: u32| -> Vec<(f64, f64)> {
        (lo..=hi)
            .map(|t| {
                let t = f64::from(t);
                let v: f64 = runs.iter().map(|r| r.at(t).unwrap().left_tip.abs()).sum();
                (t, v / runs.len() as f64)
            })
            .collect()
    };
    let whole = ols(&mean_tip(75, 150)).unwrap();
    assert!(!whole.curved, "{whole:?}");
    let early = ols(&mean_tip(75, 112)).unwrap();
    let late = ols(&mean_tip(113, 150)).unwrap();
    let se = early.stderr.hypot(late.stderr);
    assert!(late.slope <= early.slope + 3.0 * se, "{early:?} {late:?}");
    assert!(whole.slope > 0.0 && whole.slope < 10.0);
    for r in &runs {
        let per_run = fit_speed_trend(r, Some((75.0, 150.0))).unwrap();
        assert!(per_run.slope < 0.01, "{per_run:?}");
    }
}

#[test]
fn alpha_one_and_a_half_doubling_ratio() {
    // Single long jumps dominate the per-run ratio, so the ensemble mean is
    // the stable statistic.
    let runs = continuum(1.5, 1e6, Some(100_000), &seeds(302, 8));
    let last: Vec<f64> = runs
        .iter()
        .map(|r| superlinearity_statistic(r).last().unwrap().ratio)
        .collect();
    let mean = last.iter().sum::<f64>() / last.len() as f64;
    assert!(mean > 2.2, "{last:?}");
}

#[test]
fn discretized_run_keeps_every_particle() {
    let k = KernelSpec::continuous(1.5).unwrap();
    let mut st = PointState::new(k, &[0.0]).unwrap();
    let mut rng = truncfront::rng::stream(4);
    for t in [2.0, 5.0, 10.0] {
        st.advance_to(t, &mut rng);
        let bins = discretize(st.positions());
        assert_eq!(bins.iter().map(|b| b.1).sum::<u64>(), st.n_particles());
    }
}

fn lattice(alpha: f64, multiplier: f64, horizon: f64, seeds: &[u64]) -> Vec<TipTrajectory> {
    let mut params = LatticeParams::new(alpha);
    params.rate_multiplier = multiplier;
    let cfg = LatticeSimConfig {
        params,
        horizon,
        sample_interval: 1.0,
        ..Default::default()
    };
    batch(seeds, |&s| simulate(&cfg, s).unwrap().trajectory)
}

#[test]
fn sped_and_slowed_lattices_bracket_rounded_continuum() {
    let (up, down) = domination_multipliers(3.0).unwrap();
    let cont = continuum(3.0, 50.0, None, &seeds(303, 32));
    let fast = lattice(3.0, up, 50.0, &seeds(304, 32));
    let slow = lattice(3.0, down, 50.0, &seeds(305, 32));
    let above = domination_statistics(&cont, &fast, 50.0, Dominance::LatticeAbove).unwrap();
    let below = domination_statistics(&cont, &slow, 50.0, Dominance::LatticeBelow).unwrap();
    assert!(above.all_hold, "{above:?}");
    assert!(below.all_hold, "{below:?}");

    let median = |runs: &[TipTrajectory]| {
        let mut v: Vec<f64> = runs.iter().map(|r| r.at(50.0).unwrap().left_tip.abs()).collect();
        v.sort_by(f64::total_cmp);
        quantile(&v, 0.5)
    };
    assert!(median(&fast) >= median(&cont));
    assert!(median(&slow) <= median(&cont));

    let at_start = domination_statistics(&cont, &fast, 0.0, Dominance::LatticeAbove).unwrap();
    assert!(at_start.rows.iter().all(|r| r.reference == r.lattice));
}
