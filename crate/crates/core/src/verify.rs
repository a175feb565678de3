//! The verification suite: one function per property, each returning a
//! [`CheckReport`] with its parameters, worst observed violation and verdict.
//!
//! Tolerances and sizes live in the functions below. [`Suite::Quick`] shrinks
//! seeds, horizons and grids for smoke tests; its verdicts are not meaningful
//! for the statistical checks.

use std::path::Path;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{fit_exponential_rate, ols, superlinearity_statistic};
use crate::error::{Error, Result};
use crate::experiment::{self, ExperimentConfig, Mode, RunOptions, MANIFEST};
use crate::kernel::{density, kernel_lattice, normalization_constant, round_half_down, KernelSpec};
use crate::lattice::gamma::rectangle_minimum;
use crate::lattice::{couple_xi_zeta, simulate, simulate_gamma, CouplingConfig, LatticeParams, LatticeSimConfig};
use crate::meso::checks::{
    comparison_check, find_lambda, kernel_ratio, scan_subsolution, trace_front, CappedPower, GrowthMonitor,
    LambdaSearchConfig, OnsetScanConfig, Profile, Weight,
};
use crate::meso::{Closure, GridSpec, InitialCondition, MesoField, MesoSolver, PicardOptions};
use crate::output::{self, CheckReport};
use crate::quad::{integrate_line, Tolerance};
use crate::rng::{derive_seed, stream};
use crate::series::{heuristic_series, poisson_ldp_check, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    #[default]
    All,
    Quick,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "quick" => Ok(Suite::Quick),
            other => Err(Error::Config(format!("unknown suite {other:?} (expected all or quick)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
    pub wall_time_secs: f64,
}

const MASTER_SEED: u64 = 20_240_601;

fn seeds(tag: u64, n: usize) -> Vec<u64> {
    (0..n as u64).map(|i| derive_seed(MASTER_SEED ^ tag, i)).collect()
}

fn failed(check: &str, e: &Error) -> CheckReport {
    CheckReport {
        check: check.to_string(),
        params: json!({}),
        max_violation: f64::INFINITY,
        pass: false,
        details: json!({ "error": e.to_string() }),
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

/// Unit mass, sampler goodness of fit and the continuum/lattice sandwich.
pub fn kernel_correctness(suite: Suite) -> Result<CheckReport> {
    let alphas = [0.75, 1.0, 1.5, 2.0, 3.0];
    let n = if suite == Suite::Quick { 10_000 } else { 100_000 };
    let ks_crit = 1.628 / (n as f64).sqrt();
    let mut mass_err: f64 = 0.0;
    let mut ks_worst: f64 = 0.0;
    let mut sandwich_worst: f64 = 0.0;
    let mut rows = Vec::new();
    for (i, &alpha) in alphas.iter().enumerate() {
        let c = normalization_constant(alpha)?;
        let tol = Tolerance::new(1e-12, 1e-12);
        let mass = integrate_line(|z| density(z, alpha, c), &[-1.0, 0.0, 1.0], tol)?.value;
        mass_err = mass_err.max((mass - 1.0).abs());
        let k = KernelSpec::continuous(alpha)?;
        let mut rng = stream(derive_seed(MASTER_SEED, i as u64));
        let mut draws: Vec<f64> = (0..n).map(|_| k.sample(&mut rng)).collect();
        let d = ks_statistic(&k, &mut draws);
        ks_worst = ks_worst.max(d / ks_crit);
        let lo = c * 4f64.powf(-alpha);
        let hi = c * 2f64.powf(alpha);
        for j in -5000..=5000 {
            let x = j as f64 * 0.01;
            let ad = kernel_lattice(round_half_down(x), alpha);
            let a = density(x, alpha, c);
            sandwich_worst = sandwich_worst.max(lo * ad / a - 1.0).max(a / (hi * ad) - 1.0);
        }
        rows.push(json!({ "alpha": alpha, "mass": mass, "ks_d": d }));
    }
    let pass = mass_err <= 1e-8 && ks_worst < 1.0 && sandwich_worst <= 1e-14;
    Ok(CheckReport {
        check: "kernel_correctness".into(),
        params: json!({ "alphas": alphas, "draws": n, "ks_critical": ks_crit, "probe_step": 0.01, "probe_range": [-50, 50] }),
        max_violation: mass_err,
        pass,
        details: json!({ "per_alpha": rows, "ks_over_critical": ks_worst, "sandwich_excess": sandwich_worst }),
    })
}

/// Bounded speed for `α = 3`: `|tip| / t` does not trend upward late in the
/// run and stays below 10.
pub fn linear_regime(suite: Suite) -> Result<CheckReport> {
    let (n_seeds, horizon) = if suite == Suite::Quick { (4, 40.0) } else { (16, 200.0) };
    let cfg = LatticeSimConfig {
        params: LatticeParams::new(3.0),
        horizon,
        sample_interval: 1.0,
        ..Default::default()
    };
    let seeds = seeds(2, n_seeds);
    let runs: Vec<_> = experiment::batch(&seeds, |&s| simulate(&cfg, s))
        .into_iter()
        .collect::<Result<_>>()?;
    let window = (0.5 * horizon, horizon);
    // Ensemble mean of |tip|/t at each sample time in the window.
    let times: Vec<f64> = runs[0]
        .trajectory
        .samples
        .iter()
        .map(|s| s.t)
        .filter(|&t| t >= window.0 && t <= window.1)
        .collect();
    let mean: Vec<(f64, f64)> = times
        .iter()
        .map(|&t| {
            let v: f64 = runs
                .iter()
                .map(|r| r.trajectory.at(t).map_or(0.0, |s| s.left_tip.abs() / t))
                .sum();
            (t, v / runs.len() as f64)
        })
        .collect();
    let fit = ols(&mean)?;
    let max_ratio = runs
        .iter()
        .flat_map(|r| r.trajectory.samples.iter())
        .filter(|s| s.t >= 1.0)
        .map(|s| s.left_tip.abs() / s.t)
        .fold(0.0, f64::max);
    let pass = fit.slope <= 2.0 * fit.stderr && max_ratio <= 10.0;
    Ok(CheckReport {
        check: "linear_regime".into(),
        params: json!({ "alpha": 3.0, "seeds": n_seeds, "horizon": horizon, "window": window }),
        max_violation: fit.slope - 2.0 * fit.stderr,
        pass,
        details: json!({ "slope": fit.slope, "stderr": fit.stderr, "max_tip_over_t": max_ratio }),
    })
}

/// Superlinear spread for `α = 1.25`: mean doubling ratio above 2.2.
pub fn superlinear_regime(suite: Suite) -> Result<CheckReport> {
    let (n_seeds, budget) = if suite == Suite::Quick { (4, 100_000) } else { (16, 1_000_000) };
    let cfg = LatticeSimConfig {
        params: LatticeParams::new(1.25),
        horizon: 1e6,
        sample_interval: 0.05,
        event_budget: Some(budget),
        ..Default::default()
    };
    let seeds = seeds(3, n_seeds);
    let runs: Vec<_> = experiment::batch(&seeds, |&s| simulate(&cfg, s))
        .into_iter()
        .collect::<Result<_>>()?;
    let last: Vec<f64> = runs
        .iter()
        .filter_map(|r| superlinearity_statistic(&r.trajectory).last().map(|d| d.ratio))
        .collect();
    if last.is_empty() {
        return Err(Error::Logic("no doubling ratios available".into()));
    }
    let mean = last.iter().sum::<f64>() / last.len() as f64;
    Ok(CheckReport {
        check: "superlinear_regime".into(),
        params: json!({ "alpha": 1.25, "seeds": n_seeds, "event_budget": budget, "threshold": 2.2 }),
        max_violation: 2.2 - mean,
        pass: mean > 2.2,
        details: json!({ "mean_ratio": mean, "last_ratios": last,
            "end_times": runs.iter().map(|r| r.trajectory.last().map_or(0.0, |s| s.t)).collect::<Vec<_>>() }),
    })
}

/// Zero prefix-sum violations in the tip-view coupling.
pub fn stochastic_domination(suite: Suite) -> Result<CheckReport> {
    let n = if suite == Suite::Quick { 10 } else { 100 };
    let cfg = CouplingConfig::default();
    let rep = couple_xi_zeta(&cfg, &seeds(4, n))?;
    Ok(CheckReport {
        check: "stochastic_domination".into(),
        params: json!({ "alpha": cfg.alpha, "depth": cfg.depth, "max_jump": cfg.max_jump, "events": cfg.events, "runs": n }),
        max_violation: rep.violations as f64,
        pass: rep.violations == 0,
        details: json!({ "max_partial_sum_gap": rep.max_partial_sum_gap, "neglected_rate_bound": rep.neglected_rate_bound,
            "events": rep.events }),
    })
}

/// `min_{0 ≤ x ≤ t/4} γ_t(x) ≥ t/10` in at least 95% of runs.
pub fn rectangle_lower_bound(suite: Suite) -> Result<CheckReport> {
    let (n, t) = if suite == Suite::Quick { (8, 100.0) } else { (32, 400.0) };
    let s = seeds(5, n);
    let mins: Vec<u64> = experiment::batch(&s, |&seed| simulate_gamma(t, t, seed))
        .into_iter()
        .map(|r| r.map(|g| rectangle_minimum(&g.counts, (t / 4.0) as usize)))
        .collect::<Result<_>>()?;
    let hits = mins.iter().filter(|&&m| m as f64 >= t / 10.0).count();
    let frac = hits as f64 / n as f64;
    Ok(CheckReport {
        check: "rectangle_lower_bound".into(),
        params: json!({ "seeds": n, "t": t, "x_max": t / 4.0, "threshold": t / 10.0, "required_fraction": 0.95 }),
        max_violation: 0.95 - frac,
        pass: frac >= 0.95,
        details: json!({ "fraction": frac, "minima": mins }),
    })
}

fn front_slope(case: u8, suite: Suite) -> Result<CheckReport> {
    let alpha = 1.0;
    let horizon = 15.0;
    let cells = if suite == Suite::Quick { 1 << 16 } else { 1 << 20 };
    let kernel = KernelSpec::continuous(alpha)?;
    let (grid, init, target, band) = if case == 1 {
        (
            GridSpec::sized_for_front(1.0 / (2.0 * alpha), 0.3, horizon, cells)?,
            InitialCondition::Bump {
                height: 1.0,
                half_width: 1.0,
            },
            1.0 / (2.0 * alpha),
            (0.4, 0.6),
        )
    } else {
        (
            GridSpec::sized_for_front(1.0 / (2.0 * alpha - 1.0), 0.2, horizon, cells)?
                .with_closures(Closure::Plateau, Closure::Zero),
            InitialCondition::Step { height: 1.0 },
            1.0 / (2.0 * alpha - 1.0),
            (0.8, 1.2),
        )
    };
    let mut solver = MesoSolver::new(&kernel, &grid, 1e-6)?;
    let f0 = MesoField::from_initial(grid.clone(), &init, &kernel)?;
    let trace = trace_front(&mut solver, &f0, 0.5, horizon, 0.1, 0.25)?;
    let fit = fit_exponential_rate(&trace, None)?;
    let series = trace.right_series();
    let monotone = series.windows(2).all(|w| w[1].1 >= w[0].1);
    let miss = (band.0 - fit.slope).max(fit.slope - band.1);
    Ok(CheckReport {
        check: format!("meso_front_case{case}"),
        params: json!({ "alpha": alpha, "horizon": horizon, "level": 0.5, "cells": cells, "h": grid.h(),
            "x_max": grid.x_max, "target": target, "band": band }),
        max_violation: miss,
        pass: miss <= 0.0 && monotone,
        details: json!({ "slope": fit.slope, "stderr": fit.stderr, "window": fit.window, "front_monotone": monotone }),
    })
}

/// Front of localized data spreads like `exp(t / (2α))`.
pub fn meso_front_case1(suite: Suite) -> Result<CheckReport> {
    front_slope(1, suite)
}

/// Front of data with mass at `-∞` spreads like `exp(t / (2α - 1))`.
pub fn meso_front_case2(suite: Suite) -> Result<CheckReport> {
    front_slope(2, suite)
}

/// Time-averaged profiles satisfy `∂t ≤ a *` from the scanned onset on.
pub fn subsolutions(suite: Suite) -> Result<CheckReport> {
    let cfg = OnsetScanConfig {
        t_max: if suite == Suite::Quick { 10.0 } else { 40.0 },
        ..Default::default()
    };
    let mut worst = f64::NEG_INFINITY;
    let mut rows = Vec::new();
    let mut pass = true;
    for (alpha, eps) in [(1.0, 0.5), (1.5, 0.3)] {
        for which in [Profile::G, Profile::H] {
            let s = scan_subsolution(which, alpha, eps, &cfg)?;
            pass &= s.passed(cfg.tol);
            worst = worst.max(s.max_violation_after);
            rows.push(json!({ "profile": which, "alpha": alpha, "eps": eps, "onset": s.onset,
                "max_violation_after": s.max_violation_after }));
        }
    }
    Ok(CheckReport {
        check: "subsolutions".into(),
        params: json!(cfg),
        max_violation: worst,
        pass,
        details: json!(rows),
    })
}

/// `(a * a^γ) / a^γ → 1` for `α = 1`, `γ = 0.9`.
pub fn kernel_ratio_limit(_suite: Suite) -> Result<CheckReport> {
    let k = KernelSpec::continuous(1.0)?;
    let xs = [0.0, 1e2, 1e4, 1e6];
    let r = kernel_ratio(&k, 0.9, &xs)?;
    let far = (r[3] - 1.0).abs();
    let near = (r[1] - 1.0).abs();
    Ok(CheckReport {
        check: "kernel_ratio_limit".into(),
        params: json!({ "alpha": 1.0, "gamma": 0.9, "probes": xs }),
        max_violation: far - 0.1,
        pass: far < 0.1 && far < near,
        details: json!({ "ratios": r }),
    })
}

/// A certified `λ`, the weighted-norm bound along a solve, and its failure
/// when the growth rate is halved.
pub fn weighted_growth_bound(suite: Suite) -> Result<CheckReport> {
    let (alpha, gamma, delta) = (1.0, 0.9, 0.5);
    let lam = find_lambda(alpha, gamma, delta, &LambdaSearchConfig::default())?;
    let kernel = KernelSpec::continuous(alpha)?;
    let horizon = 10.0;
    let cells = if suite == Suite::Quick { 1 << 14 } else { 1 << 18 };
    let grid = GridSpec::sized_for_front(1.0 / (2.0 * alpha), 0.3, horizon, cells)?;
    let weight = Weight::Capped(CappedPower {
        kernel: kernel.clone(),
        gamma,
        lambda: lam.lambda,
    });
    let nu = 1.0 + delta;
    let mut solver = MesoSolver::new(&kernel, &grid, 1e-6)?;
    let mut field = MesoField::from_initial(grid, &InitialCondition::Kernel { scale: 1.0 }, &kernel)?;
    let mut bound = GrowthMonitor::new(&weight, nu, &field);
    let mut control = GrowthMonitor::new(&weight, 0.5 * nu, &field);
    solver.solve(&mut field, horizon, 0.05, 0.25, |f| {
        bound.observe(f);
        control.observe(f);
    })?;
    let b = bound.report().clone();
    let c = control.report().clone();
    Ok(CheckReport {
        check: "weighted_growth_bound".into(),
        params: json!({ "alpha": alpha, "gamma": gamma, "delta": delta, "horizon": horizon, "cells": cells }),
        max_violation: b.max_excess,
        pass: b.max_excess <= 1e-6 && c.max_excess > 0.0,
        details: json!({ "lambda": lam, "bound": b, "halved_nu_control": c }),
    })
}

/// Ordered data stay ordered and every solution is non-decreasing in time.
pub fn comparison_principle(suite: Suite) -> Result<CheckReport> {
    let pairs = if suite == Suite::Quick { 4 } else { 20 };
    let kernel = KernelSpec::continuous(1.0)?;
    let grid = GridSpec::new(-256.0, 256.0, 1 << 12)?;
    let mut solver = MesoSolver::new(&kernel, &grid, 1e-2)?;
    let mut rng = stream(derive_seed(MASTER_SEED, 11));
    let mut worst_order: f64 = 0.0;
    let mut worst_decrease: f64 = 0.0;
    for _ in 0..pairs {
        let bumps: Vec<(f64, f64, f64)> = (0..3)
            .map(|_| (rng.random_range(0.05..1.5), rng.random_range(-40.0..40.0), rng.random_range(0.5..8.0)))
            .collect();
        let upper = move |x: f64| -> f64 {
            bumps
                .iter()
                .map(|&(a, c, w)| a * (-(x - c).powi(2) / (2.0 * w * w)).exp())
                .sum()
        };
        let theta: f64 = rng.random_range(0.0..1.0);
        let shift: f64 = rng.random_range(0.0..0.2);
        let u2 = MesoField::from_fn(grid.clone(), &upper)?;
        let u1 = MesoField::from_fn(grid.clone(), |x| (theta * upper(x) - shift).max(0.0))?;
        let rep = comparison_check(&mut solver, &u1, &u2, 5.0, 0.05)?;
        worst_order = worst_order.max(rep.max_order_violation);
        worst_decrease = worst_decrease.max(rep.max_decrease);
    }
    Ok(CheckReport {
        check: "comparison_principle".into(),
        params: json!({ "alpha": 1.0, "pairs": pairs, "horizon": 5.0, "dt": 0.05, "cells": grid.n_cells }),
        max_violation: worst_order,
        pass: worst_order <= 1e-8 && worst_decrease <= 0.0,
        details: json!({ "max_decrease": worst_decrease }),
    })
}

/// Picard against Heun on a short horizon, and Heun's convergence order.
pub fn cross_solver(suite: Suite) -> Result<CheckReport> {
    let kernel = KernelSpec::continuous(1.0)?;
    let cells = if suite == Suite::Quick { 256 } else { 1024 };
    let grid = GridSpec::new(-50.0, 50.0, cells)?.with_closures(Closure::Plateau, Closure::Plateau);
    let mut solver = MesoSolver::new(&kernel, &grid, 1e-6)?;
    let init = InitialCondition::Gaussian {
        amplitude: 0.3,
        center: 0.0,
        width: 3.0,
    };
    let f0 = MesoField::from_initial(grid, &init, &kernel)?;
    let sup = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let (picard, rep) = solver.picard(&f0, 0.5, &PicardOptions::default())?;
    let mut heun = f0.clone();
    solver.solve(&mut heun, 0.5, 1e-3, 0.5, |_| {})?;
    let gap = sup(&picard.u, &heun.u);
    let mut run = |dt: f64| -> Result<Vec<f64>> {
        let mut f = f0.clone();
        solver.solve(&mut f, 1.0, dt, 1.0, |_| {})?;
        Ok(f.u)
    };
    let reference = run(0.1 / 8.0)?;
    let e1 = sup(&run(0.1)?, &reference);
    let e2 = sup(&run(0.05)?, &reference);
    let ratio = e1 / e2;
    Ok(CheckReport {
        check: "cross_solver".into(),
        params: json!({ "alpha": 1.0, "picard_horizon": 0.5, "heun_dt": 1e-3, "dts": [0.1, 0.05, 0.0125] }),
        max_violation: gap,
        pass: gap < 1e-4 && (3.0..=5.0).contains(&ratio),
        details: json!({ "picard_iterations": rep.iterations, "convergence_ratio": ratio, "errors": [e1, e2] }),
    })
}

/// Series verdicts and the Poisson lower-tail bound.
pub fn series_and_ldp(_suite: Suite) -> Result<CheckReport> {
    let mut rows = Vec::new();
    let mut pass = true;
    for (alpha, expected) in [
        (1.5, Verdict::Diverges),
        (2.0, Verdict::Diverges),
        (2.5, Verdict::Converges),
        (3.0, Verdict::Converges),
    ] {
        let r = heuristic_series(alpha, 1_000_000)?;
        pass &= r.verdict == expected;
        rows.push(json!(r));
    }
    let three = heuristic_series(3.0, 1_000_000)?;
    let value_err = (three.partial_sum - 0.0275215).abs();
    pass &= value_err <= 1e-6;
    let mut ldp = Vec::new();
    for lambda in [30.0, 60.0, 120.0, 240.0] {
        let r = poisson_ldp_check(lambda)?;
        pass &= r.holds;
        ldp.push(r);
    }
    Ok(CheckReport {
        check: "series_and_ldp".into(),
        params: json!({ "terms": 1_000_000, "lambdas": [30, 60, 120, 240] }),
        max_violation: value_err,
        pass,
        details: json!({ "series": rows, "ldp": ldp }),
    })
}

fn collect_files(dir: &Path, rel: &Path, out: &mut Vec<std::path::PathBuf>) -> Result<()> {
    let here = dir.join(rel);
    let mut entries: Vec<_> = std::fs::read_dir(&here)
        .map_err(|e| Error::io(&here, e))?
        .filter_map(|e| e.ok())
        .collect();
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let p = rel.join(e.file_name());
        if e.path().is_dir() {
            collect_files(dir, &p, out)?;
        } else if p != Path::new(MANIFEST) {
            out.push(p);
        }
    }
    Ok(())
}

/// Re-runs each experiment from its manifest and compares every artifact
/// byte for byte.
pub fn reproducibility(suite: Suite, work_dir: &Path) -> Result<CheckReport> {
    let root = work_dir.join("reproducibility");
    let mut configs = Vec::new();
    let mut lattice = ExperimentConfig::new(Mode::Lattice);
    lattice.alpha = 1.5;
    lattice.horizon = if suite == Suite::Quick { 5.0 } else { 20.0 };
    lattice.seeds.runs = 3;
    lattice.lattice.track_q = true;
    configs.push(lattice);
    let mut cont = ExperimentConfig::new(Mode::Continuum);
    cont.alpha = 2.0;
    cont.horizon = 10.0;
    cont.seeds.runs = 3;
    configs.push(cont);
    let mut gamma = ExperimentConfig::new(Mode::Gamma);
    gamma.horizon = 50.0;
    gamma.seeds.runs = 2;
    configs.push(gamma);
    let mut coupled = ExperimentConfig::new(Mode::Coupled);
    coupled.seeds.runs = 3;
    coupled.coupled.events = 2000;
    configs.push(coupled);
    let mut meso = ExperimentConfig::new(Mode::Meso);
    meso.alpha = 1.0;
    meso.horizon = 3.0;
    meso.meso.cells_log2 = 12;
    meso.meso.frame_stride = 2;
    configs.push(meso);

    let mut compared = 0usize;
    let mut mismatches = Vec::new();
    for (i, mut cfg) in configs.into_iter().enumerate() {
        let a = root.join(format!("run{i}_a"));
        let b = root.join(format!("run{i}_b"));
        cfg.output_dir = a.clone();
        experiment::run(&cfg, RunOptions::default())?;
        let mut again = ExperimentConfig::load(&a.join(MANIFEST))?;
        again.output_dir = b.clone();
        experiment::run(&again, RunOptions::default())?;
        let mut files = Vec::new();
        collect_files(&a, Path::new(""), &mut files)?;
        let mut files_b = Vec::new();
        collect_files(&b, Path::new(""), &mut files_b)?;
        if files != files_b {
            mismatches.push(format!("run{i}: file sets differ"));
        }
        for f in &files {
            let x = std::fs::read(a.join(f)).map_err(|e| Error::io(a.join(f), e))?;
            let y = std::fs::read(b.join(f)).unwrap_or_default();
            compared += 1;
            if x != y {
                mismatches.push(format!("run{i}: {}", f.display()));
            }
        }
    }
    Ok(CheckReport {
        check: "reproducibility".into(),
        params: json!({ "modes": ["lattice", "continuum", "gamma", "coupled", "meso"] }),
        max_violation: mismatches.len() as f64,
        pass: mismatches.is_empty() && compared > 0,
        details: json!({ "files_compared": compared, "mismatches": mismatches }),
    })
}

pub type CheckFn = fn(Suite) -> Result<CheckReport>;

/// Every check except reproducibility, which needs a working directory.
pub const CHECKS: [(&str, CheckFn); 13] = [
    ("kernel_correctness", kernel_correctness),
    ("linear_regime", linear_regime),
    ("superlinear_regime", superlinear_regime),
    ("stochastic_domination", stochastic_domination),
    ("rectangle_lower_bound", rectangle_lower_bound),
    ("meso_front_case1", meso_front_case1),
    ("meso_front_case2", meso_front_case2),
    ("subsolutions", subsolutions),
    ("kernel_ratio_limit", kernel_ratio_limit),
    ("weighted_growth_bound", weighted_growth_bound),
    ("comparison_principle", comparison_principle),
    ("cross_solver", cross_solver),
    ("series_and_ldp", series_and_ldp),
];

/// Runs all fourteen checks, recording failures as failing reports.
pub fn run_suite(suite: Suite, work_dir: &Path) -> SuiteReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (name, f) in CHECKS {
        let t = Instant::now();
        let rep = f(suite).unwrap_or_else(|e| failed(name, &e));
        log::info!("{name}: {} in {:.1?}", if rep.pass { "pass" } else { "FAIL" }, t.elapsed());
        checks.push(rep);
    }
    checks.push(reproducibility(suite, work_dir).unwrap_or_else(|e| failed("reproducibility", &e)));
    let pass = checks.iter().all(|c| c.pass);
    SuiteReport {
        suite,
        checks,
        pass,
        wall_time_secs: start.elapsed().as_secs_f64(),
    }
}

/// Writes the suite report as JSON.
pub fn write_report(path: &Path, report: &SuiteReport) -> Result<()> {
    output::write_json(path, report)
}
