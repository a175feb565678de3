//! Least-squares speed fits, tip doubling ratios and quantile comparisons
//! between run ensembles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meso::FrontTrace;
use crate::trajectory::{TipSample, TipTrajectory};

pub const MIN_FIT_POINTS: usize = 8;

/// Residual RMS relative to the fitted rise `|slope| (t_hi - t_lo)` above
/// which a fit is flagged as curved.
pub const CURVATURE_THRESHOLD: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub window: (f64, f64),
    pub n_points: usize,
    /// RMS residual over the fitted rise across the window.
    pub residual_ratio: f64,
    pub curved: bool,
}

/// Ordinary least squares of `y` on `t`.
pub fn ols(points: &[(f64, f64)]) -> Result<SpeedFit> {
    let n = points.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::Config(format!("need at least {MIN_FIT_POINTS} points to fit, got {n}")));
    }
    let nf = n as f64;
    let mt = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Config("fit needs at least two distinct times".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mt;
    let ssr: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    let t_lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t_hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let rms = (ssr / nf).sqrt();
    let rise = slope.abs() * (t_hi - t_lo);
    let residual_ratio = if rms == 0.0 { 0.0 } else { rms / rise };
    Ok(SpeedFit {
        slope,
        intercept,
        stderr,
        window: (t_lo, t_hi),
        n_points: n,
        residual_ratio,
        curved: residual_ratio > CURVATURE_THRESHOLD,
    })
}

/// Second half of `[0, t_end]`.
pub fn default_window(t_end: f64) -> (f64, f64) {
    (0.5 * t_end, t_end)
}

fn in_window(t: f64, w: (f64, f64)) -> bool {
    t >= w.0 && t <= w.1
}

fn trajectory_window(traj: &TipTrajectory, window: Option<(f64, f64)>) -> Result<(f64, f64)> {
    let last = traj.last().ok_or_else(|| Error::Config("empty trajectory".into()))?;
    let w = window.unwrap_or_else(|| default_window(last.t));
    if !(w.0 < w.1) {
        return Err(Error::Config(format!("fit window must have t_lo < t_hi, got {w:?}")));
    }
    Ok(w)
}

/// `|left tip|` against `t` on the window (default: second half).
pub fn fit_linear_speed(traj: &TipTrajectory, window: Option<(f64, f64)>) -> Result<SpeedFit> {
    let w = trajectory_window(traj, window)?;
    let pts: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .filter(|s| in_window(s.t, w))
        .map(|s| (s.t, s.left_tip.abs()))
        .collect();
    ols(&pts)
}

/// `|left tip| / t` against `t`; a bounded speed shows up as a slope that is
/// not significantly positive.
pub fn fit_speed_trend(traj: &TipTrajectory, window: Option<(f64, f64)>) -> Result<SpeedFit> {
    let w = trajectory_window(traj, window)?;
    let pts: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .filter(|s| s.t > 0.0 && in_window(s.t, w))
        .map(|s| (s.t, s.left_tip.abs() / s.t))
        .collect();
    ols(&pts)
}

/// `ln x_right` against `t` on the window (default: second half of the trace).
pub fn fit_exponential_rate(trace: &FrontTrace, window: Option<(f64, f64)>) -> Result<SpeedFit> {
    let series = trace.right_series();
    let t_end = trace.records.last().map(|r| r.t).ok_or_else(|| Error::Config("empty front trace".into()))?;
    let w = window.unwrap_or_else(|| default_window(t_end));
    let mut pts = Vec::new();
    for (t, x) in series {
        if !in_window(t, w) {
            continue;
        }
        if !(x > 0.0) {
            return Err(Error::Domain(format!("front position {x} at t = {t} is not positive")));
        }
        pts.push((t, x.ln()));
    }
    ols(&pts)
}

/// Linear interpolation of `|left tip|` at `t`.
fn spread_at(samples: &[TipSample], t: f64) -> Option<f64> {
    let i = samples.partition_point(|s| s.t < t);
    if i == samples.len() {
        return None;
    }
    let b = &samples[i];
    if b.t == t || i == 0 {
        return (b.t == t).then_some(b.left_tip.abs());
    }
    let a = &samples[i - 1];
    let f = (t - a.t) / (b.t - a.t);
    Some(a.left_tip.abs() * (1.0 - f) + b.left_tip.abs() * f)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingRatio {
    pub t: f64,
    /// `|tip(2t)| / |tip(t)|`.
    pub ratio: f64,
}

/// Doubling ratios at the checkpoints `t_end / 2^k`, in increasing `t`,
/// skipping checkpoints where the tip is still at the origin.
pub fn superlinearity_statistic(traj: &TipTrajectory) -> Vec<DoublingRatio> {
    let Some(last) = traj.last() else {
        return Vec::new();
    };
    let t_min = traj.samples.iter().find(|s| s.t > 0.0).map_or(f64::INFINITY, |s| s.t);
    let mut out = Vec::new();
    let mut t = 0.5 * last.t;
    while t >= t_min {
        if let (Some(x1), Some(x2)) = (spread_at(&traj.samples, t), spread_at(&traj.samples, 2.0 * t)) {
            if x1 > 0.0 {
                out.push(DoublingRatio { t, ratio: x2 / x1 });
            }
        }
        t *= 0.5;
    }
    out.reverse();
    out
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let h = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub const DOMINATION_QUANTILES: [f64; 4] = [0.25, 0.5, 0.75, 0.9];
pub const MIN_ARM_SIZE: usize = 16;

/// Which arm is expected to be stochastically larger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    /// The lattice arm should sit above the reference arm.
    LatticeAbove,
    LatticeBelow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub statistic: String,
    pub quantile: f64,
    pub reference: f64,
    pub lattice: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileReport {
    pub t: f64,
    pub direction: Dominance,
    pub n_reference: usize,
    pub n_lattice: usize,
    pub rows: Vec<QuantileRow>,
    pub all_hold: bool,
}

type Statistic = (&'static str, fn(&TipSample) -> f64);

const STATISTICS: [Statistic; 3] = [
    ("abs_left_tip", |s| s.left_tip.abs()),
    ("right_tip", |s| s.right_tip),
    ("n_particles", |s| s.n_particles as f64),
];

/// Compares the two ensembles at time `t` quantile by quantile for the left
/// and right tips and the particle count.
pub fn domination_statistics(
    reference: &[TipTrajectory],
    lattice: &[TipTrajectory],
    t: f64,
    direction: Dominance,
) -> Result<QuantileReport> {
    if reference.len() < MIN_ARM_SIZE || lattice.len() < MIN_ARM_SIZE {
        return Err(Error::Config(format!(
            "need at least {MIN_ARM_SIZE} runs per arm, got {} and {}",
            reference.len(),
            lattice.len()
        )));
    }
    let snap = |arm: &[TipTrajectory]| -> Result<Vec<TipSample>> {
        arm.iter()
            .map(|tr| {
                tr.at(t)
                    .copied()
                    .ok_or_else(|| Error::Config(format!("trajectory has no sample at or before t = {t}")))
            })
            .collect()
    };
    let r = snap(reference)?;
    let l = snap(lattice)?;
    let mut rows = Vec::new();
    for (name, f) in STATISTICS {
        let mut rv: Vec<f64> = r.iter().map(f).collect();
        let mut lv: Vec<f64> = l.iter().map(f).collect();
        rv.sort_by(f64::total_cmp);
        lv.sort_by(f64::total_cmp);
        for q in DOMINATION_QUANTILES {
            let (a, b) = (quantile(&rv, q), quantile(&lv, q));
            let holds = match direction {
                Dominance::LatticeAbove => b >= a,
                Dominance::LatticeBelow => b <= a,
            };
            rows.push(QuantileRow {
                statistic: name.to_string(),
                quantile: q,
                reference: a,
                lattice: b,
                holds,
            });
        }
    }
    let all_hold = rows.iter().all(|r| r.holds);
    Ok(QuantileReport {
        t,
        direction,
        n_reference: reference.len(),
        n_lattice: lattice.len(),
        rows,
        all_hold,
    })
}
