//! Numerical checks of the growth equation's qualitative properties:
//! explicit sub-solutions, the kernel-ratio limit, the capped power weight and
//! the exponential bound it yields, the comparison principle and the
//! hair-trigger effect.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::meso::{FrontTrace, MesoField, MesoSolver};
use crate::quad::{breakpoints, integrate_points, integrate_to_inf, Tolerance};

fn quad_tol() -> Tolerance {
    Tolerance {
        abs: 1e-14,
        rel: 1e-10,
        max_intervals: 20_000,
    }
}

/// Log-spaced points `lo · 10^{k / per_decade}` up to `hi`.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi / lo).log10() * per_decade as f64).ceil() as usize;
    (0..=n)
        .map(|k| lo * 10f64.powf(k as f64 / per_decade as f64))
        .filter(|&x| x <= hi * (1.0 + 1e-12))
        .collect()
}

/// The two explicit profiles that push level sets outward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `min{1, |x|^{-2α} e^{(1-ε)t}}`.
    G,
    /// One on `x ≤ 0`, `min{1, x^{1-2α} e^{(1-ε)t}}` on `x > 0`.
    H,
}

/// A profile averaged over the time window `[t, t + l]`.
#[derive(Clone, Copy, Debug)]
pub struct AveragedProfile {
    pub which: Profile,
    pub alpha: f64,
    pub eps: f64,
    pub l: f64,
}

impl AveragedProfile {
    fn rate(&self) -> f64 {
        1.0 - self.eps
    }

    fn power(&self) -> f64 {
        match self.which {
            Profile::G => 2.0 * self.alpha,
            Profile::H => 2.0 * self.alpha - 1.0,
        }
    }

    /// Radius inside which the pointwise profile equals one at time `t`.
    pub fn radius(&self, t: f64) -> f64 {
        (self.rate() * t / self.power()).exp()
    }

    /// `ln` of the unsaturated amplitude at `x`; `None` where the profile is one.
    fn log_amplitude(&self, x: f64) -> Option<f64> {
        match self.which {
            Profile::G if x == 0.0 => None,
            Profile::G => Some(-self.power() * x.abs().ln()),
            Profile::H if x <= 0.0 => None,
            Profile::H => Some(-self.power() * x.ln()),
        }
    }

    /// Pointwise profile at time `s`.
    pub fn point(&self, x: f64, s: f64) -> f64 {
        match self.log_amplitude(x) {
            None => 1.0,
            Some(la) => (la + self.rate() * s).exp().min(1.0),
        }
    }

    /// `(1/l) ∫_t^{t+l} profile(x, s) ds` in closed form.
    pub fn value(&self, x: f64, t: f64) -> f64 {
        let Some(la) = self.log_amplitude(x) else {
            return 1.0;
        };
        let c = self.rate();
        let l = self.l;
        // The profile saturates at s* = -la / c.
        let s_star = -la / c;
        let integral = if s_star <= t {
            l
        } else if s_star >= t + l {
            ((la + c * (t + l)).exp() - (la + c * t).exp()) / c
        } else {
            (1.0 - (la + c * t).exp()) / c + (t + l - s_star)
        };
        integral / l
    }

    /// Time derivative of the averaged profile.
    pub fn time_derivative(&self, x: f64, t: f64) -> f64 {
        (self.point(x, t + self.l) - self.point(x, t)) / self.l
    }

    /// `∫_r^∞ a(z - y) P(y) dy` with `r` the saturation radius at `t`.
    fn outer(&self, kernel: &KernelSpec, z: f64, t: f64) -> Result<f64> {
        let r = self.radius(t);
        let r2 = self.radius(t + self.l);
        let far = 4.0 * r2.max(z.abs() + 10.0);
        let mut pts = vec![r, r2, far, z, z - 1.0, z + 1.0, z - 10.0, z + 10.0];
        pts.retain(|&p| p >= r && p <= far);
        let pts = breakpoints(pts);
        let f = |y: f64| kernel.eval(z - y) * self.value(y, t);
        let near = integrate_points(f, &pts, quad_tol())?.value;
        let tail = integrate_to_inf(f, far, quad_tol())?.value;
        Ok(near + tail)
    }

    /// `(a * P)(x)` at time `t`.
    pub fn convolve(&self, kernel: &KernelSpec, x: f64, t: f64) -> Result<f64> {
        let r = self.radius(t);
        match self.which {
            Profile::G => Ok(kernel.mass_between(x - r, x + r) + self.outer(kernel, x, t)? + self.outer(kernel, -x, t)?),
            Profile::H => Ok(kernel.tail(x - r) + self.outer(kernel, x, t)?),
        }
    }

    /// `∂t P - a * P` at `(x, t)`; non-positive where `P` is a sub-solution.
    pub fn violation(&self, kernel: &KernelSpec, x: f64, t: f64) -> Result<f64> {
        Ok(self.time_derivative(x, t) - self.convolve(kernel, x, t)?)
    }

    /// Probe points: log-spaced magnitudes out past the saturation radius,
    /// clustered around the radius at `t` and `t + l`.
    pub fn probes(&self, t: f64) -> Vec<f64> {
        let r1 = self.radius(t);
        let r2 = self.radius(t + self.l);
        let mut xs = vec![0.0];
        xs.extend(log_grid(1e-2, 1e4 * r2, 12));
        for r in [r1, r2] {
            for f in [1e-3, 1e-2, 0.05, 0.2, 0.5] {
                xs.push(r * (1.0 - f));
                xs.push(r * (1.0 + f));
            }
        }
        match self.which {
            Profile::G => {}
            Profile::H => {
                let neg: Vec<f64> = log_grid(1e-2, 1e3, 4).into_iter().map(|x| -x).collect();
                xs.extend(neg);
            }
        }
        breakpoints(xs)
    }

    /// Largest violation over [`Self::probes`] at time `t`.
    pub fn max_violation(&self, kernel: &KernelSpec, t: f64) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for x in self.probes(t) {
            worst = worst.max(self.violation(kernel, x, t)?);
        }
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OnsetScanConfig {
    /// Time-average window `l`.
    pub l: f64,
    pub t_start: f64,
    pub t_step: f64,
    pub t_max: f64,
    /// Length of the interval after the onset on which the bound must hold.
    pub window: f64,
    pub tol: f64,
}

impl Default for OnsetScanConfig {
    fn default() -> Self {
        OnsetScanConfig {
            l: 1.0,
            t_start: 0.0,
            t_step: 0.5,
            t_max: 40.0,
            window: 5.0,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnsetScan {
    pub which: Profile,
    pub alpha: f64,
    pub eps: f64,
    /// First scanned time from which the bound holds over the whole window.
    pub onset: Option<f64>,
    /// `(t, max violation)` on the scan grid.
    pub samples: Vec<(f64, f64)>,
    /// Largest violation on `[onset, onset + window]`, re-evaluated on a grid
    /// twice as fine as the scan.
    pub max_violation_after: f64,
}

impl OnsetScan {
    pub fn passed(&self, tol: f64) -> bool {
        self.onset.is_some() && self.max_violation_after <= tol
    }
}

/// Scans `t` upward for the first time from which the averaged profile
/// satisfies `∂t P ≤ a * P` at every probe, then re-verifies the window.
pub fn scan_subsolution(which: Profile, alpha: f64, eps: f64, cfg: &OnsetScanConfig) -> Result<OnsetScan> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(cfg.t_step > 0.0 && cfg.window >= 0.0 && cfg.l > 0.0) {
        return Err(Error::Config("scan needs t_step > 0, window >= 0, l > 0".into()));
    }
    let kernel = KernelSpec::continuous(alpha)?;
    let prof = AveragedProfile { which, alpha, eps, l: cfg.l };
    let span = (cfg.window / cfg.t_step).round() as usize;
    let n = ((cfg.t_max - cfg.t_start) / cfg.t_step).floor() as usize;
    let mut samples = Vec::new();
    let mut onset = None;
    let mut run = 0usize;
    for k in 0..=n {
        let t = cfg.t_start + k as f64 * cfg.t_step;
        let v = prof.max_violation(&kernel, t)?;
        samples.push((t, v));
        run = if v <= cfg.tol { run + 1 } else { 0 };
        if run > span {
            onset = Some(samples[samples.len() - 1 - span].0);
            break;
        }
    }
    let mut max_after = f64::INFINITY;
    if let Some(t0) = onset {
        max_after = f64::NEG_INFINITY;
        let steps = 2 * span;
        for k in 0..=steps {
            let t = t0 + k as f64 * 0.5 * cfg.t_step;
            max_after = max_after.max(prof.max_violation(&kernel, t)?);
        }
    }
    Ok(OnsetScan {
        which,
        alpha,
        eps,
        onset,
        samples,
        max_violation_after: max_after,
    })
}

/// `(a * a^γ)(x) / a^γ(x)` at each probe.
pub fn kernel_ratio(kernel: &KernelSpec, gamma: f64, xs: &[f64]) -> Result<Vec<f64>> {
    let alpha = kernel.alpha;
    if !(gamma > 1.0 / (2.0 * alpha) && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma must lie in (1/(2α), 1), got {gamma}")));
    }
    xs.iter()
        .map(|&x| {
            let f = |y: f64| kernel.eval(x - y) * kernel.eval(y).powf(gamma);
            Ok(convolve_line(f, x)? / kernel.eval(x).powf(gamma))
        })
        .collect()
}

/// `∫_ℝ f` for an integrand concentrated near `0` and `x`, with geometric
/// breakpoints in between so the adaptive rule sees both peaks.
fn convolve_line(f: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    convolve_line_with(f, x, &[])
}

fn convolve_line_with(f: impl Fn(f64) -> f64, x: f64, extra: &[f64]) -> Result<f64> {
    let span = x.abs().max(1.0);
    let mut pts = vec![0.0, x];
    for k in 0..=((span.log10() * 2.0).ceil() as i32 + 2) {
        let d = 10f64.powf(k as f64 / 2.0 - 1.0);
        for c in [0.0, x] {
            pts.push(c - d);
            pts.push(c + d);
        }
    }
    pts.extend_from_slice(extra);
    let pts = breakpoints(pts);
    let lo = pts[0];
    let hi = pts[pts.len() - 1];
    let mid = integrate_points(&f, &pts, quad_tol())?.value;
    let right = integrate_to_inf(&f, hi, quad_tol())?.value;
    let left = integrate_to_inf(|y| f(-y), -lo, quad_tol())?.value;
    Ok(left + mid + right)
}

/// `min{λ, a^γ(x)}`.
#[derive(Clone, Debug)]
pub struct CappedPower {
    pub kernel: KernelSpec,
    pub gamma: f64,
    pub lambda: f64,
}

impl CappedPower {
    pub fn eval(&self, x: f64) -> f64 {
        self.kernel.eval(x).powf(self.gamma).min(self.lambda)
    }

    /// `|x|` at which `a^γ = λ`, if the cap is active anywhere.
    pub fn kink(&self) -> Option<f64> {
        let a_level = self.lambda.powf(1.0 / self.gamma);
        let c = self.kernel.c_alpha;
        if a_level >= c {
            return None;
        }
        Some(((c / a_level).powf(1.0 / self.kernel.alpha) - 1.0).sqrt())
    }

    pub fn convolve(&self, x: f64) -> Result<f64> {
        let extra: Vec<f64> = self.kink().map(|k| vec![-k, k, x - k, x + k]).unwrap_or_default();
        convolve_line_with(|y| self.kernel.eval(x - y) * self.eval(y), x, &extra)
    }

    /// Largest `(a * ω)(x) / ω(x) - (1 + δ)` over the probes.
    pub fn worst_excess(&self, delta: f64, probes: &[f64]) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for &x in probes {
            let w = self.eval(x);
            worst = worst.max(self.convolve(x)? / w - (1.0 + delta));
        }
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LambdaSearchConfig {
    pub x_max: f64,
    pub per_decade: usize,
    pub lambda_min: f64,
}

impl Default for LambdaSearchConfig {
    fn default() -> Self {
        LambdaSearchConfig {
            x_max: 1e6,
            per_decade: 24,
            lambda_min: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaSearch {
    pub lambda: f64,
    pub halvings: u32,
    /// Worst `ratio - (1 + δ)` on the search probes.
    pub worst_excess: f64,
    /// The same on a probe grid twice as dense.
    pub reverified_excess: f64,
}

fn lambda_probes(cfg: &LambdaSearchConfig, per_decade: usize) -> Vec<f64> {
    let mut xs = vec![0.0];
    xs.extend(log_grid(1e-3, cfg.x_max, per_decade));
    xs
}

/// Halves `λ` from `a(0)^γ` until `a * ω_λ ≤ (1 + δ) ω_λ` at every probe of
/// a log-spaced grid on `[0, x_max]`, then re-checks on a twice denser grid.
pub fn find_lambda(alpha: f64, gamma: f64, delta: f64, cfg: &LambdaSearchConfig) -> Result<LambdaSearch> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(gamma > 1.0 / (2.0 * alpha) && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma must lie in (1/(2α), 1), got {gamma}")));
    }
    let kernel = KernelSpec::continuous(alpha)?;
    let probes = lambda_probes(cfg, cfg.per_decade);
    let mut w = CappedPower {
        lambda: kernel.c_alpha.powf(gamma),
        kernel,
        gamma,
    };
    let mut halvings = 0;
    while w.lambda >= cfg.lambda_min {
        let worst = w.worst_excess(delta, &probes)?;
        if worst <= 0.0 {
            let fine = lambda_probes(cfg, 2 * cfg.per_decade);
            let re = w.worst_excess(delta, &fine)?;
            if re <= 0.0 {
                return Ok(LambdaSearch {
                    lambda: w.lambda,
                    halvings,
                    worst_excess: worst,
                    reverified_excess: re,
                });
            }
        }
        w.lambda *= 0.5;
        halvings += 1;
    }
    Err(Error::NotFound(format!(
        "no λ ≥ {:e} satisfies the weighted bound for α = {alpha}, γ = {gamma}, δ = {delta}",
        cfg.lambda_min
    )))
}

/// Weight `ϖ` for the weighted sup norm `‖f‖ = sup |f| / ϖ`.
#[derive(Clone, Debug)]
pub enum Weight {
    Capped(CappedPower),
    /// `∫_x^∞ a`.
    Tail(KernelSpec),
}

impl Weight {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Weight::Capped(w) => w.eval(x),
            Weight::Tail(k) => k.tail(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub nu: f64,
    pub initial_norm: f64,
    /// `max_t (‖u_t‖ - ‖u_0‖ e^{νt})⁺`.
    pub max_excess: f64,
    /// The same divided by `‖u_0‖ e^{νt}`, at the frame attaining the maximum.
    pub max_relative_excess: f64,
    /// Cells skipped because the weight vanished there.
    pub excluded_cells: usize,
    pub frames: usize,
}

/// Tracks `sup u / ϖ` against `‖u_0‖ e^{ν t}` frame by frame.
pub struct GrowthMonitor {
    weights: Vec<f64>,
    t0: f64,
    report: GrowthReport,
}

impl GrowthMonitor {
    pub fn new(weight: &Weight, nu: f64, initial: &MesoField) -> Self {
        let weights: Vec<f64> = initial.grid.xs().iter().map(|&x| weight.eval(x)).collect();
        let excluded_cells = weights.iter().filter(|&&w| !(w > 0.0)).count();
        let mut m = GrowthMonitor {
            weights,
            t0: initial.t,
            report: GrowthReport {
                nu,
                initial_norm: 0.0,
                max_excess: 0.0,
                max_relative_excess: 0.0,
                excluded_cells,
                frames: 0,
            },
        };
        m.report.initial_norm = m.norm(initial);
        m
    }

    pub fn norm(&self, field: &MesoField) -> f64 {
        field
            .u
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&u, &w)| u / w)
            .fold(0.0, f64::max)
    }

    pub fn observe(&mut self, field: &MesoField) {
        let bound = self.report.initial_norm * (self.report.nu * (field.t - self.t0)).exp();
        let excess = (self.norm(field) - bound).max(0.0);
        if excess > self.report.max_excess {
            self.report.max_excess = excess;
            self.report.max_relative_excess = excess / bound;
        }
        self.report.frames += 1;
    }

    pub fn report(&self) -> &GrowthReport {
        &self.report
    }
}

/// Weighted-norm excess over a stored sequence of frames.
pub fn growth_bound_check(frames: &[MesoField], weight: &Weight, nu: f64) -> Result<GrowthReport> {
    let first = frames.first().ok_or_else(|| Error::Config("no frames to check".into()))?;
    let mut m = GrowthMonitor::new(weight, nu, first);
    for f in frames {
        m.observe(f);
    }
    Ok(m.report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `max (u1 - u2)⁺` over all steps and cells.
    pub max_order_violation: f64,
    /// Largest pointwise decrease of either solution between consecutive steps.
    pub max_decrease: f64,
    pub steps: usize,
}

/// Evolves two ordered initial fields with the same solver and reports any
/// loss of ordering or of monotonicity in time.
pub fn comparison_check(
    solver: &mut MesoSolver,
    lower: &MesoField,
    upper: &MesoField,
    horizon: f64,
    dt: f64,
) -> Result<ComparisonReport> {
    if lower.u.iter().zip(&upper.u).any(|(a, b)| a > b) {
        return Err(Error::Domain("initial data must be ordered pointwise".into()));
    }
    let mut u1 = lower.clone();
    let mut u2 = upper.clone();
    let n_steps = (horizon / dt - 1e-9).ceil().max(0.0) as usize;
    let h = if n_steps > 0 { horizon / n_steps as f64 } else { 0.0 };
    let mut rep = ComparisonReport {
        max_order_violation: 0.0,
        max_decrease: 0.0,
        steps: n_steps,
    };
    let mut prev1 = u1.u.clone();
    let mut prev2 = u2.u.clone();
    for _ in 0..n_steps {
        solver.step(&mut u1, h)?;
        solver.step(&mut u2, h)?;
        for i in 0..u1.u.len() {
            rep.max_order_violation = rep.max_order_violation.max(u1.u[i] - u2.u[i]);
            rep.max_decrease = rep.max_decrease.max(prev1[i] - u1.u[i]).max(prev2[i] - u2.u[i]);
        }
        prev1.copy_from_slice(&u1.u);
        prev2.copy_from_slice(&u2.u);
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HairTriggerReport {
    pub radius: f64,
    pub thresholds: Vec<f64>,
    /// First frame time at which `min_{|x| ≤ r} u ≥ threshold`; `None` if the
    /// horizon ran out first.
    pub t_hit: Vec<Option<f64>>,
}

/// Records, for each threshold, the first frame at which the solution
/// exceeds it throughout the ball of radius `r`.
pub fn hair_trigger_check(
    solver: &mut MesoSolver,
    initial: &MesoField,
    radius: f64,
    thresholds: &[f64],
    horizon: f64,
    dt: f64,
    frame_interval: f64,
) -> Result<HairTriggerReport> {
    let ball: Vec<usize> = (0..initial.u.len())
        .filter(|&i| initial.grid.x(i).abs() <= radius)
        .collect();
    if ball.is_empty() {
        return Err(Error::Config("the ball contains no grid cells".into()));
    }
    let mut t_hit = vec![None; thresholds.len()];
    let mut field = initial.clone();
    solver.solve(&mut field, horizon, dt, frame_interval, |f| {
        let m = ball.iter().map(|&i| f.u[i]).fold(f64::INFINITY, f64::min);
        for (hit, &th) in t_hit.iter_mut().zip(thresholds) {
            if hit.is_none() && m >= th {
                *hit = Some(f.t);
            }
        }
    })?;
    Ok(HairTriggerReport {
        radius,
        thresholds: thresholds.to_vec(),
        t_hit,
    })
}

/// Solves from `initial` and records the fronts at `level` on every frame.
pub fn trace_front(
    solver: &mut MesoSolver,
    initial: &MesoField,
    level: f64,
    horizon: f64,
    dt: f64,
    frame_interval: f64,
) -> Result<FrontTrace> {
    let mut trace = FrontTrace::new(level);
    let mut field = initial.clone();
    solver.solve(&mut field, horizon, dt, frame_interval, |f| trace.push(f))?;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meso::{Closure, GridSpec, InitialCondition};

    fn prof(which: Profile, alpha: f64, eps: f64) -> AveragedProfile {
        AveragedProfile { which, alpha, eps, l: 1.0 }
    }

    #[test]
    fn averaged_profile_matches_quadrature() {
        for which in [Profile::G, Profile::H] {
            let p = prof(which, 1.5, 0.3);
            for &t in &[0.0, 2.0, 7.5] {
                for &x in &[-3.0, -0.2, 0.0, 0.4, 1.3, p.radius(t) * 1.05, 50.0, 1e4] {
                    // Split at the saturation time so the kink is a panel edge.
                    let mut pts = vec![t, t + 1.0];
                    if let Some(la) = p.log_amplitude(x) {
                        pts.push((-la / p.rate()).clamp(t, t + 1.0));
                    }
                    let exact = integrate_points(|s| p.point(x, s), &breakpoints(pts), Tolerance::default())
                        .unwrap()
                        .value;
                    assert!((p.value(x, t) - exact).abs() < 1e-10, "{which:?} x {x} t {t}: {} vs {exact}", p.value(x, t));
                }
            }
        }
    }

    #[test]
    fn profile_convolution_matches_direct_quadrature() {
        let k = KernelSpec::continuous(1.0).unwrap();
        for which in [Profile::G, Profile::H] {
            let p = prof(which, 1.0, 0.5);
            let t = 6.0;
            for &x in &[-5.0, 0.0, 3.0, p.radius(t), 12.0, 300.0] {
                let f = |y: f64| k.eval(x - y) * p.value(y, t);
                let mut pts = vec![x, 0.0];
                pts.extend([-1.0, 1.0].map(|s| s * p.radius(t)));
                pts.extend([-1.0, 1.0].map(|s| s * p.radius(t + 1.0)));
                let direct = crate::quad::integrate_line(f, &breakpoints(pts), quad_tol()).unwrap().value;
                let fast = p.convolve(&k, x, t).unwrap();
                assert!((fast - direct).abs() < 1e-9, "{which:?} x {x}: {fast} vs {direct}");
            }
        }
    }

    #[test]
    fn h_profile_is_strict_on_the_negative_half_line() {
        let k = KernelSpec::continuous(1.0).unwrap();
        let p = prof(Profile::H, 1.0, 0.5);
        for &x in &[-100.0, -1.0, -1e-3, 0.0] {
            assert!(p.violation(&k, x, 3.0).unwrap() < 0.0);
        }
    }

    #[test]
    fn g_onset_scan_holds_after_onset() {
        let cfg = OnsetScanConfig {
            t_max: 20.0,
            ..Default::default()
        };
        let scan = scan_subsolution(Profile::G, 1.0, 0.5, &cfg).unwrap();
        assert!(scan.passed(1e-6), "{scan:?}");
        // Early times are recorded whatever their sign.
        let early = prof(Profile::G, 1.0, 0.5).max_violation(&KernelSpec::continuous(1.0).unwrap(), 0.01);
        assert!(early.unwrap().is_finite());
    }

    #[test]
    fn kernel_ratio_tends_to_one() {
        let k = KernelSpec::continuous(1.0).unwrap();
        let r = kernel_ratio(&k, 0.9, &[0.0, 1e2, 1e4, 1e6]).unwrap();
        assert!(r[0].is_finite() && r[0] > 0.0);
        assert!((r[2] - 1.0).abs() < (r[1] - 1.0).abs(), "{r:?}");
        assert!((0.9..=1.1).contains(&r[3]), "{r:?}");
    }

    #[test]
    fn kernel_ratio_rejects_small_gamma() {
        let k = KernelSpec::continuous(1.0).unwrap();
        assert!(kernel_ratio(&k, 0.4, &[1.0]).is_err());
    }

    #[test]
    fn capped_weight_is_bounded_by_cap() {
        let w = CappedPower {
            kernel: KernelSpec::continuous(1.0).unwrap(),
            gamma: 0.9,
            lambda: 0.05,
        };
        let kink = w.kink().unwrap();
        assert!((w.kernel.eval(kink).powf(0.9) - 0.05).abs() < 1e-12);
        for &x in &[0.0, 0.5, kink * 0.9, kink * 0.99] {
            // Where ω = λ, a * ω ≤ λ = ω.
            assert!(w.convolve(x).unwrap() <= w.eval(x) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn lambda_search_and_monotonicity_in_delta() {
        let cfg = LambdaSearchConfig {
            per_decade: 8,
            ..Default::default()
        };
        let strict = find_lambda(1.0, 0.9, 0.1, &cfg).unwrap();
        let loose = find_lambda(1.0, 0.9, 0.9, &cfg).unwrap();
        assert!(loose.lambda >= strict.lambda, "{loose:?} {strict:?}");
        assert!(strict.reverified_excess <= 0.0);
    }

    #[test]
    fn growth_excess_is_zero_on_the_initial_frame() {
        let k = KernelSpec::continuous(1.0).unwrap();
        let g = GridSpec::new(-100.0, 100.0, 1024).unwrap();
        let f = MesoField::from_initial(g, &InitialCondition::Kernel { scale: 1.0 }, &k).unwrap();
        let w = Weight::Capped(CappedPower {
            kernel: k,
            gamma: 0.9,
            lambda: 0.1,
        });
        let rep = growth_bound_check(&[f], &w, 1.5).unwrap();
        assert_eq!(rep.max_excess, 0.0);
        assert_eq!(rep.excluded_cells, 0);
    }

    #[test]
    fn comparison_of_identical_and_trivial_pairs() {
        let k = KernelSpec::continuous(1.0).unwrap();
        let g = GridSpec::new(-64.0, 64.0, 512).unwrap();
        let mut s = MesoSolver::new(&k, &g, 1e-1).unwrap();
        let bump = MesoField::from_initial(
            g.clone(),
            &InitialCondition::Bump {
                height: 1.0,
                half_width: 1.0,
            },
            &k,
        )
        .unwrap();
        let rep = comparison_check(&mut s, &bump, &bump, 2.0, 0.1).unwrap();
        assert_eq!(rep.max_order_violation, 0.0);
        let zero = MesoField::from_fn(g, |_| 0.0).unwrap();
        let rep = comparison_check(&mut s, &zero, &bump, 2.0, 0.1).unwrap();
        assert_eq!(rep.max_order_violation, 0.0);
        assert_eq!(rep.max_decrease, 0.0);
        assert!(comparison_check(&mut s, &bump, &zero, 1.0, 0.1).is_err());
    }

    #[test]
    fn hair_trigger_hits_are_ordered() {
        let k = KernelSpec::continuous(1.0).unwrap();
        let g = GridSpec::new(-256.0, 256.0, 4096)
            .unwrap()
            .with_closures(Closure::Zero, Closure::Zero);
        let mut s = MesoSolver::new(&k, &g, 1e-2).unwrap();
        let f = MesoField::from_initial(
            g,
            &InitialCondition::Bump {
                height: 0.1,
                half_width: 1.0,
            },
            &k,
        )
        .unwrap();
        let rep = hair_trigger_check(&mut s, &f, 0.5, &[0.05, 0.5, 2.0], 12.0, 0.1, 0.1).unwrap();
        assert_eq!(rep.t_hit[0], Some(0.0));
        let hits: Vec<f64> = rep.t_hit.iter().map(|t| t.expect("threshold reached")).collect();
        assert!(hits.windows(2).all(|w| w[0] <= w[1]), "{hits:?}");
    }
}
