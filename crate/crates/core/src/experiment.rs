//! Experiment configuration, batch execution and run manifests.
//!
//! A configuration is a TOML file (or the `config` field of a previous
//! `manifest.json`); command-line flags override it. Each run writes its
//! artifacts into the output directory plus a `manifest.json` holding the full
//! configuration, a digest of the executing binary, the seeds and wall time.
//! Re-running a manifest's configuration reproduces every artifact byte for
//! byte.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{fit_exponential_rate, fit_linear_speed, fit_speed_trend, superlinearity_statistic};
use crate::continuum::{simulate_continuum, ContinuumSimConfig};
use crate::error::{check_alpha, Error, Result};
use crate::kernel::KernelSpec;
use crate::lattice::gamma::rectangle_minimum;
use crate::lattice::{couple_xi_zeta, simulate, simulate_gamma, CouplingConfig, LatticeParams, LatticeSimConfig};
use crate::meso::{Closure, FrontTrace, GridSpec, InitialCondition, MesoField, MesoSolver};
use crate::output::{self, SummaryRow};
use crate::rng::derive_seed;
use crate::verify::{self, Suite};

pub const THREADS_ENV: &str = "TRUNCFRONT_THREADS";
pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Lattice,
    Continuum,
    Gamma,
    Coupled,
    Meso,
    Analyze,
    Verify,
}

impl Mode {
    fn stochastic(self) -> bool {
        matches!(self, Mode::Lattice | Mode::Continuum | Mode::Gamma | Mode::Coupled)
    }
}

/// Explicit seeds, or `runs` seeds derived from `master_seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeedSpec {
    pub seeds: Option<Vec<u64>>,
    pub master_seed: u64,
    pub runs: u64,
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec {
            seeds: None,
            master_seed: 42,
            runs: 1,
        }
    }
}

impl SeedSpec {
    pub fn resolve(&self) -> Vec<u64> {
        match &self.seeds {
            Some(s) => s.clone(),
            None => (0..self.runs).map(|i| derive_seed(self.master_seed, i)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatticeSection {
    pub eps_tail: f64,
    pub k_cut_max: usize,
    pub max_sites: usize,
    pub rate_multiplier: f64,
    pub track_q: bool,
}

impl Default for LatticeSection {
    fn default() -> Self {
        let p = LatticeParams::default();
        LatticeSection {
            eps_tail: p.eps_tail,
            k_cut_max: p.k_cut_max,
            max_sites: p.max_sites,
            rate_multiplier: p.rate_multiplier,
            track_q: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoupledSection {
    pub depth: usize,
    pub max_jump: usize,
    pub events: u64,
}

impl Default for CoupledSection {
    fn default() -> Self {
        let c = CouplingConfig::default();
        CoupledSection {
            depth: c.depth,
            max_jump: c.max_jump,
            events: c.events,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MesoSection {
    pub init: InitialCondition,
    /// `log2` of the number of cells.
    pub cells_log2: u32,
    /// Half-width of the domain; sized from the predicted front when absent.
    pub half_width: Option<f64>,
    /// Safety exponent in the domain sizing `1.2 exp((1 + eps) T rate)`.
    pub domain_eps: f64,
    pub dt: f64,
    pub frame_interval: f64,
    pub level: f64,
    /// Write every `frame_stride`-th frame to disk; 0 writes only the first and last.
    pub frame_stride: usize,
    pub mass_tol: f64,
}

impl Default for MesoSection {
    fn default() -> Self {
        MesoSection {
            init: InitialCondition::Bump {
                height: 1.0,
                half_width: 1.0,
            },
            cells_log2: 16,
            half_width: None,
            domain_eps: 0.3,
            dt: 0.1,
            frame_interval: 0.5,
            level: 0.5,
            frame_stride: 0,
            mass_tol: 1e-6,
        }
    }
}

impl MesoSection {
    /// Monotone data carrying mass at `-∞` need the left plateau closure and
    /// spread at rate `1/(2α - 1)`; localized data at `1/(2α)`.
    pub fn grid(&self, alpha: f64, horizon: f64) -> Result<GridSpec> {
        let monotone = matches!(self.init, InitialCondition::Step { .. });
        let n = 1usize
            .checked_shl(self.cells_log2)
            .ok_or_else(|| Error::Config("cells_log2 too large".into()))?;
        let g = match self.half_width {
            Some(l) => GridSpec::new(-l, l, n)?,
            None => {
                let rate = if monotone {
                    1.0 / (2.0 * alpha - 1.0)
                } else {
                    1.0 / (2.0 * alpha)
                };
                GridSpec::sized_for_front(rate, self.domain_eps, horizon, n)?
            }
        };
        Ok(if monotone {
            g.with_closures(Closure::Plateau, Closure::Zero)
        } else {
            g
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyzeSection {
    /// Trajectory or front-trace CSV files.
    pub inputs: Vec<PathBuf>,
    pub window: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub seeds: SeedSpec,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_sample_interval")]
    pub sample_interval: f64,
    #[serde(default)]
    pub event_budget: Option<u64>,
    #[serde(default)]
    pub lattice: LatticeSection,
    #[serde(default)]
    pub coupled: CoupledSection,
    #[serde(default)]
    pub meso: MesoSection,
    #[serde(default)]
    pub analyze: AnalyzeSection,
    #[serde(default)]
    pub suite: Suite,
}

fn default_alpha() -> f64 {
    3.0
}
fn default_horizon() -> f64 {
    100.0
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_sample_interval() -> f64 {
    0.5
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        ExperimentConfig {
            mode,
            alpha: default_alpha(),
            horizon: default_horizon(),
            seeds: SeedSpec::default(),
            output_dir: default_output(),
            sample_interval: default_sample_interval(),
            event_budget: None,
            lattice: LatticeSection::default(),
            coupled: CoupledSection::default(),
            meso: MesoSection::default(),
            analyze: AnalyzeSection::default(),
            suite: Suite::default(),
        }
    }

    /// Reads a TOML configuration, or the `config` field of a manifest when
    /// the file ends in `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            let m: Manifest = serde_json::from_str(&text)?;
            Ok(m.config)
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode != Mode::Analyze && self.mode != Mode::Verify {
            check_alpha(self.alpha)?;
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon must be finite and >= 0, got {}", self.horizon)));
        }
        if self.mode.stochastic() && self.seeds.resolve().is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.mode == Mode::Analyze && self.analyze.inputs.is_empty() {
            return Err(Error::Config("analyze needs at least one input file".into()));
        }
        Ok(())
    }

    pub fn lattice_config(&self) -> LatticeSimConfig {
        LatticeSimConfig {
            params: LatticeParams {
                alpha: self.alpha,
                eps_tail: self.lattice.eps_tail,
                k_cut_max: self.lattice.k_cut_max,
                max_sites: self.lattice.max_sites,
                rate_multiplier: self.lattice.rate_multiplier,
            },
            horizon: self.horizon,
            sample_interval: self.sample_interval,
            event_budget: self.event_budget,
            track_q: self.lattice.track_q,
        }
    }

    pub fn continuum_config(&self) -> ContinuumSimConfig {
        ContinuumSimConfig {
            alpha: self.alpha,
            horizon: self.horizon,
            sample_interval: self.sample_interval,
            event_budget: self.event_budget,
        }
    }

    pub fn coupling_config(&self) -> CouplingConfig {
        CouplingConfig {
            alpha: self.alpha,
            depth: self.coupled.depth,
            max_jump: self.coupled.max_jump,
            events: self.coupled.events,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStatus {
    pub seed: Option<u64>,
    pub ok: bool,
    pub error: Option<String>,
    pub files: Vec<String>,
    /// Set when a run ended before its horizon.
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub version: String,
    /// SHA-256 of the executing binary.
    pub code_digest: String,
    pub seeds: Vec<u64>,
    pub runs: Vec<RunStatus>,
    pub wall_time_secs: f64,
    pub ok: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Refuse to write into a directory that already holds a manifest.
    pub no_clobber: bool,
}

/// Digest of the running executable, or of the crate version if the binary
/// cannot be read.
pub fn code_digest() -> String {
    let bytes = std::env::current_exe()
        .and_then(std::fs::read)
        .unwrap_or_else(|_| env!("CARGO_PKG_VERSION").as_bytes().to_vec());
    let d = Sha256::digest(&bytes);
    d.iter().map(|b| format!("{b:02x}")).collect()
}

/// Worker count from `TRUNCFRONT_THREADS`, defaulting to the available cores.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f` over `items` on at most [`thread_count`] workers, returning
/// results in input order.
pub fn batch<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = thread_count();
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

fn status_ok(seed: Option<u64>, files: Vec<String>, note: Option<String>) -> RunStatus {
    RunStatus {
        seed,
        ok: true,
        error: None,
        files,
        note,
    }
}

fn status_err(seed: Option<u64>, e: &Error) -> RunStatus {
    RunStatus {
        seed,
        ok: false,
        error: Some(e.to_string()),
        files: Vec::new(),
        note: None,
    }
}

/// Executes the configuration and writes its artifacts and manifest.
pub fn run(config: &ExperimentConfig, opts: RunOptions) -> Result<Manifest> {
    config.validate()?;
    let dir = &config.output_dir;
    let manifest_path = dir.join(MANIFEST);
    if manifest_path.exists() {
        if opts.no_clobber {
            return Err(Error::Config(format!(
                "{} already exists (--no-clobber)",
                manifest_path.display()
            )));
        }
        log::warn!("overwriting results in {}", dir.display());
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let start = Instant::now();
    let seeds = if config.mode.stochastic() {
        config.seeds.resolve()
    } else {
        Vec::new()
    };
    let runs = match config.mode {
        Mode::Lattice => run_lattice(config, &seeds),
        Mode::Continuum => run_continuum(config, &seeds),
        Mode::Gamma => run_gamma(config, &seeds),
        Mode::Coupled => vec![run_coupled(config, &seeds)],
        Mode::Meso => vec![run_meso(config)],
        Mode::Analyze => vec![run_analyze(config)],
        Mode::Verify => vec![run_verify(config)],
    };
    let ok = runs.iter().all(|r| r.ok);
    let manifest = Manifest {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        code_digest: code_digest(),
        seeds,
        runs,
        wall_time_secs: start.elapsed().as_secs_f64(),
        ok,
    };
    output::write_json(&manifest_path, &manifest)?;
    Ok(manifest)
}

fn run_lattice(config: &ExperimentConfig, seeds: &[u64]) -> Vec<RunStatus> {
    let cfg = config.lattice_config();
    let results = batch(seeds, |&s| simulate(&cfg, s));
    results
        .into_iter()
        .zip(seeds)
        .map(|(r, &seed)| {
            let write = |run: &crate::lattice::LatticeRun| -> Result<RunStatus> {
                let name = output::lattice_file_name(config.alpha, seed);
                output::write_trajectory_csv(&config.output_dir.join(&name), &run.trajectory)?;
                Ok(status_ok(Some(seed), vec![name], run.note.clone()))
            };
            r.and_then(|run| write(&run)).unwrap_or_else(|e| status_err(Some(seed), &e))
        })
        .collect()
}

fn run_continuum(config: &ExperimentConfig, seeds: &[u64]) -> Vec<RunStatus> {
    let cfg = config.continuum_config();
    let results = batch(seeds, |&s| simulate_continuum(&cfg, s));
    results
        .into_iter()
        .zip(seeds)
        .map(|(r, &seed)| {
            r.and_then(|run| {
                let name = output::continuum_file_name(config.alpha, seed);
                output::write_trajectory_csv(&config.output_dir.join(&name), &run.trajectory)?;
                Ok(status_ok(Some(seed), vec![name], None))
            })
            .unwrap_or_else(|e| status_err(Some(seed), &e))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSummary {
    pub seed: u64,
    pub horizon: f64,
    /// `min_{0 ≤ x ≤ t/4} γ_t(x)`.
    pub rectangle_minimum: u64,
    /// `t / 10`.
    pub threshold: f64,
    pub pass: bool,
}

fn run_gamma(config: &ExperimentConfig, seeds: &[u64]) -> Vec<RunStatus> {
    let t = config.horizon;
    let results = batch(seeds, |&s| simulate_gamma(t, config.sample_interval, s));
    let mut summaries = Vec::new();
    let mut statuses: Vec<RunStatus> = results
        .into_iter()
        .zip(seeds)
        .map(|(r, &seed)| {
            r.and_then(|run| {
                let name = output::gamma_file_name(seed);
                let counts = format!("gamma_counts_{seed}.csv");
                output::write_gamma_csv(&config.output_dir.join(&name), &run)?;
                output::write_counts_csv(&config.output_dir.join(&counts), &run.counts)?;
                let m = rectangle_minimum(&run.counts, (t / 4.0).floor() as usize);
                summaries.push(GammaSummary {
                    seed,
                    horizon: t,
                    rectangle_minimum: m,
                    threshold: t / 10.0,
                    pass: m as f64 >= t / 10.0,
                });
                Ok(status_ok(Some(seed), vec![name, counts], None))
            })
            .unwrap_or_else(|e| status_err(Some(seed), &e))
        })
        .collect();
    if let Err(e) = output::write_json(&config.output_dir.join("gamma_summary.json"), &summaries) {
        statuses.push(status_err(None, &e));
    }
    statuses
}

fn run_coupled(config: &ExperimentConfig, seeds: &[u64]) -> RunStatus {
    let name = "domination_report.json".to_string();
    couple_xi_zeta(&config.coupling_config(), seeds)
        .and_then(|rep| {
            output::write_json(&config.output_dir.join(&name), &rep)?;
            if rep.violations > 0 {
                return Err(Error::Logic(format!("{} prefix-sum violations", rep.violations)));
            }
            Ok(status_ok(None, vec![name], None))
        })
        .unwrap_or_else(|e| status_err(None, &e))
}

/// Solves the grid equation, storing frames, the front trace and a fit of
/// the front's exponential rate.
pub fn solve_meso(config: &ExperimentConfig) -> Result<Vec<String>> {
    let m = &config.meso;
    let kernel = KernelSpec::continuous(config.alpha)?;
    let grid = m.grid(config.alpha, config.horizon)?;
    let mut solver = MesoSolver::new(&kernel, &grid, m.mass_tol)?;
    let mut field = MesoField::from_initial(grid, &m.init, &kernel)?;
    let mut trace = FrontTrace::new(m.level);
    let frames_dir = config.output_dir.join("frames");
    let mut files = Vec::new();
    let mut index = 0usize;
    let mut last = None;
    let mut write_err = None;
    let result = solver.solve(&mut field, config.horizon, m.dt, m.frame_interval, |f| {
        trace.push(f);
        let keep = index == 0 || (m.frame_stride > 0 && index.is_multiple_of(m.frame_stride));
        if keep {
            let name = output::frame_file_name(index);
            match output::write_frame_csv(&frames_dir.join(&name), f) {
                Ok(()) => files.push(format!("frames/{name}")),
                Err(e) => write_err = Some(e),
            }
        }
        last = Some(index);
        index += 1;
    });
    if let Err(e) = result {
        // Keep the last good state for inspection.
        let _ = output::write_frame_csv(&config.output_dir.join("failed_frame.csv"), &field);
        return Err(e);
    }
    if let Some(e) = write_err {
        return Err(e);
    }
    if let Some(i) = last {
        let name = output::frame_file_name(i);
        if !files.iter().any(|f| f.ends_with(&name)) {
            output::write_frame_csv(&frames_dir.join(&name), &field)?;
            files.push(format!("frames/{name}"));
        }
    }
    output::write_front_csv(&config.output_dir.join("front.csv"), &trace)?;
    files.push("front.csv".into());
    if let Ok(fit) = fit_exponential_rate(&trace, None) {
        output::write_json(&config.output_dir.join("front_fit.json"), &fit)?;
        files.push("front_fit.json".into());
    }
    Ok(files)
}

fn run_meso(config: &ExperimentConfig) -> RunStatus {
    solve_meso(config)
        .map(|files| status_ok(None, files, None))
        .unwrap_or_else(|e| status_err(None, &e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileAnalysis {
    pub input: PathBuf,
    pub kind: String,
    pub linear_speed: Option<crate::analysis::SpeedFit>,
    pub speed_trend: Option<crate::analysis::SpeedFit>,
    pub doubling_ratios: Vec<crate::analysis::DoublingRatio>,
    pub exponential_rate: Option<crate::analysis::SpeedFit>,
    pub error: Option<String>,
}

fn analyze_file(path: &Path, window: Option<(f64, f64)>) -> FileAnalysis {
    let mut fa = FileAnalysis {
        input: path.to_path_buf(),
        kind: String::new(),
        linear_speed: None,
        speed_trend: None,
        doubling_ratios: Vec::new(),
        exponential_rate: None,
        error: None,
    };
    let res: Result<()> = (|| {
        if let Ok(tr) = output::read_front_csv(path) {
            fa.kind = "front".into();
            fa.exponential_rate = Some(fit_exponential_rate(&tr, window)?);
            return Ok(());
        }
        let tr = output::read_trajectory_csv(path)?;
        fa.kind = format!("{:?}", tr.kind).to_lowercase();
        fa.linear_speed = Some(fit_linear_speed(&tr, window)?);
        fa.speed_trend = fit_speed_trend(&tr, window).ok();
        fa.doubling_ratios = superlinearity_statistic(&tr);
        Ok(())
    })();
    if let Err(e) = res {
        fa.error = Some(e.to_string());
    }
    fa
}

/// `α` from names like `lattice_2.5_<seed>.csv`.
fn alpha_from_name(path: &Path) -> Option<f64> {
    let stem = path.file_stem()?.to_str()?;
    let mut parts = stem.split('_');
    match parts.next()? {
        "lattice" | "continuum" => parts.next()?.parse().ok(),
        _ => None,
    }
}

fn run_analyze(config: &ExperimentConfig) -> RunStatus {
    let results: Vec<FileAnalysis> = config
        .analyze
        .inputs
        .iter()
        .map(|p| analyze_file(p, config.analyze.window))
        .collect();
    let rows: Vec<SummaryRow> = results
        .iter()
        .filter_map(|r| {
            let fit = r.exponential_rate.as_ref().or(r.linear_speed.as_ref())?;
            Some(SummaryRow {
                check: format!("{}:{}", r.kind, r.input.display()),
                alpha: alpha_from_name(&r.input).unwrap_or(config.alpha),
                slope: fit.slope,
                stderr: fit.stderr,
                pass: r.error.is_none() && !fit.curved,
            })
        })
        .collect();
    let res = (|| -> Result<Vec<String>> {
        output::write_json(&config.output_dir.join("analysis.json"), &results)?;
        let summary = config.output_dir.join("summary.csv");
        if summary.exists() {
            std::fs::remove_file(&summary).map_err(|e| Error::io(&summary, e))?;
        }
        output::append_summary(&summary, &rows)?;
        Ok(vec!["analysis.json".into(), "summary.csv".into()])
    })();
    match res {
        Ok(files) if results.iter().all(|r| r.error.is_none()) => status_ok(None, files, None),
        Ok(files) => RunStatus {
            seed: None,
            ok: false,
            error: Some("some inputs could not be analysed".into()),
            files,
            note: None,
        },
        Err(e) => status_err(None, &e),
    }
}

fn run_verify(config: &ExperimentConfig) -> RunStatus {
    let report = verify::run_suite(config.suite, &config.output_dir);
    let name = "verify_report.json".to_string();
    match output::write_json(&config.output_dir.join(&name), &report) {
        Ok(()) if report.pass => status_ok(None, vec![name], None),
        Ok(()) => RunStatus {
            seed: None,
            ok: false,
            error: Some("verification failed".into()),
            files: vec![name],
            note: None,
        },
        Err(e) => status_err(None, &e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_is_read_from_file_names() {
        assert_eq!(alpha_from_name(Path::new("out/lattice_2.5_17.csv")), Some(2.5));
        assert_eq!(alpha_from_name(Path::new("continuum_3_1.csv")), Some(3.0));
        assert_eq!(alpha_from_name(Path::new("front.csv")), None);
    }

    #[test]
    fn seeds_resolve() {
        let s = SeedSpec {
            seeds: None,
            master_seed: 42,
            runs: 3,
        };
        assert_eq!(s.resolve(), vec![derive_seed(42, 0), derive_seed(42, 1), derive_seed(42, 2)]);
        let s = SeedSpec {
            seeds: Some(vec![5, 6]),
            ..Default::default()
        };
        assert_eq!(s.resolve(), vec![5, 6]);
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
            mode = "lattice"
            alpha = 1.5
            horizon = 20.0
            [seeds]
            master_seed = 7
            runs = 4
            [lattice]
            track_q = true
        "#;
        let c: ExperimentConfig = toml::from_str(text).unwrap();
        assert_eq!(c.mode, Mode::Lattice);
        assert_eq!(c.seeds.resolve().len(), 4);
        assert!(c.lattice.track_q);
        assert_eq!(c.lattice.k_cut_max, LatticeParams::default().k_cut_max);
        let back: ExperimentConfig = toml::from_str(&toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn invalid_alpha_rejected() {
        let mut c = ExperimentConfig::new(Mode::Lattice);
        c.alpha = 0.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn lattice_batch_writes_manifest_and_respects_no_clobber() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig::new(Mode::Lattice);
        c.horizon = 5.0;
        c.seeds.runs = 3;
        c.output_dir = dir.path().to_path_buf();
        let m = run(&c, RunOptions::default()).unwrap();
        assert!(m.ok);
        assert_eq!(m.runs.len(), 3);
        for s in &m.seeds {
            assert!(dir.path().join(output::lattice_file_name(3.0, *s)).exists());
        }
        let back: Manifest = output::read_json(&dir.path().join(MANIFEST)).unwrap();
        assert_eq!(back.config, c);
        assert!(run(&c, RunOptions { no_clobber: true }).is_err());
    }

    #[test]
    fn meso_grid_closures_follow_init() {
        let mut m = MesoSection::default();
        assert_eq!(m.grid(1.0, 5.0).unwrap().left, Closure::Zero);
        m.init = InitialCondition::Step { height: 1.0 };
        assert_eq!(m.grid(1.0, 5.0).unwrap().left, Closure::Plateau);
    }
}
