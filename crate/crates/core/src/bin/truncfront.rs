use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use truncfront::experiment::{self, ExperimentConfig, Mode, RunOptions};
use truncfront::meso::InitialCondition;
use truncfront::verify::Suite;

#[derive(Parser)]
#[command(version, about = "Truncated branching random walks and their mesoscopic front")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the lattice process and write one trajectory CSV per seed.
    SimulateLattice {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        stochastic: Stochastic,
        /// Record the tip compensator estimate.
        #[arg(long)]
        track_q: bool,
        #[arg(long)]
        rate_multiplier: Option<f64>,
        #[arg(long)]
        eps_tail: Option<f64>,
    },
    /// Simulate the continuum process.
    SimulateContinuum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        stochastic: Stochastic,
    },
    /// Simulate the nearest-neighbour comparison process.
    SimulateGamma {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        stochastic: Stochastic,
    },
    /// Run the tip-view/dominating coupling and count order violations.
    CoupleXiZeta {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        stochastic: Stochastic,
        #[arg(long)]
        events: Option<u64>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        max_jump: Option<usize>,
    },
    /// Integrate the nonlocal equation and track its front.
    SolveMeso {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        init: Option<Init>,
        #[arg(long)]
        cells_log2: Option<u32>,
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        frame_interval: Option<f64>,
        #[arg(long)]
        level: Option<f64>,
        /// Keep every n-th frame; 0 keeps only the first and last.
        #[arg(long)]
        frame_stride: Option<usize>,
    },
    /// Fit speeds and doubling ratios to trajectory or front CSVs.
    Analyze {
        #[command(flatten)]
        common: Common,
        inputs: Vec<PathBuf>,
        /// Fit window as `lo,hi`.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        window: Option<Vec<f64>>,
    },
    /// Run the verification suite and write verify_report.json.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        suite: Option<SuiteArg>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration, or a manifest.json to re-run. Flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
    /// Refuse to overwrite an existing manifest.
    #[arg(long)]
    no_clobber: bool,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Args)]
struct Stochastic {
    /// Explicit comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    runs: Option<u64>,
    #[arg(long)]
    sample_interval: Option<f64>,
    /// Stop each run after this many births.
    #[arg(long)]
    event_budget: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Bump,
    Step,
    Kernel,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Quick,
}

fn base(mode: Mode, common: &Common) -> truncfront::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if cfg.mode != mode {
                return Err(truncfront::Error::Config(format!(
                    "{} is a {:?} configuration, not {mode:?}",
                    path.display(),
                    cfg.mode
                )));
            }
            cfg
        }
        None => ExperimentConfig::new(mode),
    };
    if let Some(d) = &common.output_dir {
        cfg.output_dir = d.clone();
    }
    if let Some(a) = common.alpha {
        cfg.alpha = a;
    }
    if let Some(t) = common.horizon {
        cfg.horizon = t;
    }
    Ok(cfg)
}

fn apply_stochastic(cfg: &mut ExperimentConfig, s: Stochastic) {
    if let Some(seeds) = s.seeds {
        cfg.seeds.seeds = Some(seeds);
    }
    if let Some(m) = s.master_seed {
        cfg.seeds.master_seed = m;
        cfg.seeds.seeds = None;
    }
    if let Some(r) = s.runs {
        cfg.seeds.runs = r;
        cfg.seeds.seeds = None;
    }
    if let Some(dt) = s.sample_interval {
        cfg.sample_interval = dt;
    }
    if s.event_budget.is_some() {
        cfg.event_budget = s.event_budget;
    }
}

fn build(command: Command) -> truncfront::Result<(ExperimentConfig, bool)> {
    let (cfg, no_clobber) = match command {
        Command::SimulateLattice {
            common,
            stochastic,
            track_q,
            rate_multiplier,
            eps_tail,
        } => {
            let mut cfg = base(Mode::Lattice, &common)?;
            apply_stochastic(&mut cfg, stochastic);
            cfg.lattice.track_q |= track_q;
            if let Some(m) = rate_multiplier {
                cfg.lattice.rate_multiplier = m;
            }
            if let Some(e) = eps_tail {
                cfg.lattice.eps_tail = e;
            }
            (cfg, common.no_clobber)
        }
        Command::SimulateContinuum { common, stochastic } => {
            let mut cfg = base(Mode::Continuum, &common)?;
            apply_stochastic(&mut cfg, stochastic);
            (cfg, common.no_clobber)
        }
        Command::SimulateGamma { common, stochastic } => {
            let mut cfg = base(Mode::Gamma, &common)?;
            apply_stochastic(&mut cfg, stochastic);
            (cfg, common.no_clobber)
        }
        Command::CoupleXiZeta {
            common,
            stochastic,
            events,
            depth,
            max_jump,
        } => {
            let mut cfg = base(Mode::Coupled, &common)?;
            apply_stochastic(&mut cfg, stochastic);
            if let Some(e) = events {
                cfg.coupled.events = e;
            }
            if let Some(d) = depth {
                cfg.coupled.depth = d;
            }
            if let Some(j) = max_jump {
                cfg.coupled.max_jump = j;
            }
            (cfg, common.no_clobber)
        }
        Command::SolveMeso {
            common,
            init,
            cells_log2,
            half_width,
            dt,
            frame_interval,
            level,
            frame_stride,
        } => {
            let mut cfg = base(Mode::Meso, &common)?;
            let m = &mut cfg.meso;
            if let Some(init) = init {
                m.init = match init {
                    Init::Bump => InitialCondition::Bump {
                        height: 1.0,
                        half_width: 1.0,
                    },
                    Init::Step => InitialCondition::Step { height: 1.0 },
                    Init::Kernel => InitialCondition::Kernel { scale: 1.0 },
                    Init::Gaussian => InitialCondition::Gaussian {
                        amplitude: 1.0,
                        center: 0.0,
                        width: 1.0,
                    },
                };
            }
            if let Some(c) = cells_log2 {
                m.cells_log2 = c;
            }
            if half_width.is_some() {
                m.half_width = half_width;
            }
            if let Some(dt) = dt {
                m.dt = dt;
            }
            if let Some(f) = frame_interval {
                m.frame_interval = f;
            }
            if let Some(l) = level {
                m.level = l;
            }
            if let Some(s) = frame_stride {
                m.frame_stride = s;
            }
            (cfg, common.no_clobber)
        }
        Command::Analyze {
            common,
            inputs,
            window,
        } => {
            let mut cfg = base(Mode::Analyze, &common)?;
            if !inputs.is_empty() {
                cfg.analyze.inputs = inputs;
            }
            if let Some(w) = window {
                cfg.analyze.window = Some((w[0], w[1]));
            }
            (cfg, common.no_clobber)
        }
        Command::Verify { common, suite } => {
            let mut cfg = base(Mode::Verify, &common)?;
            if let Some(s) = suite {
                cfg.suite = match s {
                    SuiteArg::All => Suite::All,
                    SuiteArg::Quick => Suite::Quick,
                };
            }
            (cfg, common.no_clobber)
        }
    };
    Ok((cfg, no_clobber))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = build(cli.command).and_then(|(cfg, no_clobber)| experiment::run(&cfg, RunOptions { no_clobber }));
    match result {
        Ok(m) if m.ok => ExitCode::SUCCESS,
        Ok(m) => {
            let failed: Vec<String> = m
                .runs
                .iter()
                .filter(|r| !r.ok)
                .map(|r| match (r.seed, &r.error) {
                    (Some(s), Some(e)) => format!("seed {s}: {e}"),
                    (_, Some(e)) => e.clone(),
                    _ => "check failed".into(),
                })
                .collect();
            eprintln!("error: {} run(s) failed: {}", failed.len(), failed.join("; "));
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
