//! A configured batch: lattice runs with a manifest, re-run from that
//! manifest, then analysed from the CSVs on disk.
//!
//! ```text
//! cargo run --release --example batch_experiment -- /tmp/truncfront-demo
//! ```

use std::path::PathBuf;

use truncfront::experiment::{run, ExperimentConfig, Mode, RunOptions, MANIFEST};

fn main() -> truncfront::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("truncfront-demo"));

    let mut cfg: ExperimentConfig = toml::from_str(
        r#"
        mode = "lattice"
        alpha = 2.5
        horizon = 60.0
        sample_interval = 1.0
        [seeds]
        master_seed = 42
        runs = 6
        "#,
    )
    .map_err(|e| truncfront::Error::Config(e.to_string()))?;
    cfg.output_dir = root.join("first");
    let m = run(&cfg, RunOptions::default())?;
    println!("{} runs in {:.2}s, seeds {:?}", m.runs.len(), m.wall_time_secs, m.seeds);

    let mut again = ExperimentConfig::load(&cfg.output_dir.join(MANIFEST))?;
    again.output_dir = root.join("again");
    let m2 = run(&again, RunOptions::default())?;
    let same = m.runs.iter().flat_map(|r| &r.files).all(|f| {
        std::fs::read(cfg.output_dir.join(f)).ok() == std::fs::read(again.output_dir.join(f)).ok()
    });
    println!("re-run from manifest: ok = {}, identical files = {same}", m2.ok);

    let mut analyze = ExperimentConfig::new(Mode::Analyze);
    analyze.output_dir = root.join("analysis");
    analyze.analyze.inputs = m.runs.iter().flat_map(|r| r.files.iter().map(|f| cfg.output_dir.join(f))).collect();
    run(&analyze, RunOptions::default())?;
    print!("{}", std::fs::read_to_string(analyze.output_dir.join("summary.csv")).unwrap_or_default());
    Ok(())
}
