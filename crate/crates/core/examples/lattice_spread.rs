//! The lattice process in both tail regimes: linear spread for `α > 2`,
//! superlinear spread below.
//!
//! ```text
//! cargo run --release --example lattice_spread
//! ```

use truncfront::analysis::{fit_linear_speed, fit_speed_trend, superlinearity_statistic};
use truncfront::lattice::{simulate, LatticeParams, LatticeSimConfig};

fn main() -> truncfront::Result<()> {
    let linear = LatticeSimConfig {
        params: LatticeParams::new(3.0),
        horizon: 200.0,
        sample_interval: 1.0,
        ..Default::default()
    };
    let run = simulate(&linear, 7)?;
    let last = run.trajectory.last().unwrap();
    let speed = fit_linear_speed(&run.trajectory, None)?;
    let trend = fit_speed_trend(&run.trajectory, None)?;
    println!("alpha = 3, T = {}: tips [{}, {}], {} particles", last.t, last.left_tip, last.right_tip, last.n_particles);
    println!("  |tip| ~ {:.3} t (+/- {:.3}); trend of |tip|/t = {:.2e} (+/- {:.1e})", speed.slope, speed.stderr, trend.slope, trend.stderr);

    let fast = LatticeSimConfig {
        params: LatticeParams::new(1.25),
        horizon: 1e6,
        sample_interval: 0.05,
        event_budget: Some(200_000),
        ..Default::default()
    };
    let run = simulate(&fast, 7)?;
    let last = run.trajectory.last().unwrap();
    println!("\nalpha = 1.25, stopped at t = {:.2} ({:?}) with |left tip| = {}", last.t, run.trajectory.stop, -last.left_tip);
    for d in superlinearity_statistic(&run.trajectory) {
        println!("  |tip(2t)| / |tip(t)| at t = {:>8.3}: {:.2}", d.t, d.ratio);
    }
    Ok(())
}
