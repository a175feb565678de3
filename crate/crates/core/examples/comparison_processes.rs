//! The nearest-neighbour comparison process filling a rectangle, and the
//! tip-view coupling against its dominating chain.
//!
//! ```text
//! cargo run --release --example comparison_processes
//! ```

use truncfront::lattice::gamma::rectangle_minimum;
use truncfront::lattice::{couple_xi_zeta, simulate_gamma, CouplingConfig};

fn main() -> truncfront::Result<()> {
    let t = 400.0;
    for seed in 0..4 {
        let g = simulate_gamma(t, 50.0, seed)?;
        let min = rectangle_minimum(&g.counts, (t / 4.0) as usize);
        let last = g.trajectory.last().unwrap();
        println!(
            "gamma seed {seed}: right tip {} with {} particles; min over [0, t/4] = {min} (t/10 = {})",
            last.right_tip,
            last.n_particles,
            t / 10.0
        );
    }

    let cfg = CouplingConfig {
        events: 20_000,
        ..Default::default()
    };
    let rep = couple_xi_zeta(&cfg, &[1, 2, 3, 4])?;
    println!(
        "\ncoupling over {} events: {} violations, largest prefix-sum gap {}, neglected jump rate <= {:.1e}",
        rep.events, rep.violations, rep.max_partial_sum_gap, rep.neglected_rate_bound
    );
    Ok(())
}
