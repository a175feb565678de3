//! The continuum process, rounded to the lattice and compared with lattice
//! processes run faster and slower.
//!
//! ```text
//! cargo run --release --example continuum_spread
//! ```

use truncfront::analysis::{domination_statistics, Dominance};
use truncfront::continuum::{discretize, simulate_continuum, ContinuumSimConfig, PointState};
use truncfront::experiment::batch;
use truncfront::lattice::{domination_multipliers, simulate, LatticeParams, LatticeSimConfig};
use truncfront::rng::stream;
use truncfront::KernelSpec;

fn main() -> truncfront::Result<()> {
    let mut st = PointState::new(KernelSpec::continuous(2.0)?, &[0.0])?;
    st.advance_to(6.0, &mut stream(3));
    println!("alpha = 2 at t = 6: {} particles on [{:.2}, {:.2}]", st.n_particles(), st.left_tip(), st.right_tip());
    let bins = discretize(st.positions());
    let busiest = bins.iter().max_by_key(|b| b.1).unwrap();
    println!("  {} occupied sites, most crowded site {} holds {}", bins.len(), busiest.0, busiest.1);

    let alpha = 3.0;
    let t = 50.0;
    let (up, down) = domination_multipliers(alpha)?;
    println!("\nrate multipliers for alpha = {alpha}: {up:.3} (above) and {down:.4} (below)");
    let seeds: Vec<u64> = (0..16).collect();
    let cfg = ContinuumSimConfig {
        alpha,
        horizon: t,
        sample_interval: 1.0,
        event_budget: None,
    };
    let cont: Vec<_> = batch(&seeds, |&s| simulate_continuum(&cfg, s).map(|r| r.trajectory))
        .into_iter()
        .collect::<truncfront::Result<_>>()?;
    for (m, dir) in [(up, Dominance::LatticeAbove), (down, Dominance::LatticeBelow)] {
        let mut params = LatticeParams::new(alpha);
        params.rate_multiplier = m;
        let lcfg = LatticeSimConfig {
            params,
            horizon: t,
            sample_interval: 1.0,
            ..Default::default()
        };
        let lat: Vec<_> = batch(&seeds, |&s| simulate(&lcfg, 1000 + s).map(|r| r.trajectory))
            .into_iter()
            .collect::<truncfront::Result<_>>()?;
        let rep = domination_statistics(&cont, &lat, t, dir)?;
        println!("{dir:?}: all quantiles hold = {}", rep.all_hold);
        for row in rep.rows.iter().filter(|r| r.quantile == 0.5) {
            println!("  median {:<13} continuum {:>10.1}  lattice {:>10.1}", row.statistic, row.reference, row.lattice);
        }
    }
    Ok(())
}
