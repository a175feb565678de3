//! The speed-dichotomy series and the Poisson lower-tail bound.
//!
//! ```text
//! cargo run --release --example series_tails
//! ```

use truncfront::series::{heuristic_series, poisson_ldp_check, poisson_lower_tail_mc};

fn main() -> truncfront::Result<()> {
    for alpha in [1.5, 2.0, 2.5, 3.0, 4.0] {
        let r = heuristic_series(alpha, 1_000_000)?;
        println!(
            "alpha = {alpha}: S(1e6) = {:<14.7} last decade adds {:<10.3e} tail <= {:<10.3e} {:?}",
            r.partial_sum, r.last_decade_increment, r.tail_bound, r.verdict
        );
    }
    println!();
    let mut rng = truncfront::rng::stream(5);
    for lambda in [30.0, 60.0, 120.0, 240.0] {
        let r = poisson_ldp_check(lambda)?;
        let mc = poisson_lower_tail_mc(lambda, 100_000, &mut rng)?;
        println!(
            "lambda = {lambda:>5}: P(X <= lambda/3) = {:.3e} <= exp(-lambda/6) = {:.3e}: {} (Monte Carlo {mc:.1e})",
            r.exact_prob, r.bound, r.holds
        );
    }
    Ok(())
}
