//! Dispersal kernels: normalisation, tails, sampling and the lattice
//! discretization.
//!
//! ```text
//! cargo run --example kernel -- 1.5
//! ```

use truncfront::kernel::{kernel_lattice, lattice_kernel_mass, round_half_down};
use truncfront::rng::stream;
use truncfront::KernelSpec;

fn main() -> truncfront::Result<()> {
    let alpha: f64 = std::env::args().nth(1).map_or(Ok(1.5), |s| s.parse()).expect("alpha");
    let k = KernelSpec::continuous(alpha)?;
    println!("alpha = {alpha}, c_alpha = {:.10}", k.c_alpha);
    println!("lattice mass sum_k (1 v |k|)^(-2 alpha) = {:.10}", lattice_kernel_mass(alpha)?);

    println!("\n{:>8} {:>14} {:>14} {:>14}", "x", "a(x)", "P(Z > x)", "a_d(round x)");
    for x in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1000.0] {
        println!(
            "{x:>8} {:>14.6e} {:>14.6e} {:>14.6e}",
            k.eval(x),
            k.tail(x),
            kernel_lattice(round_half_down(x), alpha)
        );
    }

    let mut rng = stream(1);
    let n = 200_000;
    let draws: Vec<f64> = (0..n).map(|_| k.sample(&mut rng)).collect();
    println!("\nempirical vs exact tail from {n} draws:");
    for x in [1.0, 3.0, 10.0] {
        let emp = draws.iter().filter(|&&z| z > x).count() as f64 / n as f64;
        println!("  P(Z > {x:>4}) = {emp:.5} (exact {:.5})", k.tail(x));
    }
    Ok(())
}
