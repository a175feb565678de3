//! Numerical checks of the estimates behind the front rates: sub-solution
//! profiles, the kernel/power convolution ratio, a certified weight and the
//! weighted-norm growth bound along a solve.
//!
//! ```text
//! cargo run --release --example meso_estimates
//! ```

use truncfront::meso::checks::{
    find_lambda, kernel_ratio, scan_subsolution, CappedPower, GrowthMonitor, LambdaSearchConfig, OnsetScanConfig,
    Profile, Weight,
};
use truncfront::meso::{GridSpec, InitialCondition, MesoField, MesoSolver};
use truncfront::KernelSpec;

fn main() -> truncfront::Result<()> {
    let scan = OnsetScanConfig::default();
    for (alpha, eps) in [(1.0, 0.5), (1.5, 0.3)] {
        for which in [Profile::G, Profile::H] {
            let s = scan_subsolution(which, alpha, eps, &scan)?;
            println!(
                "{which:?} alpha = {alpha} eps = {eps}: onset t = {:?}, worst residual after = {:.2e}",
                s.onset, s.max_violation_after
            );
        }
    }

    let k = KernelSpec::continuous(1.0)?;
    let xs = [0.0, 1e2, 1e4, 1e6];
    let r = kernel_ratio(&k, 0.9, &xs)?;
    println!("\n(a * a^0.9) / a^0.9 at {xs:?}: {r:.4?}");

    let (gamma, delta) = (0.9, 0.5);
    let lam = find_lambda(1.0, gamma, delta, &LambdaSearchConfig::default())?;
    println!("\nlambda = {:.4} after {} halvings (worst excess {:.3})", lam.lambda, lam.halvings, lam.reverified_excess);

    let weight = Weight::Capped(CappedPower {
        kernel: k.clone(),
        gamma,
        lambda: lam.lambda,
    });
    let horizon = 8.0;
    let grid = GridSpec::sized_for_front(0.5, 0.3, horizon, 1 << 16)?;
    let mut solver = MesoSolver::new(&k, &grid, 1e-6)?;
    let mut u = MesoField::from_initial(grid, &InitialCondition::Kernel { scale: 1.0 }, &k)?;
    let mut bound = GrowthMonitor::new(&weight, 1.0 + delta, &u);
    let mut halved = GrowthMonitor::new(&weight, 0.5 * (1.0 + delta), &u);
    solver.solve(&mut u, horizon, 0.05, 0.5, |f| {
        bound.observe(f);
        halved.observe(f);
    })?;
    for (label, m) in [("nu = 1 + delta", &bound), ("nu halved", &halved)] {
        let rep = m.report();
        println!("{label:>15}: max excess over ||u0|| e^(nu t) = {:.3e}", rep.max_excess);
    }
    Ok(())
}
