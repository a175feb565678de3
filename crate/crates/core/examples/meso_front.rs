//! Fronts of the nonlocal equation `∂t u = min{a * u, 1}` for localized and
//! step initial data.
//!
//! ```text
//! cargo run --release --example meso_front
//! ```

use truncfront::analysis::fit_exponential_rate;
use truncfront::meso::checks::trace_front;
use truncfront::meso::{Closure, GridSpec, InitialCondition, MesoField, MesoSolver};
use truncfront::KernelSpec;

fn main() -> truncfront::Result<()> {
    let alpha = 1.0;
    let horizon = 12.0;
    let kernel = KernelSpec::continuous(alpha)?;
    let cases = [
        (
            "bump",
            InitialCondition::Bump {
                height: 1.0,
                half_width: 1.0,
            },
            1.0 / (2.0 * alpha),
        ),
        ("step", InitialCondition::Step { height: 1.0 }, 1.0 / (2.0 * alpha - 1.0)),
    ];
    for (name, init, rate) in cases {
        let mut grid = GridSpec::sized_for_front(rate, 0.3, horizon, 1 << 18)?;
        if matches!(init, InitialCondition::Step { .. }) {
            grid = grid.with_closures(Closure::Plateau, Closure::Zero);
        }
        let mut solver = MesoSolver::new(&kernel, &grid, 1e-6)?;
        let u0 = MesoField::from_initial(grid.clone(), &init, &kernel)?;
        let trace = trace_front(&mut solver, &u0, 0.5, horizon, 0.1, 0.5)?;
        let fit = fit_exponential_rate(&trace, None)?;
        println!("{name}: domain [-{:.3e}, {:.3e}], h = {:.3}", grid.x_max, grid.x_max, grid.h());
        for (t, x) in trace.right_series().iter().step_by(4) {
            println!("  t = {t:>5.1}  x_right = {x:.4e}");
        }
        println!("  d ln x_right / dt = {:.4} (+/- {:.1e}), predicted {rate:.4}\n", fit.slope, fit.stderr);
    }
    Ok(())
}
