//! One test per acceptance property. Each prints a `PASS`/`FAIL` line with its
//! worst violation straight to stdout, so the verdicts show up even when the
//! harness captures output. Tolerances and sizes are fixed inside
//! `truncfront::verify`.

use std::io::Write;

use truncfront::output::CheckReport;
use truncfront::verify::{self, Suite};

fn record(n: u32, rep: truncfront::Result<CheckReport>) {
    let line = match &rep {
        Ok(r) => format!(
            "[{n:02}] {} {:<24} max_violation = {:.3e}  {}\n",
            if r.pass { "PASS" } else { "FAIL" },
            r.check,
            r.max_violation,
            r.details
        ),
        Err(e) => format!("[{n:02}] FAIL error: {e}\n"),
    };
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    let r = rep.expect("check errored");
    assert!(r.pass, "{} failed: {}", r.check, r.details);
}

#[test]
fn kernel_mass_sampler_and_rounding_sandwich() {
    record(1, verify::kernel_correctness(Suite::All));
}

#[test]
fn heavy_tail_alpha_three_spreads_linearly() {
    record(2, verify::linear_regime(Suite::All));
}

#[test]
fn light_tail_alpha_below_two_spreads_superlinearly() {
    record(3, verify::superlinear_regime(Suite::All));
}

#[test]
fn tip_view_stays_below_dominating_chain() {
    record(4, verify::stochastic_domination(Suite::All));
}

#[test]
fn comparison_process_fills_rectangle() {
    record(5, verify::rectangle_lower_bound(Suite::All));
}

#[test]
fn localized_front_grows_at_half_inverse_alpha() {
    record(6, verify::meso_front_case1(Suite::All));
}

#[test]
fn step_front_grows_at_inverse_two_alpha_minus_one() {
    record(7, verify::meso_front_case2(Suite::All));
}

#[test]
fn averaged_profiles_are_subsolutions() {
    record(8, verify::subsolutions(Suite::All));
}

#[test]
fn kernel_power_convolution_ratio_tends_to_one() {
    record(9, verify::kernel_ratio_limit(Suite::All));
}

#[test]
fn weighted_norm_growth_is_bounded() {
    record(10, verify::weighted_growth_bound(Suite::All));
}

#[test]
fn solutions_preserve_order_and_never_decrease() {
    record(11, verify::comparison_principle(Suite::All));
}

#[test]
fn picard_and_heun_agree() {
    record(12, verify::cross_solver(Suite::All));
}

#[test]
fn series_verdicts_and_poisson_tail() {
    record(13, verify::series_and_ldp(Suite::All));
}

#[test]
fn reruns_from_manifest_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    record(14, verify::reproducibility(Suite::All, dir.path()));
}
