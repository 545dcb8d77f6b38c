//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line (visible with `--nocapture`) and asserting the verdict.

use kerrest::validate;

fn run(report: validate::CheckReport) {
    println!("{}", report.line());
    for d in &report.details {
        println!("    {d}");
    }
    assert!(report.passed, "{} failed:\n{}", report.name, report.details.join("\n"));
}

#[test]
fn criterion_01_loss_qfi_closed_form() {
    run(validate::check_01_loss_qfi_closed_form());
}

#[test]
fn criterion_02_kerr_qfi_closed_form() {
    run(validate::check_02_kerr_qfi_closed_form());
}

#[test]
fn criterion_03_small_parameter_expansions() {
    run(validate::check_03_small_parameter_expansions());
}

#[test]
fn criterion_04_loss_enhancement_magnitude() {
    run(validate::check_04_loss_enhancement());
}

#[test]
fn criterion_05_homodyne_optimality_at_zero_kerr() {
    run(validate::check_05_homodyne_optimality());
}

#[test]
fn criterion_06_double_homodyne_half_qfi() {
    run(validate::check_06_double_homodyne_half());
}

#[test]
fn criterion_07_direct_detection_fisher() {
    run(validate::check_07_direct_detection());
}

#[test]
fn criterion_08_homodyne_near_optimal_band() {
    run(validate::check_08_homodyne_band());
}

#[test]
fn criterion_09_quantumness_saturation() {
    run(validate::check_09_quantumness_saturation());
}

#[test]
fn criterion_10_dephasing_qfim_structure() {
    run(validate::check_10_dephasing_structure());
}

#[test]
fn criterion_11_dephasing_measurement_bands() {
    run(validate::check_11_dephasing_bands());
}

#[test]
fn criterion_12_property_suites() {
    run(validate::check_12_property_suites());
}

#[test]
fn criterion_13_curve_shapes() {
    run(validate::check_13_curve_shapes());
}
