//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test -p sealink --test acceptance -- --nocapture` to see the report.

use sealink::validate::{self, CriterionResult, Status, ValidateOptions};

fn report(results: &[CriterionResult]) {
    for r in results {
        println!("{}", r.line());
    }
    let failing: Vec<String> = results
        .iter()
        .filter(|r| r.status != Status::Pass)
        .map(|r| r.line())
        .collect();
    assert!(failing.is_empty(), "criteria not met:\n{}", failing.join("\n"));
}

fn opts() -> ValidateOptions {
    ValidateOptions::default()
}

#[test]
fn criterion_1_marine_success() {
    report(&[validate::marine_success(&opts())]);
}

#[test]
fn criterion_2_end_to_end_success() {
    report(&[validate::end_to_end_success(&opts())]);
}

#[test]
fn criterion_3_link_crossover() {
    report(&[validate::crossover(&opts())]);
}

#[test]
fn criterion_4_constellation_size_peak() {
    report(&[validate::size_peak(&opts())]);
}

#[test]
fn criterion_5_capacity_switch_distance() {
    report(&[validate::capacity_jump(&opts())]);
}

#[test]
fn criterion_6_distance_approximation_fidelity() {
    report(&[validate::distance_fidelity(&opts())]);
}

#[test]
fn criterion_7_theory_matches_simulation() {
    report(&[validate::theory_vs_simulation(&opts())]);
}

#[test]
fn criterion_8_property_suite() {
    report(&validate::property_suite(&opts()));
}

#[test]
fn monotone_trends() {
    report(&validate::trends(&opts()));
}
