//! Acceptance battery as a dedicated test target: one test per criterion,
//! each printing a single pass/fail line with its timing. A process-wide
//! lock serializes the criteria so the timings stay meaningful on small
//! machines; test-thread order still does not matter.

use std::sync::Mutex;

use envsieve::suite::{self, CriterionResult};

static GATE: Mutex<()> = Mutex::new(());

fn gate(f: fn() -> CriterionResult) {
    let _lock = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let res = f();
    println!(
        "criterion {:02} {}: {} ({:.1}s)",
        res.index,
        res.name,
        if res.passed { "PASS" } else { "FAIL" },
        res.seconds
    );
    if !res.passed {
        for d in &res.details {
            println!("    {d}");
        }
    }
    assert!(res.passed, "criterion {:02} failed:\n{}", res.index, res.details.join("\n"));
}

#[test]
fn acceptance_01_dual_weight_evaluation() {
    gate(suite::c01_dual_weight_evaluation);
}

#[test]
fn acceptance_02_exact_envelope_and_weight_bounds() {
    gate(suite::c02_exact_envelope_and_weight_bounds);
}

#[test]
fn acceptance_03_coefficient_bounds_and_zero_structure() {
    gate(suite::c03_coefficient_bounds_and_zero_structure);
}

#[test]
fn acceptance_04_pointwise_expansion() {
    gate(suite::c04_pointwise_expansion);
}

#[test]
fn acceptance_05_envelope_mean() {
    gate(suite::c05_envelope_mean);
}

#[test]
fn acceptance_06_restriction_and_extension_stability() {
    gate(suite::c06_restriction_and_extension_stability);
}

#[test]
fn acceptance_07_moment_trend_and_fourth_moment() {
    gate(suite::c07_moment_trend_and_fourth_moment);
}

#[test]
fn acceptance_08_progression_count_identities() {
    gate(suite::c08_progression_count_identities);
}

#[test]
fn acceptance_09_transference_guarantees() {
    gate(suite::c09_transference_guarantees);
}

#[test]
fn acceptance_10_partner_records_and_progressions() {
    gate(suite::c10_partner_records_and_progressions);
}

#[test]
fn acceptance_11_quadratic_form_gaps_and_twin_constant() {
    gate(suite::c11_quadratic_form_gaps_and_twin_constant);
}
