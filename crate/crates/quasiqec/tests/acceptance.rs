//! Acceptance suite: one test per criterion, each printing its
//! pass/fail line. Run with `cargo test --release --test acceptance`.

use quasiqec::acceptance::{run_criterion, CriterionResult};

fn check(id: usize) {
    let CriterionResult {
        name,
        passed,
        details,
        ..
    } = run_criterion(id);
    println!(
        "criterion {id:2} [{}] {name}{}{}",
        if passed { "pass" } else { "FAIL" },
        if details.is_empty() { "" } else { " :: " },
        details
    );
    assert!(passed, "criterion {id} ({name}): {details}");
}

#[test]
fn criterion_01_algebra() {
    check(1);
}

#[test]
fn criterion_02_energies() {
    check(2);
}

#[test]
fn criterion_03_correlations() {
    check(3);
}

#[test]
fn criterion_04_exact_diagonalization() {
    check(4);
}

#[test]
fn criterion_05_bond_matrix_elements() {
    check(5);
}

#[test]
fn criterion_06_recovery_decay_laws() {
    check(6);
}

#[test]
fn criterion_07_exact_code_suite() {
    check(7);
}

#[test]
fn criterion_08_quasi_encoding() {
    check(8);
}

#[test]
fn criterion_09_logical_gates() {
    check(9);
}

#[test]
fn criterion_10_readout() {
    check(10);
}

#[test]
fn criterion_11_thresholds() {
    check(11);
}

#[test]
fn criterion_12_classification() {
    check(12);
}

#[test]
fn criterion_13_gate_cells() {
    check(13);
}
