//! One test per acceptance criterion. Each prints a single pass/fail line.

use univalent::acceptance::{run, DEFAULT_SEED};

fn criterion(id: u8) {
    let outcome = run(id, DEFAULT_SEED);
    println!("{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn criterion_01_constants_reproduction() {
    criterion(1);
}

#[test]
fn criterion_02_cross_characterization() {
    criterion(2);
}

#[test]
fn criterion_03_schwarzian_norm_formulas() {
    criterion(3);
}

#[test]
fn criterion_04_norm_scaling_identity() {
    criterion(4);
}

#[test]
fn criterion_05_sharp_bound_suite() {
    criterion(5);
}

#[test]
fn criterion_06_series_negativity() {
    criterion(6);
}

#[test]
fn criterion_07_oracle_equivalence() {
    criterion(7);
}

#[test]
fn criterion_08_jet_correctness() {
    criterion(8);
}

#[test]
fn criterion_09_dilatation_evaluators() {
    criterion(9);
}

#[test]
fn criterion_10_spirallike_extension() {
    criterion(10);
}

#[test]
fn criterion_11_report_card_coherence() {
    criterion(11);
}

#[test]
fn criterion_12_schwarzian_norm_inequality() {
    criterion(12);
}
