//! One test per acceptance criterion. Each prints its PASS/FAIL line so a
//! `--nocapture` run doubles as the acceptance report.

use rdae_bench::acceptance::{self, Outcome};

fn check(id: u8) {
    let (_, run) = acceptance::all()
        .into_iter()
        .find(|(n, _)| *n == id)
        .expect("criterion is registered");
    let outcome: Outcome = run().unwrap_or_else(|e| panic!("criterion {id} errored: {e}"));
    println!("{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn criterion_1_solver_oracles() {
    check(1);
}

#[test]
fn criterion_2_monotone_training() {
    check(2);
}

#[test]
fn criterion_3_reduction_identities() {
    check(3);
}

#[test]
fn criterion_4_denoising_effectiveness() {
    check(4);
}

#[test]
fn criterion_5_robustness_ordering() {
    check(5);
}

#[test]
fn criterion_6_baseline_gap() {
    check(6);
}

#[test]
fn criterion_7_test_time_ordering() {
    check(7);
}

#[test]
fn criterion_8_metric_identities() {
    check(8);
}

#[test]
fn criterion_9_synthesis_physics() {
    check(9);
}
