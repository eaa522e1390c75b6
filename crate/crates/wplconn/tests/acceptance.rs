//! Acceptance suite: one criterion per test, exact (zero tolerance), with a
//! pass/fail line per criterion. Instance counts and the two wall-clock
//! bounds are pinned here.

use std::time::Instant;
use wplconn::selftest::{
    suite_bijection, suite_correspondence, suite_degenerate, suite_extension,
    suite_normalization, suite_sheaf_calculus, suite_worked_instance,
};

const SEED: u64 = 1;
const JOBS: usize = 4;

fn report(criterion: &str, ok: bool, detail: &str) {
    println!("{criterion}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{criterion} failed: {detail}");
}

#[test]
fn ac1_sheaf_calculus() {
    let start = Instant::now();
    let r = suite_sheaf_calculus(SEED, 100, JOBS);
    let elapsed = start.elapsed();
    let in_time = elapsed.as_secs_f64() < 30.0;
    report(
        "AC-1",
        r.ok() && in_time,
        &format!("{} ({elapsed:.2?}, bound 30s)", r.summary()),
    );
}

#[test]
fn ac2_extension_construction() {
    let r = suite_extension(SEED, 100, JOBS);
    report("AC-2", r.ok(), &r.summary());
}

#[test]
fn ac3_worked_instance() {
    let start = Instant::now();
    let r = suite_worked_instance();
    let elapsed = start.elapsed();
    let in_time = elapsed.as_secs_f64() < 1.0;
    report(
        "AC-3",
        r.ok() && in_time,
        &format!("{} ({elapsed:.2?}, bound 1s)", r.summary()),
    );
}

#[test]
fn ac4_section_bijection() {
    let r = suite_bijection(SEED, 50, JOBS);
    report("AC-4", r.ok(), &r.summary());
}

#[test]
fn ac5_quiver_correspondence() {
    let r = suite_correspondence(SEED, 50, JOBS);
    report("AC-5", r.ok(), &r.summary());
}

#[test]
fn ac6_degenerate_regimes() {
    let r = suite_degenerate(SEED);
    report("AC-6", r.ok(), &r.summary());
}

#[test]
fn ac7_normalization() {
    let r = suite_normalization(SEED, 20, JOBS);
    report("AC-7", r.ok(), &r.summary());
}
