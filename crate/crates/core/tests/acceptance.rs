//! Acceptance suite: runs every reproduction family at its pinned tolerance
//! and prints one pass/fail line per criterion (visible with
//! `cargo test --test acceptance -- --nocapture`).
//!
//! The same checks back the CLI's `reproduce` subcommand; this target is the
//! gate that `cargo test` enforces.

use ecl_core::report::{run_family, CriterionRow, Family, DEFAULT_SEED};

fn seed() -> u64 {
    std::env::var("ECL_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

fn check(number: usize, label: &str, family: Family) {
    let rows = run_family(family, seed()).expect("criterion family runs");
    assert!(!rows.is_empty(), "family {family} produced no checks");
    let failing: Vec<&CriterionRow> = rows.iter().filter(|r| !r.pass).collect();
    let verdict = if failing.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "criterion {number:2} [{verdict}] {label} ({} checks)",
        rows.len()
    );
    for row in &failing {
        println!(
            "    failing: {} | expected {} measured {} tolerance {}",
            row.case, row.expected, row.measured, row.tolerance
        );
    }
    assert!(
        failing.is_empty(),
        "criterion {number} ({label}): {} of {} checks failed",
        failing.len(),
        rows.len()
    );
}

#[test]
fn criterion_01_atomic_anarchy_tightness() {
    check(
        1,
        "atomic anarchy family meets the closed-form bound on the eps grid",
        Family::AtomicPoa,
    );
}

#[test]
fn criterion_02_atomic_anarchy_is_a_ceiling() {
    check(
        2,
        "enumerated anarchy of 1000 random games never exceeds the bound",
        Family::AtomicPoaRandom,
    );
}

#[test]
fn criterion_03_nonatomic_anarchy_tightness() {
    check(
        3,
        "non-atomic anarchy family matches both regimes (documented gap at non-integral eps)",
        Family::NonatomicPoa,
    );
}

#[test]
fn criterion_04_atomic_potential_soundness() {
    check(
        4,
        "potential-descent terminals verify as equilibria on 1000 random runs",
        Family::PotentialAtomic,
    );
}

#[test]
fn criterion_05_nonatomic_potential_soundness() {
    check(
        5,
        "potential minimizers verify as equilibria on every bundled instance",
        Family::PotentialNonatomic,
    );
}

#[test]
fn criterion_06_nonatomic_stability_tightness() {
    check(
        6,
        "two-link stability family is tight and certified by the solver",
        Family::Pigou,
    );
}

#[test]
fn criterion_07_atomic_stability_sandwich() {
    check(
        7,
        "stability bounds nest: family value <= sharp bound <= 2/(1+eps)",
        Family::AtomicPosBounds,
    );
}

#[test]
fn criterion_08_dominant_strategy_family() {
    check(
        8,
        "dominant-strategy family approaches the stability bound and is unique at n=3",
        Family::AtomicPos,
    );
}

#[test]
fn criterion_09_two_links() {
    check(
        9,
        "two-link optimum is exactly a (1-(1+gamma)/n)-equilibrium and optimal",
        Family::TwoLinks,
    );
}

#[test]
fn criterion_10_lemma_suites() {
    check(
        10,
        "all four arithmetic inequalities hold on their declared grids",
        Family::Lemmas,
    );
}

#[test]
fn criterion_11_equilibrium_inequalities() {
    check(
        11,
        "equilibrium and variational inequalities hold against random flows",
        Family::Bmw,
    );
}
