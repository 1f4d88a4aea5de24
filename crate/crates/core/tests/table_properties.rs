mod common;

use common::{grid_oracle, rng, sample, Group};
use kuramoto2c::boundaries::{beta_sync_residual, beta_zero};
use kuramoto2c::classify::{region, subclassify};
use kuramoto2c::model::solve_all;
use kuramoto2c::{Error, Psi};

#[test]
fn counts_and_classification_over_random_couplings() {
    let mut r = rng(11);
    let mut mismatches = Vec::new();
    for group in Group::ALL {
        for _ in 0..200 {
            let c = sample(group, &mut r);
            let reg = region(&c).unwrap();
            let sols = solve_all(&c, Psi::Zero).unwrap();
            assert!(sols.len() <= reg.max_solutions(), "{c} {reg} {sols:?}");
            match subclassify(&c) {
                Ok(rep) => assert_eq!(rep.exact_count, sols.len()),
                Err(Error::ClassificationInconsistency { predicted, found, .. }) => mismatches.push((c, reg, predicted, found)),
                Err(e) => panic!("{c}: {e}"),
            }
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}

#[test]
fn grid_oracle_agrees_with_enumeration() {
    let mut r = rng(23);
    let mut checked = 0;
    let mut skipped = 0;
    let groups = Group::ALL;
    let mut i = 0;
    while checked < 100 {
        let c = sample(groups[i % groups.len()], &mut r);
        i += 1;
        let sols = solve_all(&c, Psi::Zero).unwrap();
        let degenerate = beta_zero(&c).closed_form.abs() < 0.05
            || sols.iter().any(|s| {
                !s.is_trivial() && (s.tangent || s.r1.min(s.r2) < 0.01 || beta_sync_residual(&c, s.r1, s.r2).abs() < 1e-3)
            });
        if degenerate {
            skipped += 1;
            continue;
        }
        let oracle = grid_oracle(&c, 400);
        for &(a, b) in &oracle {
            assert!(sols.iter().any(|s| (s.r1 - a).hypot(s.r2 - b) < 1e-6), "missed ({a}, {b}) for {c}: {sols:?}");
        }
        for s in &sols {
            assert!(oracle.iter().any(|&(a, b)| (s.r1 - a).hypot(s.r2 - b) < 1e-6), "spurious {s:?} for {c}: {oracle:?}");
        }
        checked += 1;
    }
    println!("grid oracle: {checked} checked, {skipped} near-degenerate skipped");
}
