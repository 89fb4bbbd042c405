//! Smooth-entropy optimizers against a rational simplex and exhaustive
//! removal search.

mod support;

use num_traits::One;
use otbounds::dist::ratio;
use otbounds::entropy::{smooth_max_entropy, smooth_min_entropy};
use otbounds::protocol::trial_rng;
use otbounds::{JointDist, Prob};

fn eps_grid() -> Vec<Prob> {
    vec![ratio(0, 1), ratio(1, 50), ratio(1, 10), ratio(1, 4), ratio(1, 2), ratio(4, 5)]
}

fn check_min(j: &JointDist, eps: &Prob) {
    let r = smooth_min_entropy(j, eps).unwrap();
    assert_eq!(r.objective, support::lp_guessing_probability(j, eps), "eps {eps}");
    let q = j.apply_event(&r.witness).unwrap();
    assert!(q.total() >= Prob::one() - eps);
    assert_eq!(q.guessing_probability(), r.objective);
}

fn check_max(j: &JointDist, eps: &Prob) {
    let r = smooth_max_entropy(j, eps).unwrap();
    let s = support::enumerated_support(j, eps);
    assert_eq!(r.objective, Prob::from_integer(s.into()), "eps {eps}");
    let q = j.apply_event(&r.witness).unwrap();
    assert!(q.total() >= Prob::one() - eps);
    assert_eq!(q.max_column_support(), s);
}

#[test]
fn smooth_min_matches_simplex_on_random_tables() {
    let mut rng = trial_rng(2024, 0);
    for n in 0..240 {
        let d = if n % 2 == 0 { 3 } else { 4 };
        let j = support::random_table(&mut rng, d, d);
        for eps in eps_grid() {
            check_min(&j, &eps);
        }
    }
}

#[test]
fn smooth_max_matches_enumeration_on_random_tables() {
    let mut rng = trial_rng(2024, 1);
    for n in 0..240 {
        let d = if n % 2 == 0 { 3 } else { 4 };
        let j = support::random_table(&mut rng, d, d);
        for eps in eps_grid() {
            check_max(&j, &eps);
        }
    }
}

#[test]
fn ties_and_uniform_columns() {
    let j = support::table_from_weights(4, 2, &[1, 1, 1, 1, 1, 1, 1, 1]);
    for eps in eps_grid() {
        check_min(&j, &eps);
        check_max(&j, &eps);
    }
    let j = support::table_from_weights(3, 3, &[5, 0, 0, 0, 5, 0, 0, 0, 5]);
    for eps in eps_grid() {
        check_min(&j, &eps);
        check_max(&j, &eps);
    }
}

#[test]
fn simplex_solves_a_textbook_program() {
    // max 3a + 2b, a + b <= 4, a + 3b <= 6, a <= 3: optimum 11 at (3, 1).
    let p = |n: i64| ratio(n, 1);
    let a = vec![vec![p(1), p(1)], vec![p(1), p(3)], vec![p(1), p(0)]];
    let v = support::simplex_max(&a, &[p(4), p(6), p(3)], &[p(3), p(2)]);
    assert_eq!(v, p(11));
}
