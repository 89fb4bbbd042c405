//! Entropy inequalities on random tables.

mod support;

use proptest::prelude::*;
use support::lemmas::{self, Check};

fn run(check: fn(&mut rand_chacha::ChaCha8Rng) -> Check, seed: u64) -> Result<(), TestCaseError> {
    check(&mut otbounds::protocol::trial_rng(seed, 0)).map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn smooth_max_is_subadditive(seed in any::<u64>()) { run(lemmas::subadditivity, seed)?; }

    #[test]
    fn smooth_min_drops_with_more_conditioning(seed in any::<u64>()) { run(lemmas::min_monotonicity, seed)?; }

    #[test]
    fn smooth_max_monotone(seed in any::<u64>()) { run(lemmas::max_monotonicity, seed)?; }

    #[test]
    fn smooth_chain_inequality(seed in any::<u64>()) { run(lemmas::chain, seed)?; }

    #[test]
    fn smooth_min_data_processing(seed in any::<u64>()) { run(lemmas::data_processing_min, seed)?; }

    #[test]
    fn smooth_max_data_processing(seed in any::<u64>()) { run(lemmas::data_processing_max, seed)?; }

    #[test]
    fn conditional_entropy_continuity(seed in any::<u64>()) { run(lemmas::continuity, seed)?; }

    #[test]
    fn fano_inequality(seed in any::<u64>()) { run(lemmas::fano, seed)?; }

    #[test]
    fn binary_entropy_scaling(seed in any::<u64>()) { run(lemmas::h_concavity, seed)?; }

    #[test]
    fn shannon_chain_rule(seed in any::<u64>()) { run(lemmas::shannon_chain, seed)?; }

    #[test]
    fn shannon_monotonicity(seed in any::<u64>()) { run(lemmas::shannon_monotonicity, seed)?; }

    #[test]
    fn shannon_averaging(seed in any::<u64>()) { run(lemmas::averaging, seed)?; }

    #[test]
    fn shannon_markov_relations(seed in any::<u64>()) { run(lemmas::shannon_markov, seed)?; }
}

#[test]
fn concavity_on_a_grid() {
    for i in 0..=20 {
        for j in 0..=20 {
            let (c, p) = (i as f64 / 20.0, j as f64 / 20.0);
            let lhs = otbounds::entropy::binary_entropy(c * p).unwrap();
            assert!(lhs >= c * otbounds::entropy::binary_entropy(p).unwrap() - lemmas::TOL);
        }
    }
}
