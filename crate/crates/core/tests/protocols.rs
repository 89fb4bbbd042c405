//! Exact and sampled checks of the classical protocols.

use std::sync::Arc;

use num_traits::{One, Zero};
use otbounds::dist::{ratio, stat_distance};
use otbounds::entropy::mutual_info_cond;
use otbounds::primitives::derandomize_ot;
use otbounds::protocol::{
    and_share_from_2ot, coord, eq_amplify, eq_from_ot, ip_from_ot, ot_oracle, rule, run_exact, run_sampled,
    transcript_table, verify_security, Party, ProtocolProgram, Simulator, Simulators, StepBuilder, View,
};
use otbounds::{JointDist, Prob};

fn assert_perfect(p: &ProtocolProgram) {
    let r = verify_security(p, &p.simulators).unwrap();
    assert!(r.is_perfect(), "{}: {r:?}", p.name);
    assert_eq!(r.input_pairs, p.x_domain.len() * p.y_domain.len());
}

#[test]
fn derandomized_ot_is_perfect() {
    for (n, k) in [(2, 1), (2, 2), (3, 1), (4, 1)] {
        assert_perfect(&derandomize_ot(n, k).unwrap());
    }
}

#[test]
fn derandomized_ot_outputs_chosen_string() {
    let p = derandomize_ot(2, 1).unwrap();
    for x in &p.x_domain {
        for y in &p.y_domain {
            for (t, _) in run_exact(&p, x, y).unwrap() {
                assert_eq!(t.out_b, vec![x[y[0] as usize]]);
            }
        }
    }
}

#[test]
fn and_gadget_is_perfect() {
    let p = and_share_from_2ot();
    assert_perfect(&p);
    let runs = run_exact(&p, &[1, 0], &[0, 1]).unwrap();
    assert_eq!(runs.len(), 4);
    assert!(runs.iter().all(|(t, _)| t.out_a[0] ^ t.out_b[0] == 1));
}

#[test]
fn equality_chain_is_perfect() {
    for k in 1..=3 {
        let p = eq_from_ot(k).unwrap();
        assert_perfect(&p);
        assert_eq!(p.calls("OT"), 2 * (k - 1));
    }
}

#[test]
fn inner_product_is_perfect() {
    for n in 1..=4 {
        assert_perfect(&ip_from_ot(n).unwrap());
    }
}

#[test]
fn inner_product_view_depends_only_on_output() {
    let p = ip_from_ot(3).unwrap();
    for y in &p.y_domain {
        let mut by_value: [Option<JointDist>; 2] = [None, None];
        for x in &p.x_domain {
            let ip = x.iter().zip(y).fold(0, |a, (p, q)| a ^ (p & q)) as usize;
            let view = JointDist::from_labels(
                run_exact(&p, x, y).unwrap().into_iter().map(|(t, w)| (t.bob.label(), String::new(), w)),
            )
            .unwrap();
            // Bob's OT outputs are uniform on the coset of strings with parity ip.
            assert_eq!(view.len(), 4);
            match &by_value[ip] {
                None => by_value[ip] = Some(view),
                Some(first) => assert!(stat_distance(first, &view).is_zero()),
            }
        }
    }
}

#[test]
fn amplified_equality_counts_and_accepts() {
    for k in 1..=4 {
        assert_eq!(eq_amplify(3, k).unwrap().calls("OT"), 2 * (k - 1));
    }
    let p = eq_amplify(2, 2).unwrap();
    let r = verify_security(&p, &p.simulators).unwrap();
    // Unequal inputs are accepted with probability exactly 2^-k.
    assert_eq!(r.correctness_error, ratio(1, 4));
    for (t, _) in run_exact(&p, &[1, 0], &[1, 0]).unwrap() {
        assert_eq!(t.out_b, vec![1]);
    }
}

#[test]
fn bob_output_is_determined_by_his_side() {
    // Over a resource table, Bob's side is (Y, V, M).
    for (n, k) in [(2, 1), (3, 1), (2, 2)] {
        let t = transcript_table(&derandomize_ot(n, k).unwrap()).unwrap();
        let i = mutual_info_cond(&t, &[coord::OUT_B], &[coord::X, coord::U], &[coord::Y, coord::V, coord::M]).unwrap();
        assert_eq!(i, 0.0);
    }
    // With OT calls, Bob's functionality outputs belong to his side too;
    // they are part of his view.
    for p in [and_share_from_2ot(), eq_from_ot(2).unwrap(), eq_from_ot(3).unwrap(), ip_from_ot(3).unwrap()] {
        let t = transcript_table(&p).unwrap();
        let i = mutual_info_cond(&t, &[coord::OUT_B], &[coord::X, coord::U], &[coord::VIEW_B]).unwrap();
        assert_eq!(i, 0.0, "{}", p.name);
    }
}

/// OT on chosen inputs where Alice additionally announces `x_1`.
fn leaky_ot() -> ProtocolProgram {
    let mut b = StepBuilder::new();
    b.oracle("OT", rule(|v| v.input.clone()), rule(|v| v.input.clone()), ot_oracle());
    b.send(Party::Alice, rule(|v| vec![v.input[1]]));
    let bits = |n: usize| (0..1u8 << n).map(move |i| (0..n).map(|j| (i >> j) & 1).collect::<Vec<u8>>());
    let sims = Simulators {
        alice: Simulator {
            coins: vec![],
            run: Arc::new(|x, _, _| View {
                input: x.to_vec(),
                messages: vec![vec![x[1]]],
                oracle: vec![vec![]],
                ..View::default()
            }),
        },
        bob: Simulator {
            coins: vec![2],
            run: Arc::new(|y, out, r| View {
                input: y.to_vec(),
                messages: vec![if y[0] == 1 { out.to_vec() } else { vec![r[0]] }],
                oracle: vec![out.to_vec()],
                ..View::default()
            }),
        },
    };
    ProtocolProgram {
        name: "leaky-ot".into(),
        resource: None,
        alice_coins: vec![],
        bob_coins: vec![],
        steps: b.build(),
        alice_output: None,
        bob_output: rule(|v| v.oracle[0].clone()),
        x_domain: bits(2).collect(),
        y_domain: bits(1).collect(),
        ideal: Arc::new(|x, y| vec![(vec![], vec![x[y[0] as usize]], Prob::one())]),
        simulators: sims,
    }
}

#[test]
fn leaked_input_is_caught() {
    let p = leaky_ot();
    let r = verify_security(&p, &p.simulators).unwrap();
    assert!(r.correctness_error.is_zero());
    assert!(r.alice_distance.is_zero());
    assert!(r.bob_distance >= ratio(1, 2), "{r:?}");
}

#[test]
fn sampled_runs_are_correct_and_reproducible() {
    let p = derandomize_ot(3, 2).unwrap();
    let x = [1, 0, 0, 1, 1, 1];
    let a = run_sampled(&p, &x, &[1], 2000, 9).unwrap();
    let b = run_sampled(&p, &x, &[1], 2000, 9).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.correct, 2000);
    assert_eq!(a.outputs.get("|01"), Some(&2000));
    assert!(run_sampled(&p, &x, &[1], 0, 9).is_err());
}

#[test]
fn amplified_equality_false_accepts_are_rare() {
    let (k, trials) = (8, 20_000u64);
    let p = eq_amplify(6, k).unwrap();
    let run = run_sampled(&p, &[1, 0, 1, 1, 0, 0], &[1, 0, 1, 1, 0, 1], trials, 5).unwrap();
    let accepted = *run.outputs.get("|1").unwrap_or(&0) as f64 / trials as f64;
    let p0 = 1.0 / 256.0;
    let sigma = (p0 * (1.0 - p0) / trials as f64).sqrt();
    assert!(accepted <= p0 + 3.0 * sigma, "{accepted}");
}
