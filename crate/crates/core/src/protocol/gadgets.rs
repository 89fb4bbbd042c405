//! Protocols built from an ideal OT functionality: AND shares, equality,
//! inner product and randomized equality.

use std::sync::Arc;

use num_traits::One;

use super::{rule, Functionality, IdealFn, Party, ProtocolProgram, Simulator, Simulators, StepBuilder, Value, View};
use crate::dist::ratio;
use crate::error::{Error, Result};

/// Ideal 1-out-of-2 string OT. Alice inputs `m0 || m1`, Bob inputs `[c]`;
/// Bob receives `m_c`, Alice receives nothing.
pub fn ot_oracle() -> Functionality {
    Arc::new(|a: &[u8], b: &[u8]| {
        let half = a.len() / 2;
        let c = b[0] as usize;
        (Vec::new(), a[c * half..(c + 1) * half].to_vec())
    })
}

fn all_strings(n: usize) -> Vec<Value> {
    (0..1u32 << n).map(|i| (0..n).map(|j| ((i >> (n - 1 - j)) & 1) as u8).collect()).collect()
}

fn deterministic(f: impl Fn(&[u8], &[u8]) -> (Value, Value) + Send + Sync + 'static) -> IdealFn {
    Arc::new(move |x, y| {
        let (a, b) = f(x, y);
        vec![(a, b, num_rational::BigRational::one())]
    })
}

/// Shares of `(x1 ^ y1) & (x2 ^ y2)` from two OT calls. Alice holds
/// `x = (x1, x2)` and outputs `a`, Bob holds `y = (y1, y2)` and outputs `b`,
/// with `a` uniform and `a ^ b` the AND.
pub fn and_share_from_2ot() -> ProtocolProgram {
    let mut b = StepBuilder::new();
    b.oracle(
        "OT",
        rule(|v| vec![v.coins[0], v.coins[0] ^ v.input[0]]),
        rule(|v| vec![v.input[1]]),
        ot_oracle(),
    );
    b.oracle(
        "OT",
        rule(|v| vec![v.coins[1], v.coins[1] ^ v.input[1]]),
        rule(|v| vec![v.input[0]]),
        ot_oracle(),
    );
    let sims = Simulators {
        alice: Simulator {
            coins: vec![2],
            run: Arc::new(|x, out, r| {
                let r1 = r[0];
                let r2 = out[0] ^ r1 ^ (x[0] & x[1]);
                View { input: x.to_vec(), coins: vec![r1, r2], oracle: vec![vec![], vec![]], ..View::default() }
            }),
        },
        bob: Simulator {
            coins: vec![2],
            run: Arc::new(|y, out, r| {
                let z1 = r[0];
                let z2 = out[0] ^ z1 ^ (y[0] & y[1]);
                View { input: y.to_vec(), oracle: vec![vec![z1], vec![z2]], ..View::default() }
            }),
        },
    };
    ProtocolProgram {
        name: "and-share".into(),
        resource: None,
        alice_coins: vec![2, 2],
        bob_coins: vec![],
        steps: b.build(),
        alice_output: Some(rule(|v| vec![v.coins[0] ^ v.coins[1] ^ (v.input[0] & v.input[1])])),
        bob_output: rule(|v| vec![v.oracle[0][0] ^ v.oracle[1][0] ^ (v.input[0] & v.input[1])]),
        x_domain: all_strings(2),
        y_domain: all_strings(2),
        ideal: Arc::new(|x, y| {
            let and = (x[0] ^ y[0]) & (x[1] ^ y[1]);
            (0..2u8).map(|a| (vec![a], vec![a ^ and], ratio(1, 2))).collect()
        }),
        simulators: sims,
    }
}

type Lits = Arc<dyn Fn(&View) -> Vec<u8> + Send + Sync>;

/// Alice's share after `stage` AND gadgets of the equality chain.
fn alice_share(lits: &[u8], coins: &[u8], stage: usize) -> u8 {
    let mut a = lits[0];
    for i in 1..=stage {
        let (r1, r2) = (coins[2 * (i - 1)], coins[2 * (i - 1) + 1]);
        a = r1 ^ r2 ^ (a & lits[i]);
    }
    a
}

/// Bob's share after `stage` gadgets, given the OT outputs he received.
fn bob_share(lits: &[u8], z: &[u8], stage: usize) -> u8 {
    let mut b = lits[0];
    for i in 1..=stage {
        let (z1, z2) = (z[2 * (i - 1)], z[2 * (i - 1) + 1]);
        b = z1 ^ z2 ^ (b & lits[i]);
    }
    b
}

/// Appends the AND chain over `k` literals, each literal XOR-shared as
/// `alice_lits[i] ^ bob_lits[i]`, followed by Alice revealing her final
/// share. Uses `2(k-1)` OT calls. Alice's chain coins start at `coin_off`.
fn push_and_chain(b: &mut StepBuilder, k: usize, alice_lits: Lits, bob_lits: Lits, coin_off: usize) {
    for stage in 1..k {
        let (al, bl) = (alice_lits.clone(), bob_lits.clone());
        b.oracle(
            "OT",
            rule(move |v| {
                let a = alice_share(&al(v), &v.coins[coin_off..], stage - 1);
                let r1 = v.coins[coin_off + 2 * (stage - 1)];
                vec![r1, r1 ^ a]
            }),
            rule(move |v| vec![bl(v)[stage]]),
            ot_oracle(),
        );
        let (al, bl) = (alice_lits.clone(), bob_lits.clone());
        b.oracle(
            "OT",
            rule(move |v| {
                let x2 = al(v)[stage];
                let r2 = v.coins[coin_off + 2 * (stage - 1) + 1];
                vec![r2, r2 ^ x2]
            }),
            rule(move |v| {
                let z: Vec<u8> = v.oracle.iter().map(|o| o[0]).collect();
                vec![bob_share(&bl(v), &z, stage - 1)]
            }),
            ot_oracle(),
        );
    }
    b.send(
        Party::Alice,
        rule(move |v| vec![alice_share(&alice_lits(v), &v.coins[coin_off..], k - 1)]),
    );
}

fn bob_chain_output(bob_lits: Lits, k: usize) -> super::Rule {
    rule(move |v| {
        let z: Vec<u8> = v.oracle.iter().map(|o| o[0]).collect();
        let a = v.messages.last().unwrap()[0];
        vec![a ^ bob_share(&bob_lits(v), &z, k - 1)]
    })
}

/// Equality of two `k`-bit strings with output to Bob, from `2(k-1)` OTs.
pub fn eq_from_ot(k: usize) -> Result<ProtocolProgram> {
    if k == 0 || k > 16 {
        return Err(Error::InvalidParameter(format!("eq_from_ot needs 1 <= k <= 16, got {k}")));
    }
    let alice_lits: Lits = Arc::new(|v: &View| v.input.iter().map(|x| x ^ 1).collect());
    let bob_lits: Lits = Arc::new(|v: &View| v.input.clone());
    let mut b = StepBuilder::new();
    push_and_chain(&mut b, k, alice_lits, bob_lits.clone(), 0);
    let calls = 2 * (k - 1);
    let sims = Simulators {
        alice: Simulator {
            coins: vec![2; calls],
            run: Arc::new(move |x, _, r| {
                let lits: Vec<u8> = x.iter().map(|b| b ^ 1).collect();
                View {
                    input: x.to_vec(),
                    coins: r.to_vec(),
                    messages: vec![vec![alice_share(&lits, r, k - 1)]],
                    oracle: vec![vec![]; calls],
                    ..View::default()
                }
            }),
        },
        bob: Simulator {
            coins: vec![2; calls],
            run: Arc::new(move |y, out, z| {
                let a = out[0] ^ bob_share(y, z, k - 1);
                View {
                    input: y.to_vec(),
                    messages: vec![vec![a]],
                    oracle: z.iter().map(|&b| vec![b]).collect(),
                    ..View::default()
                }
            }),
        },
    };
    Ok(ProtocolProgram {
        name: format!("eq-from-ot({k})"),
        resource: None,
        alice_coins: vec![2; calls],
        bob_coins: vec![],
        steps: b.build(),
        alice_output: None,
        bob_output: bob_chain_output(bob_lits, k),
        x_domain: all_strings(k),
        y_domain: all_strings(k),
        ideal: deterministic(|x, y| (vec![], vec![u8::from(x == y)])),
        simulators: sims,
    })
}

/// Inner product mod 2 of two `n`-bit strings with output to Bob, from `n`
/// OTs. Alice masks bit `i` with `r_i`, where the masks XOR to zero.
pub fn ip_from_ot(n: usize) -> Result<ProtocolProgram> {
    if n == 0 || n > 16 {
        return Err(Error::InvalidParameter(format!("ip_from_ot needs 1 <= n <= 16, got {n}")));
    }
    let mask = |coins: &[u8], i: usize, n: usize| -> u8 {
        if i + 1 < n {
            coins[i]
        } else {
            coins.iter().fold(0, |a, b| a ^ b)
        }
    };
    let mut b = StepBuilder::new();
    for i in 0..n {
        b.oracle(
            "OT",
            rule(move |v| {
                let r = mask(&v.coins, i, n);
                vec![r, r ^ v.input[i]]
            }),
            rule(move |v| vec![v.input[i]]),
            ot_oracle(),
        );
    }
    let sims = Simulators {
        alice: Simulator {
            coins: vec![2; n - 1],
            run: Arc::new(move |x, _, r| View {
                input: x.to_vec(),
                coins: r.to_vec(),
                oracle: vec![vec![]; n],
                ..View::default()
            }),
        },
        bob: Simulator {
            coins: vec![2; n - 1],
            run: Arc::new(move |y, out, z| {
                let last = z.iter().fold(out[0], |a, b| a ^ b);
                let mut oracle: Vec<Value> = z.iter().map(|&b| vec![b]).collect();
                oracle.push(vec![last]);
                View { input: y.to_vec(), oracle, ..View::default() }
            }),
        },
    };
    Ok(ProtocolProgram {
        name: format!("ip-from-ot({n})"),
        resource: None,
        alice_coins: vec![2; n - 1],
        bob_coins: vec![],
        steps: b.build(),
        alice_output: None,
        bob_output: rule(|v| vec![v.oracle.iter().fold(0, |a, o| a ^ o[0])]),
        x_domain: all_strings(n),
        y_domain: all_strings(n),
        ideal: deterministic(|x, y| {
            (vec![], vec![x.iter().zip(y).fold(0, |a, (p, q)| a ^ (p & q))])
        }),
        simulators: sims,
    })
}

fn inner(x: &[u8], r: &[u8]) -> u8 {
    x.iter().zip(r).fold(0, |a, (p, q)| a ^ (p & q))
}

/// Randomized equality of `n`-bit strings: Alice sends `k` random strings
/// `r_j`, then both run the `k`-literal equality chain on
/// `<x, r_j>` and `<y, r_j>`. Unequal inputs are accepted with probability
/// exactly `2^-k`. Input domains are enumerated only for `n <= 12`.
pub fn eq_amplify(n: usize, k: usize) -> Result<ProtocolProgram> {
    if n == 0 || k == 0 || k > 64 || n * k > 4096 {
        return Err(Error::InvalidParameter(format!("eq_amplify(n={n}, k={k}) out of range")));
    }
    let rk = n * k;
    let strings = move |m: &[u8]| -> Vec<Vec<u8>> { m.chunks(n).map(|c| c.to_vec()).collect() };
    let alice_lits: Lits = Arc::new(move |v: &View| {
        strings(&v.coins[..rk]).iter().map(|r| inner(&v.input, r) ^ 1).collect()
    });
    let bob_lits: Lits = Arc::new(move |v: &View| {
        strings(&v.messages[0]).iter().map(|r| inner(&v.input, r)).collect()
    });
    let mut b = StepBuilder::new();
    b.send(Party::Alice, rule(move |v| v.coins[..rk].to_vec()));
    push_and_chain(&mut b, k, alice_lits, bob_lits.clone(), rk);
    let calls = 2 * (k - 1);
    let sims = Simulators {
        alice: Simulator {
            coins: vec![2; rk + calls],
            run: Arc::new(move |x, _, r| {
                let lits: Vec<u8> = strings(&r[..rk]).iter().map(|s| inner(x, s) ^ 1).collect();
                View {
                    input: x.to_vec(),
                    coins: r.to_vec(),
                    messages: vec![r[..rk].to_vec(), vec![], vec![alice_share(&lits, &r[rk..], k - 1)]],
                    oracle: vec![vec![]; calls],
                    ..View::default()
                }
            }),
        },
        bob: Simulator {
            coins: vec![2; rk + calls],
            run: Arc::new(move |y, out, r| {
                let lits: Vec<u8> = strings(&r[..rk]).iter().map(|s| inner(y, s)).collect();
                let a = out[0] ^ bob_share(&lits, &r[rk..], k - 1);
                View {
                    input: y.to_vec(),
                    messages: vec![r[..rk].to_vec(), vec![], vec![a]],
                    oracle: r[rk..].iter().map(|&b| vec![b]).collect(),
                    ..View::default()
                }
            }),
        },
    };
    let domain = if n <= 12 { all_strings(n) } else { Vec::new() };
    Ok(ProtocolProgram {
        name: format!("eq-amplify({n},{k})"),
        resource: None,
        alice_coins: vec![2; rk + calls],
        bob_coins: vec![],
        steps: b.build(),
        alice_output: None,
        bob_output: bob_chain_output(bob_lits, k),
        x_domain: domain.clone(),
        y_domain: domain,
        ideal: deterministic(|x, y| (vec![], vec![u8::from(x == y)])),
        simulators: sims,
    })
}
