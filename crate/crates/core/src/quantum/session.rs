//! OT from commitments over EPR pairs.
//!
//! One session with choice bit `c`:
//!
//! 1. Alice and Bob share `m` EPR pairs. Bob picks bases `th_hat`, measures
//!    and commits to `(th_hat_i, x_hat_i)` in `kappa` blocks of `m / kappa`
//!    pairs. Alice picks bases `th`.
//! 2. Alice picks `alpha * kappa` blocks, Bob opens them, and Alice measures
//!    those qubits in Bob's bases. Wherever `th_i == th_hat_i` she requires
//!    `x_i == x_hat_i`; on a mismatch she aborts and outputs two random
//!    strings.
//! 3. Alice measures the remaining qubits in `th` and sends `th`. Bob sends
//!    `I_c = {i unopened : th_i == th_hat_i}` and `I_{1-c}` = the other
//!    unopened positions.
//! 4. Alice draws one Toeplitz hash per set, sized to that set, and outputs
//!    `z_j = f_j(x_{I_j})`. Bob outputs `f_c(x_hat_{I_c})`.
//!
//! Commitments are ideal here: Bob cannot change committed values.

use num_traits::ToPrimitive;
use rand::seq::index::sample;
use rand::Rng;

use super::hash::{hash_extract, HashSpec};
use super::state::{Basis, PairState};
use crate::dist::{ratio, Prob};
use crate::error::{Error, Result};

/// Which pair simulator a session uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Full 4x4 density matrix per pair.
    DensityMatrix,
    /// Classical emulation of EPR statistics: the first measurement of a
    /// pair gives a uniform bit, a later measurement of the other half agrees
    /// in the same basis and is independent otherwise.
    Classical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    /// Number of EPR pairs.
    pub m: usize,
    /// Number of commitment blocks.
    pub kappa: usize,
    /// Fraction of blocks opened for testing.
    pub alpha: Prob,
    /// Output string length.
    pub k: usize,
    pub engine: Engine,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig { m: 256, kappa: 16, alpha: ratio(1, 4), k: 8, engine: Engine::Classical }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kappa == 0 || self.m == 0 || self.m % self.kappa != 0 {
            return Err(Error::InvalidParameter(format!(
                "m = {} must be a positive multiple of kappa = {}",
                self.m, self.kappa
            )));
        }
        let opened = &self.alpha * Prob::from_integer(self.kappa.into());
        if !opened.is_integer() || opened >= Prob::from_integer(self.kappa.into()) || self.alpha < ratio(0, 1) {
            return Err(Error::InvalidParameter(format!(
                "alpha * kappa = {opened} must be an integer in [0, kappa)"
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("output length k must be positive".into()));
        }
        Ok(())
    }

    pub fn block_len(&self) -> usize {
        self.m / self.kappa
    }

    pub fn opened_blocks(&self) -> usize {
        (&self.alpha * Prob::from_integer(self.kappa.into())).to_integer().to_usize().unwrap()
    }
}

/// Bob's behaviour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Honest,
    /// Measures every qubit in one basis and commits honestly to it.
    FixedBasis(Basis),
    /// Commits to random bases and bits without measuring, then measures in
    /// Alice's bases once she reveals them.
    NoMeasureRandomCommit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionOutcome {
    pub c: u8,
    pub aborted: bool,
    /// Alice's outputs `(z_0, z_1)`.
    pub alice_z: [Vec<u8>; 2],
    /// Bob's output, meant to equal `z_c`.
    pub bob_z: Vec<u8>,
    /// Bob's best guess of both strings.
    pub bob_guess: [Vec<u8>; 2],
    /// Sizes of `I_0` and `I_1`.
    pub set_sizes: [usize; 2],
    /// What Bob committed to: `th_hat` bits followed by `x_hat`.
    pub commitment: Vec<u8>,
    /// Positions Alice asked Bob to open, ascending.
    pub opened: Vec<usize>,
}

impl SessionOutcome {
    pub fn correct(&self) -> bool {
        !self.aborted && self.bob_z == self.alice_z[self.c as usize]
    }

    pub fn guessed_both(&self) -> bool {
        self.bob_guess == self.alice_z
    }
}

enum Pairs {
    Dense(Vec<PairState>),
    Classical(Vec<Option<(Basis, u8)>>),
}

#[derive(Clone, Copy)]
enum Side {
    Alice,
    Bob,
}

impl Pairs {
    fn new(engine: Engine, m: usize) -> Pairs {
        match engine {
            Engine::DensityMatrix => Pairs::Dense(vec![PairState::epr(); m]),
            Engine::Classical => Pairs::Classical(vec![None; m]),
        }
    }

    fn measure(&mut self, i: usize, side: Side, basis: Basis, rng: &mut impl Rng) -> u8 {
        match self {
            Pairs::Dense(states) => {
                let (bit, post) = match side {
                    Side::Alice => states[i].measure_alice(basis, rng),
                    Side::Bob => states[i].measure_bob(basis, rng),
                };
                states[i] = post;
                bit
            }
            Pairs::Classical(first) => match first[i] {
                Some((b, bit)) if b == basis => bit,
                Some(_) => rng.random_range(0..2),
                None => {
                    let bit = rng.random_range(0..2);
                    first[i] = Some((basis, bit));
                    bit
                }
            },
        }
    }
}

fn random_bits(n: usize, rng: &mut impl Rng) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2)).collect()
}

fn pick(bits: &[u8], idx: &[usize]) -> Vec<u8> {
    idx.iter().map(|&i| bits[i]).collect()
}

/// One session with an honest Alice and Bob playing `strategy`.
pub fn adversary_run(cfg: &SessionConfig, strategy: Strategy, c: u8, rng: &mut impl Rng) -> Result<SessionOutcome> {
    cfg.validate()?;
    if c > 1 {
        return Err(Error::InvalidParameter("choice bit must be 0 or 1".into()));
    }
    let m = cfg.m;
    let mut pairs = Pairs::new(cfg.engine, m);

    let th_hat: Vec<Basis> = match strategy {
        Strategy::FixedBasis(b) => vec![b; m],
        _ => random_bits(m, rng).into_iter().map(Basis::from_bit).collect(),
    };
    let x_hat: Vec<u8> = match strategy {
        Strategy::NoMeasureRandomCommit => random_bits(m, rng),
        _ => (0..m).map(|i| pairs.measure(i, Side::Bob, th_hat[i], rng)).collect(),
    };
    let th: Vec<Basis> = random_bits(m, rng).into_iter().map(Basis::from_bit).collect();

    let b = cfg.block_len();
    let mut opened = vec![false; m];
    for blk in sample(rng, cfg.kappa, cfg.opened_blocks()).into_iter() {
        opened[blk * b..(blk + 1) * b].iter_mut().for_each(|o| *o = true);
    }

    let mut x = vec![0u8; m];
    let mut aborted = false;
    for i in (0..m).filter(|&i| opened[i]) {
        x[i] = pairs.measure(i, Side::Alice, th_hat[i], rng);
        if th[i] == th_hat[i] && x[i] != x_hat[i] {
            aborted = true;
        }
    }
    for i in (0..m).filter(|&i| !opened[i]) {
        x[i] = pairs.measure(i, Side::Alice, th[i], rng);
    }

    let rest: Vec<usize> = (0..m).filter(|&i| !opened[i]).collect();
    let matching: Vec<usize> = rest.iter().copied().filter(|&i| th[i] == th_hat[i]).collect();
    let other: Vec<usize> = rest.iter().copied().filter(|&i| th[i] != th_hat[i]).collect();
    let sets = if c == 0 { [matching, other] } else { [other, matching] };

    // What Bob holds about the unopened positions.
    let bob_x: Vec<u8> = match strategy {
        Strategy::NoMeasureRandomCommit => {
            let mut v = x_hat.clone();
            for &i in &rest {
                v[i] = pairs.measure(i, Side::Bob, th[i], rng);
            }
            v
        }
        _ => x_hat.clone(),
    };

    let f = [
        HashSpec::random(sets[0].len(), cfg.k, rng)?,
        HashSpec::random(sets[1].len(), cfg.k, rng)?,
    ];
    let honest_z = [hash_extract(&f[0], &pick(&x, &sets[0]))?, hash_extract(&f[1], &pick(&x, &sets[1]))?];
    let alice_z = if aborted { [random_bits(cfg.k, rng), random_bits(cfg.k, rng)] } else { honest_z };
    let bob_guess = [
        hash_extract(&f[0], &pick(&bob_x, &sets[0]))?,
        hash_extract(&f[1], &pick(&bob_x, &sets[1]))?,
    ];
    Ok(SessionOutcome {
        c,
        aborted,
        alice_z,
        bob_z: bob_guess[c as usize].clone(),
        bob_guess,
        set_sizes: [sets[0].len(), sets[1].len()],
        commitment: th_hat.iter().map(|b| b.bit()).chain(x_hat.iter().copied()).collect(),
        opened: (0..m).filter(|&i| opened[i]).collect(),
    })
}

/// One session with both parties honest.
pub fn honest_run(cfg: &SessionConfig, c: u8, rng: &mut impl Rng) -> Result<SessionOutcome> {
    adversary_run(cfg, Strategy::Honest, c, rng)
}

/// Aggregate of many sessions.
#[derive(Clone, Debug, PartialEq)]
pub struct SessionStats {
    pub trials: u64,
    pub aborts: u64,
    /// Non-aborted sessions where Bob's output equals `z_c`.
    pub correct: u64,
    /// Sessions where Bob guessed both strings.
    pub guessed_both: u64,
}

impl SessionStats {
    pub fn pass_rate(&self) -> f64 {
        1.0 - self.aborts as f64 / self.trials as f64
    }

    pub fn correctness_rate(&self) -> f64 {
        let passed = self.trials - self.aborts;
        if passed == 0 {
            return 0.0;
        }
        self.correct as f64 / passed as f64
    }

    /// Rate of guessing both strings beyond the `2^-k` a receiver who knows
    /// only `z_c` achieves by guessing.
    pub fn advantage(&self, k: usize) -> f64 {
        self.guessed_both as f64 / self.trials as f64 - 0.5f64.powi(k as i32)
    }
}

/// Runs `trials` sessions; trial `i` uses stream `i` of `seed` and choice
/// bit `i mod 2`.
pub fn run_sessions(cfg: &SessionConfig, strategy: Strategy, trials: u64, seed: u64) -> Result<SessionStats> {
    use rayon::prelude::*;
    cfg.validate()?;
    let outcomes: Result<Vec<SessionOutcome>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = crate::protocol::trial_rng(seed, i);
            adversary_run(cfg, strategy, (i % 2) as u8, &mut rng)
        })
        .collect();
    let outcomes = outcomes?;
    Ok(SessionStats {
        trials,
        aborts: outcomes.iter().filter(|o| o.aborted).count() as u64,
        correct: outcomes.iter().filter(|o| o.correct()).count() as u64,
        guessed_both: outcomes.iter().filter(|o| o.guessed_both()).count() as u64,
    })
}
