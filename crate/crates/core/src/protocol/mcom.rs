//! String commitment from `kappa` instances of `OT(1, 2, k)`.
//!
//! Commit(`b`): for each instance `i` the sender feeds random `x0^i, x1^i`
//! into the OT, the receiver picks a random `c^i` and gets `y^i = x_{c^i}^i`,
//! and the sender sends `m^i = x0^i ^ x1^i ^ b`.
//!
//! Open(`T`): the sender reveals `b_T` and `x0^i_T, x1^i_T`. The receiver
//! accepts if `m^i_T = x0^i_T ^ x1^i_T ^ b_T` and `y^i_T = x_{c^i}^i_T` for
//! every `i`.
//!
//! A cheating sender must alter one of the two OT inputs of every instance
//! whose message does not match the opened value, and is caught unless it
//! always alters the one the receiver did not choose.

use num_traits::{One, Zero};
use rand::{Rng, RngCore};

use crate::dist::{check_budget, ratio, Prob};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mcom {
    /// Committed string length.
    pub k: usize,
    /// Number of OT instances.
    pub kappa: usize,
}

/// Sender state after the commit phase: the OT inputs it used and the
/// messages it sent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McomSender {
    pub b: Vec<u8>,
    pub x0: Vec<Vec<u8>>,
    pub x1: Vec<Vec<u8>>,
    pub m: Vec<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McomReceiver {
    pub c: Vec<u8>,
    pub y: Vec<Vec<u8>>,
    pub m: Vec<Vec<u8>>,
}

/// Opening of the positions `t`; `x0[i]` and `x1[i]` are restricted to `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McomOpening {
    pub t: Vec<usize>,
    pub b_t: Vec<u8>,
    pub x0: Vec<Vec<u8>>,
    pub x1: Vec<Vec<u8>>,
}

/// How the sender commits and opens.
pub trait SenderStrategy: Send + Sync {
    fn commit(&self, mcom: &Mcom, b: &[u8], rng: &mut dyn RngCore) -> McomSender;
    fn open(&self, mcom: &Mcom, state: &McomSender, t: &[usize]) -> McomOpening;
}

fn random_bits(n: usize, rng: &mut dyn RngCore) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

fn xor3(a: &[u8], b: &[u8], c: &[u8]) -> Vec<u8> {
    a.iter().zip(b).zip(c).map(|((x, y), z)| x ^ y ^ z).collect()
}

fn honest_commit(mcom: &Mcom, b: &[u8], rng: &mut dyn RngCore) -> McomSender {
    let x0: Vec<Vec<u8>> = (0..mcom.kappa).map(|_| random_bits(mcom.k, rng)).collect();
    let x1: Vec<Vec<u8>> = (0..mcom.kappa).map(|_| random_bits(mcom.k, rng)).collect();
    let m = x0.iter().zip(&x1).map(|(a, c)| xor3(a, c, b)).collect();
    McomSender { b: b.to_vec(), x0, x1, m }
}

fn restrict(v: &[u8], t: &[usize]) -> Vec<u8> {
    t.iter().map(|&j| v[j]).collect()
}

fn honest_open(state: &McomSender, t: &[usize]) -> McomOpening {
    McomOpening {
        t: t.to_vec(),
        b_t: restrict(&state.b, t),
        x0: state.x0.iter().map(|x| restrict(x, t)).collect(),
        x1: state.x1.iter().map(|x| restrict(x, t)).collect(),
    }
}

/// Claims `b` with position `bit` flipped, patching in every instance the
/// OT input it guesses the receiver did not choose.
fn flipped_open(state: &McomSender, t: &[usize], bit: usize, guesses: &[u8], instances: &[usize]) -> McomOpening {
    let mut o = honest_open(state, t);
    if let Some(pos) = t.iter().position(|&j| j == bit) {
        o.b_t[pos] ^= 1;
        for &i in instances {
            if guesses.get(i).copied().unwrap_or(0) == 0 {
                o.x1[i][pos] ^= 1;
            } else {
                o.x0[i][pos] ^= 1;
            }
        }
    }
    o
}

pub struct Honest;

impl SenderStrategy for Honest {
    fn commit(&self, mcom: &Mcom, b: &[u8], rng: &mut dyn RngCore) -> McomSender {
        honest_commit(mcom, b, rng)
    }

    fn open(&self, _: &Mcom, state: &McomSender, t: &[usize]) -> McomOpening {
        honest_open(state, t)
    }
}

/// Commits honestly, then opens position `bit` to the wrong value.
/// `guesses[i]` is the sender's guess of the receiver's choice in instance `i`.
pub struct FlipOneBit {
    pub bit: usize,
    pub guesses: Vec<u8>,
}

impl SenderStrategy for FlipOneBit {
    fn commit(&self, mcom: &Mcom, b: &[u8], rng: &mut dyn RngCore) -> McomSender {
        honest_commit(mcom, b, rng)
    }

    fn open(&self, mcom: &Mcom, state: &McomSender, t: &[usize]) -> McomOpening {
        let all: Vec<usize> = (0..mcom.kappa).collect();
        flipped_open(state, t, self.bit, &self.guesses, &all)
    }
}

/// Sends messages for `b` in the first half of the instances and for `b`
/// with `bit` flipped in the second half, then opens the flipped value. Only
/// the first half needs patching.
pub struct Equivocate {
    pub bit: usize,
    pub guesses: Vec<u8>,
}

impl SenderStrategy for Equivocate {
    fn commit(&self, mcom: &Mcom, b: &[u8], rng: &mut dyn RngCore) -> McomSender {
        let mut s = honest_commit(mcom, b, rng);
        for m in s.m.iter_mut().skip(mcom.kappa / 2) {
            if let Some(v) = m.get_mut(self.bit) {
                *v ^= 1;
            }
        }
        s
    }

    fn open(&self, mcom: &Mcom, state: &McomSender, t: &[usize]) -> McomOpening {
        let first: Vec<usize> = (0..mcom.kappa / 2).collect();
        flipped_open(state, t, self.bit, &self.guesses, &first)
    }
}

pub fn mcom_from_ot(k: usize, kappa: usize) -> Result<Mcom> {
    if kappa == 0 {
        return Err(Error::InvalidParameter("commitment needs at least one OT instance".into()));
    }
    Ok(Mcom { k, kappa })
}

impl Mcom {
    pub fn new(k: usize, kappa: usize) -> Result<Mcom> {
        mcom_from_ot(k, kappa)
    }

    /// Runs the commit phase with a random receiver.
    pub fn commit(
        &self,
        sender: &dyn SenderStrategy,
        b: &[u8],
        rng: &mut dyn RngCore,
    ) -> Result<(McomSender, McomReceiver)> {
        if b.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, got: b.len() });
        }
        let s = sender.commit(self, b, rng);
        self.check_sender(&s)?;
        let c = random_bits(self.kappa, rng);
        let r = self.receive(&s, &c);
        Ok((s, r))
    }

    /// Receiver state for choice bits `c` against sender state `s`.
    pub fn receive(&self, s: &McomSender, c: &[u8]) -> McomReceiver {
        let y = c.iter().enumerate().map(|(i, &ci)| if ci == 0 { s.x0[i].clone() } else { s.x1[i].clone() }).collect();
        McomReceiver { c: c.to_vec(), y, m: s.m.clone() }
    }

    fn check_sender(&self, s: &McomSender) -> Result<()> {
        let ok = |v: &Vec<Vec<u8>>| v.len() == self.kappa && v.iter().all(|x| x.len() == self.k);
        if !(ok(&s.x0) && ok(&s.x1) && ok(&s.m)) {
            return Err(Error::MalformedOpening("sender state has the wrong shape".into()));
        }
        Ok(())
    }

    fn check_opening(&self, o: &McomOpening) -> Result<()> {
        if o.t.windows(2).any(|w| w[0] >= w[1]) || o.t.last().is_some_and(|&j| j >= self.k) {
            return Err(Error::MalformedOpening("positions must be ascending and below k".into()));
        }
        let n = o.t.len();
        let ok = |v: &Vec<Vec<u8>>| v.len() == self.kappa && v.iter().all(|x| x.len() == n);
        if o.b_t.len() != n || !ok(&o.x0) || !ok(&o.x1) {
            return Err(Error::MalformedOpening("opened values do not match the positions".into()));
        }
        Ok(())
    }

    /// Whether instance `i` passes the check for choice bit `ci`.
    fn instance_ok(&self, m: &[u8], y: &[u8], ci: u8, o: &McomOpening, i: usize) -> bool {
        o.t.iter().enumerate().all(|(p, &j)| {
            let chosen = if ci == 0 { o.x0[i][p] } else { o.x1[i][p] };
            m[j] == o.x0[i][p] ^ o.x1[i][p] ^ o.b_t[p] && y[j] == chosen
        })
    }

    /// Receiver's check. `Some(b_T)` on acceptance, `None` on rejection.
    pub fn verify(&self, r: &McomReceiver, o: &McomOpening) -> Result<Option<Vec<u8>>> {
        self.check_opening(o)?;
        let ok = (0..self.kappa).all(|i| self.instance_ok(&r.m[i], &r.y[i], r.c[i], o, i));
        Ok(ok.then(|| o.b_t.clone()))
    }

    /// Bitwise majority of `m^i ^ x0^i ^ x1^i`; ties give 0.
    pub fn extract(&self, s: &McomSender) -> Vec<u8> {
        (0..self.k)
            .map(|j| {
                let ones = (0..self.kappa).filter(|&i| s.m[i][j] ^ s.x0[i][j] ^ s.x1[i][j] == 1).count();
                u8::from(2 * ones > self.kappa)
            })
            .collect()
    }

    /// Exact probability over the receiver's uniform choice bits that `o` is
    /// accepted against sender state `s`. Instances are independent, so this
    /// is the product of the per-instance pass fractions.
    pub fn acceptance_probability(&self, s: &McomSender, o: &McomOpening) -> Result<Prob> {
        self.check_opening(o)?;
        let mut p = Prob::one();
        for i in 0..self.kappa {
            let y = [&s.x0[i], &s.x1[i]];
            let pass = (0..2u8).filter(|&ci| self.instance_ok(&s.m[i], y[ci as usize], ci, o, i)).count();
            p *= ratio(pass as i64, 2);
            if p.is_zero() {
                break;
            }
        }
        Ok(p)
    }

    /// The same probability by enumerating every choice vector.
    pub fn acceptance_probability_enumerated(&self, s: &McomSender, o: &McomOpening) -> Result<Prob> {
        self.check_opening(o)?;
        check_budget(1u128 << self.kappa.min(127))?;
        let mut accepted = 0u64;
        for mask in 0..1u64 << self.kappa {
            let c: Vec<u8> = (0..self.kappa).map(|i| ((mask >> i) & 1) as u8).collect();
            if self.verify(&self.receive(s, &c), o)?.is_some() {
                accepted += 1;
            }
        }
        Ok(Prob::new(accepted.into(), (1u128 << self.kappa).into()))
    }
}
