//! Checkers for the entropy inequalities, shared by the property tests and
//! the acceptance target. Each returns `Err` with a description on violation.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;
use otbounds::dist::{ratio, stat_distance};
use otbounds::entropy::{binary_entropy, shannon_cond, smooth_max_entropy, smooth_min_entropy};
use otbounds::{Alphabet, JointDist, MultiDist, Prob};
use rand::Rng;

use super::{h, table_from_weights};

pub const TOL: f64 = 1e-9;

pub type Check = std::result::Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn weight(rng: &mut impl Rng) -> u32 {
    if rng.random_bool(0.25) {
        0
    } else {
        rng.random_range(1..=9)
    }
}

fn alphabet(prefix: &str, n: usize) -> Alphabet {
    Alphabet::from_labels((0..n).map(|i| format!("{prefix}{i}"))).unwrap()
}

/// Random table over `dims.len()` coordinates with the given alphabet sizes.
pub fn random_multi(rng: &mut impl Rng, dims: &[usize]) -> MultiDist {
    let total_cells: usize = dims.iter().product();
    let mut w: Vec<u32> = (0..total_cells).map(|_| weight(rng)).collect();
    if w.iter().all(|&v| v == 0) {
        w[0] = 1;
    }
    let total: u64 = w.iter().map(|&v| v as u64).sum();
    let names = ["x", "y", "z", "w"];
    let alphabets = dims.iter().enumerate().map(|(i, &n)| alphabet(names[i % 4], n)).collect();
    let mut raw = Vec::new();
    for (cell, &v) in w.iter().enumerate() {
        let mut idx = Vec::with_capacity(dims.len());
        let mut rest = cell;
        for &d in dims.iter().rev() {
            idx.push(rest % d);
            rest /= d;
        }
        idx.reverse();
        raw.push((idx, Prob::new(BigInt::from(v), BigInt::from(total))));
    }
    MultiDist::new(alphabets, raw).unwrap()
}

fn dims(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(1..=3)).collect()
}

pub fn random_triple(rng: &mut impl Rng) -> MultiDist {
    let d = dims(rng, 3);
    random_multi(rng, &d)
}

/// Row-stochastic matrix with `rows x cols` rational entries.
fn channel(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<Prob>> {
    (0..rows)
        .map(|_| {
            let mut w: Vec<u32> = (0..cols).map(|_| weight(rng)).collect();
            if w.iter().all(|&v| v == 0) {
                w[rng.random_range(0..cols)] = 1;
            }
            let t: u32 = w.iter().sum();
            w.into_iter().map(|v| ratio(v as i64, t as i64)).collect()
        })
        .collect()
}

/// `P_XYZ = P_XY P_{Z|Y}`, so that `X <-> Y <-> Z`.
pub fn random_markov(rng: &mut impl Rng) -> MultiDist {
    let d = dims(rng, 3);
    let xy = random_multi(rng, &d[..2]);
    let ch = channel(rng, d[1], d[2]);
    let mut raw = Vec::new();
    for (idx, p) in xy.atoms() {
        for (z, q) in ch[idx[1]].iter().enumerate() {
            raw.push((vec![idx[0], idx[1], z], p * q));
        }
    }
    MultiDist::new(vec![alphabet("x", d[0]), alphabet("y", d[1]), alphabet("z", d[2])], raw).unwrap()
}

/// `(X, Y, Z, W)` with `W` drawn from `(X, Z)` alone, so `W <-> XZ <-> Y`.
pub fn random_markov_w(rng: &mut impl Rng) -> MultiDist {
    let t = random_triple(rng);
    let (nx, nz) = (t.alphabet(0).len(), t.alphabet(2).len());
    let nw = rng.random_range(1..=3);
    let ch = channel(rng, nx * nz, nw);
    let mut raw = Vec::new();
    for (idx, p) in t.atoms() {
        for (w, q) in ch[idx[0] * nz + idx[2]].iter().enumerate() {
            raw.push((vec![idx[0], idx[1], idx[2], w], p * q));
        }
    }
    let alphabets = (0..3).map(|c| t.alphabet(c).clone()).chain([alphabet("w", nw)]).collect();
    MultiDist::new(alphabets, raw).unwrap()
}

/// Two smoothing parameters on a 1/20 grid with `a + b < 1`.
pub fn random_eps_pair(rng: &mut impl Rng) -> (Prob, Prob) {
    let a = rng.random_range(0..20i64);
    let b = rng.random_range(0..20 - a);
    (ratio(a, 20), ratio(b, 20))
}

fn hc(t: &MultiDist, xs: &[usize], ys: &[usize]) -> f64 {
    shannon_cond(&t.group(xs, ys).unwrap())
}

fn hmin(t: &MultiDist, xs: &[usize], ys: &[usize], eps: &Prob) -> f64 {
    smooth_min_entropy(&t.group(xs, ys).unwrap(), eps).unwrap().value
}

fn hmax(t: &MultiDist, xs: &[usize], ys: &[usize], eps: &Prob) -> f64 {
    smooth_max_entropy(&t.group(xs, ys).unwrap(), eps).unwrap().value
}

/// `I(X;Y|Z)` without clamping, so rounding below zero stays visible.
fn ic(t: &MultiDist, xs: &[usize], ys: &[usize], zs: &[usize]) -> f64 {
    let yz: Vec<usize> = ys.iter().chain(zs).copied().collect();
    hc(t, xs, zs) - hc(t, xs, &yz)
}

pub fn subadditivity(rng: &mut impl Rng) -> Check {
    let t = random_triple(rng);
    let (e1, e2) = random_eps_pair(rng);
    let lhs = hmax(&t, &[0, 1], &[2], &(&e1 + &e2));
    let rhs = hmax(&t, &[0], &[2], &e1) + hmax(&t, &[1], &[0, 2], &e2);
    ensure(lhs <= rhs + TOL, || format!("Hmax^(e+e')(XY|Z) = {lhs} > {rhs} at e={e1}, e'={e2}"))
}

pub fn min_monotonicity(rng: &mut impl Rng) -> Check {
    let t = random_triple(rng);
    let (e, _) = random_eps_pair(rng);
    let a = hmin(&t, &[0], &[2], &e);
    let b = hmin(&t, &[0], &[1, 2], &e);
    ensure(a >= b - TOL, || format!("Hmin(X|Z) = {a} < Hmin(X|YZ) = {b} at e={e}"))
}

pub fn max_monotonicity(rng: &mut impl Rng) -> Check {
    let t = random_triple(rng);
    let (e, _) = random_eps_pair(rng);
    let a = hmax(&t, &[0, 1], &[2], &e);
    let b = hmax(&t, &[0], &[2], &e);
    let c = hmax(&t, &[0], &[1, 2], &e);
    ensure(a >= b - TOL && b >= c - TOL, || format!("Hmax chain {a} >= {b} >= {c} fails at e={e}"))
}

pub fn chain(rng: &mut impl Rng) -> Check {
    let t = random_triple(rng);
    let (e1, e2) = random_eps_pair(rng);
    let lhs = hmin(&t, &[0], &[2], &e1) - hmax(&t, &[0], &[1, 2], &e2);
    let rhs = hmin(&t, &[1], &[2], &(&e1 + &e2));
    ensure(lhs <= rhs + TOL, || format!("{lhs} > Hmin^(e+e')(Y|Z) = {rhs} at e={e1}, e'={e2}"))
}

pub fn data_processing_min(rng: &mut impl Rng) -> Check {
    let t = random_markov(rng);
    let (e, _) = random_eps_pair(rng);
    let a = hmin(&t, &[0], &[1], &e);
    let b = hmin(&t, &[0], &[1, 2], &e);
    ensure(a <= b + TOL, || format!("Hmin(X|Y) = {a} > Hmin(X|YZ) = {b} at e={e}"))
}

pub fn data_processing_max(rng: &mut impl Rng) -> Check {
    let t = random_markov(rng);
    let (e, _) = random_eps_pair(rng);
    let a = hmax(&t, &[0], &[1], &e);
    let b = hmax(&t, &[0], &[1, 2], &e);
    ensure(a <= b + TOL, || format!("Hmax(X|Y) = {a} > Hmax(X|YZ) = {b} at e={e}"))
}

/// Pair of tables on the same alphabets, the second a perturbation of the
/// first.
fn nearby_pair(rng: &mut impl Rng) -> (JointDist, JointDist) {
    let nx = rng.random_range(1..=4);
    let ny = rng.random_range(1..=3);
    let w: Vec<u32> = (0..nx * ny).map(|_| weight(rng) * 4).collect();
    let spread = rng.random_range(0..=12u32);
    let v: Vec<u32> = w
        .iter()
        .map(|&a| {
            let d = rng.random_range(0..=spread);
            if rng.random_bool(0.5) { a + d } else { a.saturating_sub(d) }
        })
        .collect();
    (table_from_weights(nx, ny, &w), table_from_weights(nx, ny, &v))
}

pub fn continuity(rng: &mut impl Rng) -> Check {
    let (p, q) = nearby_pair(rng);
    let eps = otbounds::dist::to_f64(&stat_distance(&p, &q));
    let nx = p.x_alphabet().len() as f64;
    let lhs = shannon_cond(&q);
    let rhs = shannon_cond(&p) - eps * nx.log2() - h(eps);
    ensure(lhs >= rhs - TOL, || format!("H(X^|Y^) = {lhs} < {rhs} at distance {eps}"))
}

pub fn fano(rng: &mut impl Rng) -> Check {
    let n = rng.random_range(1..=4);
    let boost = rng.random_range(0..=40u32);
    let w: Vec<u32> = (0..n * n).map(|c| weight(rng) + if c / n == c % n { boost } else { 0 }).collect();
    let j = table_from_weights(n, n, &w);
    let hit: Prob = j.atoms().iter().filter(|a| a.x == a.y).map(|a| a.mass.clone()).sum();
    let err = otbounds::dist::to_f64(&(Prob::one() - hit));
    let lhs = shannon_cond(&j);
    let rhs = err * (n as f64).log2() + h(err);
    ensure(lhs <= rhs + TOL, || format!("H(X|X^) = {lhs} > {rhs} at error {err}"))
}

pub fn h_concavity(rng: &mut impl Rng) -> Check {
    let c: f64 = rng.random_range(0.0..=1.0);
    let p: f64 = rng.random_range(0.0..=1.0);
    let lhs = binary_entropy(c * p).unwrap();
    let rhs = c * binary_entropy(p).unwrap();
    ensure(lhs >= rhs - TOL, || format!("h({c} * {p}) = {lhs} < {rhs}"))
}

pub fn shannon_chain(rng: &mut impl Rng) -> Check {
    let t = random_triple(rng);
    let lhs = hc(&t, &[0, 1], &[2]);
    let rhs = hc(&t, &[0], &[2]) + hc(&t, &[1], &[0, 2]);
    ensure((lhs - rhs).abs() <= TOL, || format!("H(XY|Z) = {lhs} vs {rhs}"))
}

pub fn shannon_monotonicity(rng: &mut impl Rng) -> Check {
    let d = dims(rng, 4);
    let t = random_multi(rng, &d);
    let (a, b, c) = (hc(&t, &[0, 1], &[2]), hc(&t, &[0], &[2]), hc(&t, &[0], &[1, 2]));
    ensure(a >= b - TOL && b >= c - TOL, || format!("H chain {a} >= {b} >= {c} fails"))?;
    // Coordinates 0 = X, 1 = Y, 2 = Z, 3 = W.
    let wx = ic(&t, &[3, 0], &[1], &[2]);
    let x = ic(&t, &[0], &[1], &[2]);
    ensure(wx >= x - TOL, || format!("I(WX;Y|Z) = {wx} < I(X;Y|Z) = {x}"))
}

pub fn averaging(rng: &mut impl Rng) -> Check {
    let t = random_triple(rng);
    let lhs = hc(&t, &[0], &[1, 2]);
    let mut by_z: HashMap<usize, Vec<(usize, usize, f64)>> = HashMap::new();
    for (idx, p) in t.atoms() {
        by_z.entry(idx[2]).or_default().push((idx[0], idx[1], otbounds::dist::to_f64(p)));
    }
    let mut rhs = 0.0;
    for cells in by_z.values() {
        let pz: f64 = cells.iter().map(|c| c.2).sum();
        let mut py: HashMap<usize, f64> = HashMap::new();
        for &(_, y, p) in cells {
            *py.entry(y).or_default() += p / pz;
        }
        let hz: f64 = cells.iter().map(|&(_, y, p)| -(p / pz) * ((p / pz) / py[&y]).log2()).sum();
        rhs += pz * hz;
    }
    ensure((lhs - rhs).abs() <= TOL, || format!("H(X|YZ) = {lhs} vs average {rhs}"))
}

pub fn shannon_markov(rng: &mut impl Rng) -> Check {
    let t = random_markov(rng);
    let (xz, xyz, xy) = (hc(&t, &[0], &[2]), hc(&t, &[0], &[1, 2]), hc(&t, &[0], &[1]));
    ensure(xz >= xyz - TOL && (xyz - xy).abs() <= TOL, || format!("H(X|Z) = {xz}, H(X|YZ) = {xyz}, H(X|Y) = {xy}"))?;

    let t = random_markov_w(rng);
    let base = ic(&t, &[0], &[1], &[2]);
    let zw = ic(&t, &[0], &[1], &[2, 3]);
    let w = ic(&t, &[3], &[1], &[2]);
    ensure(zw <= base + TOL && w <= base + TOL, || format!("I(X;Y|ZW) = {zw}, I(W;Y|Z) = {w}, I(X;Y|Z) = {base}"))
}

/// Every named check, in the order the acceptance report lists them.
pub const ALL: &[(&str, fn(&mut rand_chacha::ChaCha8Rng) -> Check)] = &[
    ("subadditivity", subadditivity),
    ("min-entropy monotonicity", min_monotonicity),
    ("max-entropy monotonicity", max_monotonicity),
    ("chain inequality", chain),
    ("data processing (min)", data_processing_min),
    ("data processing (max)", data_processing_max),
    ("continuity", continuity),
    ("Fano", fano),
    ("h concavity", h_concavity),
];

/// Runs `check` on `cases` seeded instances and returns the failures.
pub fn run_seeded(check: fn(&mut rand_chacha::ChaCha8Rng) -> Check, seed: u64, cases: u64) -> Vec<String> {
    (0..cases)
        .filter_map(|i| check(&mut otbounds::protocol::trial_rng(seed, i)).err())
        .collect()
}
