//! Entropy measures on exact tables.
//!
//! All logarithms are base 2. Smooth entropies are computed exactly over the
//! rationals and come with the optimal event as a witness:
//!
//! - [`smooth_min_entropy`] lowers the column maxima of `P_XY` by
//!   water-filling. Lowering column `y` from level `t` costs
//!   `sum_x (P(x,y) - t)^+` of mass, so its marginal price is the number of
//!   atoms tied at the top. The budget `eps` is always spent on the column
//!   with the fewest tied atoms (lowest column index on ties).
//! - [`smooth_max_entropy`] removes the lightest atoms of every column until
//!   all supports fit under a common size `s`, taking the smallest `s` whose
//!   removal cost stays within `eps`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dist::{log2, ratio, to_f64, Accum, Dist, EventWeights, JointDist, MultiDist, Prob};
use crate::error::{Error, Result};

/// Binary entropy `h(p)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::Domain(format!("h({p}) needs p in [0, 1]")));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

/// `h(p)` for callers whose `p` is already known to lie in `[0, 1]`.
pub(crate) fn h(p: f64) -> f64 {
    binary_entropy(p.clamp(0.0, 1.0)).unwrap()
}

/// `H(X)`.
pub fn shannon(d: &Dist) -> f64 {
    d.entropy()
}

/// `H(X|Y)`.
pub fn shannon_cond(j: &JointDist) -> f64 {
    let py = j.marginal_y();
    let log_py: Vec<f64> = py
        .mass()
        .iter()
        .map(|p| if p.is_positive() { log2(p) } else { 0.0 })
        .collect();
    let mut acc = Accum::default();
    for a in j.atoms() {
        acc.add(-to_f64(&a.mass) * (log2(&a.mass) - log_py[a.y]));
    }
    acc.value().max(0.0)
}

/// `H(X)` of the `X` marginal.
pub fn shannon_x(j: &JointDist) -> f64 {
    j.marginal_x().entropy()
}

/// `I(X;Y) = H(X) - H(X|Y)`.
pub fn mutual_info(j: &JointDist) -> f64 {
    (shannon_x(j) - shannon_cond(j)).max(0.0)
}

/// `I(X;Y|Z)` for coordinate groups of a multivariate table.
pub fn mutual_info_cond(t: &MultiDist, xs: &[usize], ys: &[usize], zs: &[usize]) -> Result<f64> {
    let yz: Vec<usize> = ys.iter().chain(zs).copied().collect();
    let h_x_z = shannon_cond(&t.group(xs, zs)?);
    let h_x_yz = shannon_cond(&t.group(xs, &yz)?);
    Ok((h_x_z - h_x_yz).max(0.0))
}

/// `H(X|YZ)` for coordinate groups; shorthand used by the lemma tests.
pub fn shannon_cond_of(t: &MultiDist, xs: &[usize], ys: &[usize]) -> Result<f64> {
    Ok(shannon_cond(&t.group(xs, ys)?))
}

/// `H_min(X|Y) = -log sum_y max_x P(x, y)`.
pub fn min_entropy_cond(j: &JointDist) -> f64 {
    let mut best: BTreeMap<usize, &Prob> = BTreeMap::new();
    for a in j.atoms() {
        let e = best.entry(a.y).or_insert(&a.mass);
        if a.mass > **e {
            *e = &a.mass;
        }
    }
    let g: Prob = best.values().copied().sum();
    -log2(&g)
}

/// `H_max(X|Y) = log max_y |supp P_{X|Y=y}|`.
pub fn max_entropy_cond(j: &JointDist) -> f64 {
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for a in j.atoms() {
        *count.entry(a.y).or_default() += 1;
    }
    (count.values().copied().max().unwrap_or(1) as f64).log2()
}

/// Optimal value of a smooth entropy together with its event.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    /// Entropy in bits.
    pub value: f64,
    pub epsilon: Prob,
    /// Exact optimum of the underlying program: the guessing probability
    /// `sum_y max_x Q(x,y)` for min-entropy, the support size for
    /// max-entropy.
    pub objective: Prob,
    /// Event weights, aligned with the atoms of the input table.
    pub witness: EventWeights,
}

fn check_eps(eps: &Prob) -> Result<()> {
    if eps.is_negative() || *eps >= Prob::one() {
        return Err(Error::Domain(format!("smoothing parameter {eps} is not in [0, 1)")));
    }
    Ok(())
}

/// Atom indices grouped by column, in column order.
fn columns(j: &JointDist) -> BTreeMap<usize, Vec<usize>> {
    let mut cols: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, a) in j.atoms().iter().enumerate() {
        cols.entry(a.y).or_default().push(i);
    }
    cols
}

/// `H_min^eps(X|Y)`: the largest `-log sum_y max_x Q(x,y)` over events with
/// `Pr[Omega] >= 1 - eps`.
pub fn smooth_min_entropy(j: &JointDist, eps: &Prob) -> Result<EntropyReport> {
    check_eps(eps)?;
    let atoms = j.atoms();

    struct Segment {
        count: usize,
        col: usize,
        step: usize,
        top: Prob,
        length: Prob,
    }

    let cols = columns(j);
    let mut levels: BTreeMap<usize, Prob> = BTreeMap::new();
    let mut segments = Vec::new();
    for (&col, idx) in &cols {
        let mut masses: Vec<&Prob> = idx.iter().map(|&i| &atoms[i].mass).collect();
        masses.sort_unstable_by(|a, b| b.cmp(a));
        levels.insert(col, masses[0].clone());
        let mut step = 0;
        let mut i = 0;
        while i < masses.len() {
            let top = masses[i];
            while i < masses.len() && masses[i] == top {
                i += 1;
            }
            let next = masses.get(i).map(|m| (*m).clone()).unwrap_or_else(Prob::zero);
            segments.push(Segment { count: i, col, step, top: top.clone(), length: top - &next });
            step += 1;
        }
    }
    segments.sort_by_key(|s| (s.count, s.col, s.step));

    let mut budget = eps.clone();
    for s in &segments {
        if budget.is_zero() {
            break;
        }
        let count = Prob::from_integer(s.count.into());
        let cost = &count * &s.length;
        if cost <= budget {
            budget -= cost;
            levels.insert(s.col, &s.top - &s.length);
        } else {
            levels.insert(s.col, &s.top - &budget / &count);
            budget = Prob::zero();
        }
    }

    let objective: Prob = levels.values().sum();
    let weights = atoms
        .iter()
        .map(|a| {
            let t = &levels[&a.y];
            if a.mass <= *t {
                Prob::one()
            } else {
                t / &a.mass
            }
        })
        .collect();
    Ok(EntropyReport {
        value: -log2(&objective),
        epsilon: eps.clone(),
        objective,
        witness: EventWeights(weights),
    })
}

/// `H_max^eps(X|Y)`: the smallest `log max_y |supp Q(., y)|` over events with
/// `Pr[Omega] >= 1 - eps`. The optimal event is deterministic.
pub fn smooth_max_entropy(j: &JointDist, eps: &Prob) -> Result<EntropyReport> {
    check_eps(eps)?;
    let atoms = j.atoms();
    // Per column: atom indices sorted by increasing mass and prefix sums of
    // those masses.
    let cols: Vec<(Vec<usize>, Vec<Prob>)> = columns(j)
        .into_values()
        .map(|mut idx| {
            idx.sort_by(|&a, &b| atoms[a].mass.cmp(&atoms[b].mass).then(a.cmp(&b)));
            let mut prefix = Vec::with_capacity(idx.len() + 1);
            prefix.push(Prob::zero());
            for &i in &idx {
                let next = prefix.last().unwrap() + &atoms[i].mass;
                prefix.push(next);
            }
            (idx, prefix)
        })
        .collect();
    let widest = cols.iter().map(|(idx, _)| idx.len()).max().unwrap_or(1);
    let cost = |s: usize| -> Prob {
        cols.iter()
            .map(|(idx, prefix)| prefix[idx.len().saturating_sub(s)].clone())
            .sum()
    };

    // Removal cost is non-increasing in `s` and `cost(widest) == 0`.
    let (mut lo, mut hi) = (1usize, widest);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if cost(mid) <= *eps {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let s = lo;

    let mut weights = vec![Prob::one(); atoms.len()];
    for (idx, _) in &cols {
        for &i in &idx[..idx.len().saturating_sub(s)] {
            weights[i] = Prob::zero();
        }
    }
    Ok(EntropyReport {
        value: (s as f64).log2(),
        epsilon: eps.clone(),
        objective: Prob::from_integer(s.into()),
        witness: EventWeights(weights),
    })
}

/// `eps` as a rational, for callers holding a float. Short decimals map to
/// their exact decimal fraction (`0.1` becomes `1/10`); anything else to the
/// exact binary value of the float.
pub fn eps_from_f64(eps: f64) -> Result<Prob> {
    if !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("eps = {eps}")));
    }
    let mut d: i64 = 1;
    for _ in 0..=12 {
        let n = (eps * d as f64).round();
        if n / d as f64 == eps {
            return Ok(ratio(n as i64, d));
        }
        d *= 10;
    }
    BigRational::from_float(eps).ok_or_else(|| Error::InvalidParameter(format!("eps = {eps}")))
}
