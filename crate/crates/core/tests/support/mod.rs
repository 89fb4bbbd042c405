//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

pub mod lemmas;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use otbounds::{Alphabet, JointDist, Prob};
use proptest::prelude::*;
use rand::Rng;

/// Table from integer weights laid out row-major (`x` major), normalized.
pub fn table_from_weights(nx: usize, ny: usize, w: &[u32]) -> JointDist {
    let total: u64 = w.iter().map(|&v| v as u64).sum();
    let total = if total == 0 { 1 } else { total };
    let x = Alphabet::from_labels((0..nx).map(|i| format!("x{i}"))).unwrap();
    let y = Alphabet::from_labels((0..ny).map(|i| format!("y{i}"))).unwrap();
    let mut cells: Vec<(usize, usize, Prob)> = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let v = w[i * ny + j];
            if v > 0 {
                cells.push((i, j, Prob::new(BigInt::from(v), BigInt::from(total))));
            }
        }
    }
    if cells.is_empty() {
        cells.push((0, 0, Prob::one()));
    }
    JointDist::from_indexed(x, y, cells).unwrap()
}

pub fn random_table(rng: &mut impl Rng, nx: usize, ny: usize) -> JointDist {
    let w: Vec<u32> = (0..nx * ny)
        .map(|_| if rng.random_bool(0.2) { 0 } else { rng.random_range(1..=12) })
        .collect();
    table_from_weights(nx, ny, &w)
}

/// Proptest strategy for tables up to `max_x x max_y`.
pub fn arb_table(max_x: usize, max_y: usize) -> impl Strategy<Value = JointDist> {
    (1..=max_x, 1..=max_y).prop_flat_map(|(nx, ny)| {
        proptest::collection::vec(prop_oneof![1 => Just(0u32), 4 => 1u32..=9], nx * ny)
            .prop_map(move |w| table_from_weights(nx, ny, &w))
    })
}

/// Maximizes `c.z` subject to `a z <= b`, `z >= 0`, with `b >= 0`, by the
/// tableau simplex method with Bland's rule. Returns the optimal value.
pub fn simplex_max(a: &[Vec<Prob>], b: &[Prob], c: &[Prob]) -> Prob {
    let m = a.len();
    let n = c.len();
    assert!(b.iter().all(|v| !v.is_negative()));
    let width = n + m + 1;
    let mut t: Vec<Vec<Prob>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = vec![Prob::zero(); width];
        row[..n].clone_from_slice(&a[i]);
        row[n + i] = Prob::one();
        row[width - 1] = b[i].clone();
        t.push(row);
    }
    let mut obj = vec![Prob::zero(); width];
    for j in 0..n {
        obj[j] = -c[j].clone();
    }
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        let Some(enter) = (0..width - 1).find(|&j| t[m][j].is_negative()) else {
            return t[m][width - 1].clone();
        };
        let mut leave: Option<(usize, Prob)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let r = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => r < *lr || (r == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, r));
                }
            }
        }
        let (p, _) = leave.expect("objective is bounded");
        let pivot = t[p][enter].clone();
        for v in t[p].iter_mut() {
            *v = &*v / &pivot;
        }
        let prow = t[p].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == p || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= &f * pv;
            }
        }
        basis[p] = enter;
    }
}

/// `min sum_y max_x Q(x,y)` over `0 <= Q <= P` with `sum (P - Q) <= eps`,
/// as a linear program in the removed mass `R = P - Q` and the per-column
/// reductions `s_y` of the column maximum.
pub fn lp_guessing_probability(j: &JointDist, eps: &Prob) -> Prob {
    let atoms = j.atoms();
    let cols: Vec<usize> = {
        let mut c: Vec<usize> = atoms.iter().map(|a| a.y).collect();
        c.sort();
        c.dedup();
        c
    };
    let col_pos = |y: usize| cols.iter().position(|&c| c == y).unwrap();
    let mut col_max = vec![Prob::zero(); cols.len()];
    for a in atoms {
        let p = col_pos(a.y);
        if a.mass > col_max[p] {
            col_max[p] = a.mass.clone();
        }
    }
    // Variables: R_0..R_{A-1}, then s_0..s_{C-1}.
    let na = atoms.len();
    let nv = na + cols.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, atom) in atoms.iter().enumerate() {
        let p = col_pos(atom.y);
        let mut row = vec![Prob::zero(); nv];
        row[na + p] = Prob::one();
        row[i] = -Prob::one();
        a.push(row);
        b.push(&col_max[p] - &atom.mass);

        let mut row = vec![Prob::zero(); nv];
        row[i] = Prob::one();
        a.push(row);
        b.push(atom.mass.clone());
    }
    let mut row = vec![Prob::zero(); nv];
    row[..na].iter_mut().for_each(|v| *v = Prob::one());
    a.push(row);
    b.push(eps.clone());
    for (p, m) in col_max.iter().enumerate() {
        let mut row = vec![Prob::zero(); nv];
        row[na + p] = Prob::one();
        a.push(row);
        b.push(m.clone());
    }
    let mut c = vec![Prob::zero(); nv];
    c[na..].iter_mut().for_each(|v| *v = Prob::one());
    let total: Prob = col_max.iter().sum();
    total - simplex_max(&a, &b, &c)
}

/// Smallest achievable maximal column support after removing whole atoms of
/// total mass at most `eps`, by trying every removal set.
pub fn enumerated_support(j: &JointDist, eps: &Prob) -> usize {
    let atoms = j.atoms();
    assert!(atoms.len() <= 20);
    let ny = j.y_alphabet().len();
    let mut best = usize::MAX;
    for mask in 0u32..(1 << atoms.len()) {
        let removed: Prob = atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.mass.clone()).sum();
        if removed > *eps {
            continue;
        }
        let mut count = vec![0usize; ny];
        for (i, a) in atoms.iter().enumerate() {
            if mask >> i & 1 == 0 {
                count[a.y] += 1;
            }
        }
        let s = count.into_iter().max().unwrap_or(0);
        if s > 0 {
            best = best.min(s);
        }
    }
    best
}

/// `h(p)` straight from the formula.
pub fn h(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}
