//! Structural decompositions of a joint table.
//!
//! - [`common_part`]: the finest variable computable from `X` alone and from
//!   `Y` alone, i.e. the connected components of the bipartite graph whose
//!   edges are the positive-mass cells.
//! - [`sufficient_stat`]: groups the values of `X` that induce the same
//!   conditional distribution on `Y`.
//!
//! Symbols of zero marginal probability belong to no class. A class is named
//! after its lexicographically smallest `X`-member.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;

use crate::dist::{to_f64, Alphabet, Dist, JointDist, MultiDist, Prob, Symbol};
use crate::error::Result;

/// Assignment of symbols of one alphabet to named classes.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    /// Class index for each symbol; `None` if the symbol has zero mass.
    pub class_of: Vec<Option<usize>>,
    pub classes: Alphabet,
}

impl Partition {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_label(&self, symbol: usize) -> Option<&Symbol> {
        self.class_of[symbol].map(|c| self.classes.symbol(c))
    }

    /// Members of each class, in alphabet order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.classes.len()];
        for (s, c) in self.class_of.iter().enumerate() {
            if let Some(c) = c {
                out[*c].push(s);
            }
        }
        out
    }

    /// Replaces `X` by its class in `j`.
    pub fn apply_x(&self, j: &JointDist) -> Result<JointDist> {
        let cells = j.atoms().iter().map(|a| (self.class_of[a.x].expect("positive mass"), a.y, a.mass.clone()));
        JointDist::from_indexed(self.classes.clone(), j.y_alphabet().clone(), cells)
    }
}

/// Builds a partition from raw group ids, naming each class after its
/// smallest member label and ordering classes by that name.
fn canonical(alpha: &Alphabet, group: &[Option<usize>]) -> Result<Partition> {
    let mut name: HashMap<usize, Symbol> = HashMap::new();
    for (s, g) in group.iter().enumerate() {
        if let Some(g) = g {
            let label = alpha.symbol(s);
            name.entry(*g)
                .and_modify(|n| {
                    if label < n {
                        *n = label.clone()
                    }
                })
                .or_insert_with(|| label.clone());
        }
    }
    let mut names: Vec<(Symbol, usize)> = name.into_iter().map(|(g, n)| (n, g)).collect();
    names.sort();
    let index: HashMap<usize, usize> = names.iter().enumerate().map(|(i, (_, g))| (*g, i)).collect();
    let classes = Alphabet::new(names.into_iter().map(|(n, _)| n).collect())?;
    let class_of = group.iter().map(|g| g.map(|g| index[&g])).collect();
    Ok(Partition { class_of, classes })
}

/// Common part `C` of `(X, Y)` with its induced partitions and law.
#[derive(Clone, Debug, PartialEq)]
pub struct CommonPart {
    pub x_partition: Partition,
    pub y_partition: Partition,
    pub dist: Dist,
}

impl CommonPart {
    /// `P_{X, Y, C}` with coordinates `0 = X`, `1 = Y`, `2 = C`.
    pub fn joint_with(&self, j: &JointDist) -> MultiDist {
        let class_of = self.x_partition.class_of.clone();
        MultiDist::from_joint(j).with_function(self.x_partition.classes.clone(), move |idx| {
            class_of[idx[0]].expect("positive mass")
        })
    }
}

pub fn common_part(j: &JointDist) -> Result<CommonPart> {
    let nx = j.x_alphabet().len();
    let ny = j.y_alphabet().len();
    let mut uf = UnionFind::<usize>::new(nx + ny);
    let mut seen_x = vec![false; nx];
    let mut seen_y = vec![false; ny];
    for a in j.atoms() {
        uf.union(a.x, nx + a.y);
        seen_x[a.x] = true;
        seen_y[a.y] = true;
    }
    let gx: Vec<Option<usize>> = (0..nx).map(|x| seen_x[x].then(|| uf.find(x))).collect();
    let x_partition = canonical(j.x_alphabet(), &gx)?;

    // Y-classes take the name of the X-class they are connected to.
    let root_class: HashMap<usize, usize> = gx
        .iter()
        .zip(&x_partition.class_of)
        .filter_map(|(g, c)| Some(((*g)?, (*c)?)))
        .collect();
    let y_class: Vec<Option<usize>> =
        (0..ny).map(|y| seen_y[y].then(|| root_class[&uf.find(nx + y)])).collect();
    let y_partition = Partition { class_of: y_class, classes: x_partition.classes.clone() };

    let mut mass = vec![Prob::default(); x_partition.class_count()];
    for a in j.atoms() {
        mass[x_partition.class_of[a.x].unwrap()] += &a.mass;
    }
    let dist = Dist::new(x_partition.classes.clone(), mass)?;
    Ok(CommonPart { x_partition, y_partition, dist })
}

/// Groups `x` values with identical `P_{Y|X=x}`.
pub fn sufficient_stat(j: &JointDist) -> Result<Partition> {
    let px = j.marginal_x();
    let mut rows: Vec<Vec<(usize, Prob)>> = vec![Vec::new(); j.x_alphabet().len()];
    for a in j.atoms() {
        rows[a.x].push((a.y, &a.mass / &px.mass()[a.x]));
    }
    let mut ids: HashMap<&[(usize, Prob)], usize> = HashMap::new();
    let mut group = Vec::with_capacity(rows.len());
    for row in &rows {
        if row.is_empty() {
            group.push(None);
        } else {
            let next = ids.len();
            group.push(Some(*ids.entry(row.as_slice()).or_insert(next)));
        }
    }
    canonical(j.x_alphabet(), &group)
}

/// Like [`sufficient_stat`], but merges `x` into the first earlier class
/// whose representative row is within `tol` in max-norm. Not transitive;
/// meant for tables built from floating-point data.
pub fn sufficient_stat_approx(j: &JointDist, tol: f64) -> Result<Partition> {
    let px = j.marginal_x();
    let ny = j.y_alphabet().len();
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; j.x_alphabet().len()];
    for a in j.atoms() {
        let row = rows[a.x].get_or_insert_with(|| vec![0.0; ny]);
        row[a.y] = to_f64(&(&a.mass / &px.mass()[a.x]));
    }
    let mut reps: Vec<&Vec<f64>> = Vec::new();
    let mut group = Vec::with_capacity(rows.len());
    for row in &rows {
        let Some(row) = row else {
            group.push(None);
            continue;
        };
        let close = reps
            .iter()
            .position(|r| r.iter().zip(row).all(|(a, b)| (a - b).abs() <= tol));
        match close {
            Some(i) => group.push(Some(i)),
            None => {
                reps.push(row);
                group.push(Some(reps.len() - 1));
            }
        }
    }
    canonical(j.x_alphabet(), &group)
}
