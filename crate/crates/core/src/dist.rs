//! Finite joint distributions with exact rational masses.
//!
//! A [`JointDist`] is a sparse table `P_XY` over two labelled alphabets. Only
//! atoms of positive mass are stored, sorted by `(x, y)` index. Every mass is
//! a [`Prob`] (an arbitrary-precision rational), so sums and conditionals
//! never lose precision; floating point enters only when an entropy is
//! reported.
//!
//! Invariants:
//! - a `JointDist` sums to exactly one, a [`SubDist`] to at most one;
//! - masses are strictly positive and each `(x, y)` pair appears once;
//! - the number of stored atoms never exceeds [`ATOM_BUDGET`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact probability mass.
pub type Prob = BigRational;

/// Largest number of positive-mass atoms any table may hold.
pub const ATOM_BUDGET: usize = 1 << 24;

/// Parses `"3/8"`, `"1"` or `"0"` into a [`Prob`].
pub fn parse_prob(s: &str) -> Result<Prob> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| Error::Parse(format!("not a rational number: {s:?}")))
}

/// `n / d` as a [`Prob`]. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Prob {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Base-2 logarithm of a positive rational, accurate even when numerator or
/// denominator exceed the `f64` range.
pub fn log2(p: &Prob) -> f64 {
    debug_assert!(p.is_positive());
    log2_int(p.numer()) - log2_int(p.denom())
}

fn log2_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        n.to_f64().unwrap().log2()
    } else {
        let shift = bits - 64;
        (n >> shift).to_f64().unwrap().log2() + shift as f64
    }
}

/// Nearest `f64` to a rational.
pub fn to_f64(p: &Prob) -> f64 {
    match p.to_f64() {
        Some(v) if v.is_finite() && (v != 0.0 || p.is_zero()) => v,
        _ => {
            let sign = if p.is_negative() { -1.0 } else { 1.0 };
            sign * log2(&p.abs()).exp2()
        }
    }
}

/// Compensated summation for long sums of small entropy terms.
#[derive(Default, Clone, Copy)]
pub(crate) struct Accum {
    sum: f64,
    carry: f64,
}

impl Accum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// Opaque symbol label; cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(s: impl AsRef<str>) -> Self {
        Symbol(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Label of a tuple of symbols, `(a,b,c)`. A single symbol keeps its label.
    pub fn tuple<'a>(parts: impl IntoIterator<Item = &'a Symbol>) -> Symbol {
        let parts: Vec<&str> = parts.into_iter().map(|s| s.as_str()).collect();
        if parts.len() == 1 {
            return Symbol::new(parts[0]);
        }
        Symbol::new(format!("({})", parts.join(",")))
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(Arc::from(s))
    }
}

/// Ordered list of distinct symbols.
#[derive(Clone)]
pub struct Alphabet(Arc<AlphabetInner>);

struct AlphabetInner {
    symbols: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
}

impl Alphabet {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.len() > ATOM_BUDGET {
            return Err(Error::AlphabetOverflow {
                needed: symbols.len() as u128,
                budget: ATOM_BUDGET as u128,
            });
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate symbol {s}")));
            }
        }
        Ok(Alphabet(Arc::new(AlphabetInner { symbols, index })))
    }

    pub fn from_labels<S: AsRef<str>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::new(labels.into_iter().map(Symbol::new).collect())
    }

    /// Alphabet with one symbol, used as the trivial conditioning variable.
    pub fn unit() -> Self {
        Self::from_labels(["*"]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.0.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.symbols.is_empty()
    }

    pub fn symbol(&self, i: usize) -> &Symbol {
        &self.0.symbols[i]
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0.symbols
    }

    pub fn index_of(&self, s: &str) -> Option<usize> {
        self.0.index.get(&Symbol::new(s)).copied()
    }

    /// Cartesian product, first factor major.
    pub fn product(a: &Alphabet, b: &Alphabet) -> Result<Self> {
        check_budget(a.len() as u128 * b.len() as u128)?;
        let mut out = Vec::with_capacity(a.len() * b.len());
        for s in a.symbols() {
            for t in b.symbols() {
                out.push(Symbol::tuple([s, t]));
            }
        }
        Self::new(out)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.symbols()).finish()
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.symbols() == other.symbols()
    }
}

pub(crate) fn check_budget(needed: u128) -> Result<()> {
    if needed > ATOM_BUDGET as u128 {
        Err(Error::AlphabetOverflow { needed, budget: ATOM_BUDGET as u128 })
    } else {
        Ok(())
    }
}

/// Distribution of a single variable, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct Dist {
    alphabet: Alphabet,
    mass: Vec<Prob>,
}

impl Dist {
    pub fn new(alphabet: Alphabet, mass: Vec<Prob>) -> Result<Self> {
        if mass.len() != alphabet.len() {
            return Err(Error::InvalidParameter("mass vector length".into()));
        }
        if let Some(m) = mass.iter().find(|m| m.is_negative()) {
            return Err(Error::NegativeMass(m.to_string()));
        }
        let total: Prob = mass.iter().sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(total.to_string()));
        }
        Ok(Dist { alphabet, mass })
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let n = alphabet.len() as i64;
        let mass = vec![ratio(1, n); alphabet.len()];
        Dist { alphabet, mass }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn mass(&self) -> &[Prob] {
        &self.mass
    }

    pub fn get(&self, label: &str) -> Prob {
        self.alphabet
            .index_of(label)
            .map(|i| self.mass[i].clone())
            .unwrap_or_else(Prob::zero)
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        let mut acc = Accum::default();
        for p in self.mass.iter().filter(|p| p.is_positive()) {
            acc.add(-to_f64(p) * log2(p));
        }
        acc.value()
    }

    pub fn support_size(&self) -> usize {
        self.mass.iter().filter(|p| p.is_positive()).count()
    }
}

/// One positive-mass cell of a table.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub x: usize,
    pub y: usize,
    pub mass: Prob,
}

/// Joint distribution `P_XY` with exact rational masses.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDist {
    x: Alphabet,
    y: Alphabet,
    atoms: Vec<Atom>,
}

/// Sub-normalized table `Q_XY <= P_XY` produced by applying an event.
#[derive(Clone, Debug, PartialEq)]
pub struct SubDist {
    x: Alphabet,
    y: Alphabet,
    atoms: Vec<Atom>,
}

/// Weights `P_{Omega | X=x, Y=y}` in `[0, 1]`, one per atom of the table they
/// were computed for, in the same order as [`JointDist::atoms`].
#[derive(Clone, Debug, PartialEq)]
pub struct EventWeights(pub Vec<Prob>);

fn normalize_atoms(
    x: &Alphabet,
    y: &Alphabet,
    raw: impl IntoIterator<Item = (usize, usize, Prob)>,
) -> Result<Vec<Atom>> {
    let mut cells: HashMap<(usize, usize), Prob> = HashMap::new();
    for (xi, yi, m) in raw {
        if xi >= x.len() || yi >= y.len() {
            return Err(Error::InvalidParameter("atom index outside alphabet".into()));
        }
        if m.is_negative() {
            return Err(Error::NegativeMass(m.to_string()));
        }
        if m.is_zero() {
            continue;
        }
        *cells.entry((xi, yi)).or_insert_with(Prob::zero) += m;
    }
    check_budget(cells.len() as u128)?;
    let mut atoms: Vec<Atom> =
        cells.into_iter().map(|((x, y), mass)| Atom { x, y, mass }).collect();
    atoms.sort_unstable_by_key(|a| (a.x, a.y));
    Ok(atoms)
}

impl JointDist {
    /// Builds a table from `(x index, y index, mass)` triples. Duplicate cells
    /// are merged and zero cells dropped. The total must be exactly one.
    pub fn from_indexed(
        x: Alphabet,
        y: Alphabet,
        raw: impl IntoIterator<Item = (usize, usize, Prob)>,
    ) -> Result<Self> {
        let atoms = normalize_atoms(&x, &y, raw)?;
        let total: Prob = atoms.iter().map(|a| &a.mass).sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(total.to_string()));
        }
        Ok(JointDist { x, y, atoms })
    }

    /// Builds a table from labelled triples; alphabets are taken in order of
    /// first appearance.
    pub fn from_labels<S: AsRef<str>>(
        raw: impl IntoIterator<Item = (S, S, Prob)>,
    ) -> Result<Self> {
        let mut xs: Vec<Symbol> = Vec::new();
        let mut ys: Vec<Symbol> = Vec::new();
        let mut xi: HashMap<Symbol, usize> = HashMap::new();
        let mut yi: HashMap<Symbol, usize> = HashMap::new();
        let mut cells = Vec::new();
        for (a, b, m) in raw {
            let a = Symbol::new(a);
            let b = Symbol::new(b);
            let ia = *xi.entry(a.clone()).or_insert_with(|| {
                xs.push(a);
                xs.len() - 1
            });
            let ib = *yi.entry(b.clone()).or_insert_with(|| {
                ys.push(b);
                ys.len() - 1
            });
            cells.push((ia, ib, m));
        }
        Self::from_indexed(Alphabet::new(xs)?, Alphabet::new(ys)?, cells)
    }

    /// Builds a table from a dense matrix indexed `[x][y]`.
    pub fn from_dense(x: Alphabet, y: Alphabet, mass: &[Vec<Prob>]) -> Result<Self> {
        Self::from_indexed(x.clone(), y.clone(), dense_cells(&x, &y, mass)?)
    }

    /// Distribution of a single variable paired with a trivial `Y`.
    pub fn from_dist(d: &Dist) -> Self {
        let atoms = d
            .mass
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_positive())
            .map(|(x, m)| Atom { x, y: 0, mass: m.clone() })
            .collect();
        JointDist { x: d.alphabet.clone(), y: Alphabet::unit(), atoms }
    }

    pub fn x_alphabet(&self) -> &Alphabet {
        &self.x
    }

    pub fn y_alphabet(&self) -> &Alphabet {
        &self.y
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Mass of the cell labelled `(x, y)`; zero if absent.
    pub fn get(&self, x: &str, y: &str) -> Prob {
        let (Some(xi), Some(yi)) = (self.x.index_of(x), self.y.index_of(y)) else {
            return Prob::zero();
        };
        match self.atoms.binary_search_by_key(&(xi, yi), |a| (a.x, a.y)) {
            Ok(i) => self.atoms[i].mass.clone(),
            Err(_) => Prob::zero(),
        }
    }

    pub fn marginal_x(&self) -> Dist {
        marginal(&self.x, self.atoms.iter().map(|a| (a.x, &a.mass)))
    }

    pub fn marginal_y(&self) -> Dist {
        marginal(&self.y, self.atoms.iter().map(|a| (a.y, &a.mass)))
    }

    /// `P_{X | Y = y}`.
    pub fn condition(&self, y: &str) -> Result<Dist> {
        let yi = self
            .y
            .index_of(y)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown symbol {y}")))?;
        let col: Vec<&Atom> = self.atoms.iter().filter(|a| a.y == yi).collect();
        let total: Prob = col.iter().map(|a| &a.mass).sum();
        if total.is_zero() {
            return Err(Error::ZeroConditioning);
        }
        let mut mass = vec![Prob::zero(); self.x.len()];
        for a in col {
            mass[a.x] = &a.mass / &total;
        }
        Ok(Dist { alphabet: self.x.clone(), mass })
    }

    /// The same table with the roles of `X` and `Y` exchanged.
    pub fn swap(&self) -> JointDist {
        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom { x: a.y, y: a.x, mass: a.mass.clone() })
            .collect();
        atoms.sort_unstable_by_key(|a| (a.x, a.y));
        JointDist { x: self.y.clone(), y: self.x.clone(), atoms }
    }

    /// Independent product: `X = (X1, X2)`, `Y = (Y1, Y2)`.
    pub fn product(&self, other: &JointDist) -> Result<JointDist> {
        check_budget(self.atoms.len() as u128 * other.atoms.len() as u128)?;
        let x = Alphabet::product(&self.x, &other.x)?;
        let y = Alphabet::product(&self.y, &other.y)?;
        let (nx, ny) = (other.x.len(), other.y.len());
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for a in &self.atoms {
            for b in &other.atoms {
                atoms.push(Atom {
                    x: a.x * nx + b.x,
                    y: a.y * ny + b.y,
                    mass: &a.mass * &b.mass,
                });
            }
        }
        atoms.sort_unstable_by_key(|a| (a.x, a.y));
        Ok(JointDist { x, y, atoms })
    }

    /// `m`-fold independent product with flat tuple labels `(a,b,c)`.
    pub fn power(&self, m: usize) -> Result<JointDist> {
        if m == 0 {
            return Err(Error::InvalidParameter("power of a table needs m >= 1".into()));
        }
        if m == 1 {
            return Ok(self.clone());
        }
        check_budget((self.atoms.len() as u128).saturating_pow(m as u32))?;
        let mut md = MultiDist::from_joint(self);
        let base = md.clone();
        for _ in 1..m {
            md = md.product(&base)?;
        }
        let xs: Vec<usize> = (0..m).map(|i| 2 * i).collect();
        let ys: Vec<usize> = (0..m).map(|i| 2 * i + 1).collect();
        md.group(&xs, &ys)
    }

    /// Applies event weights, giving `Q(x, y) = P(x, y) w(x, y)`.
    pub fn apply_event(&self, w: &EventWeights) -> Result<SubDist> {
        if w.0.len() != self.atoms.len() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} atoms",
                w.0.len(),
                self.atoms.len()
            )));
        }
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (a, wt) in self.atoms.iter().zip(&w.0) {
            if wt.is_negative() || *wt > Prob::one() {
                return Err(Error::WeightOutOfRange(wt.to_string()));
            }
            if wt.is_positive() {
                atoms.push(Atom { x: a.x, y: a.y, mass: &a.mass * wt });
            }
        }
        Ok(SubDist { x: self.x.clone(), y: self.y.clone(), atoms })
    }

    /// Relabels `X` through `f`, merging cells that land on the same symbol.
    pub fn map_x(&self, f: impl Fn(&Symbol) -> Symbol) -> Result<JointDist> {
        let (alpha, map) = relabel(&self.x, f)?;
        let cells = self.atoms.iter().map(|a| (map[a.x], a.y, a.mass.clone()));
        Self::from_indexed(alpha, self.y.clone(), cells)
    }

    /// Relabels `Y` through `f`, merging cells that land on the same symbol.
    pub fn map_y(&self, f: impl Fn(&Symbol) -> Symbol) -> Result<JointDist> {
        Ok(self.swap().map_x(f)?.swap())
    }

    pub fn to_file(&self) -> TableFile {
        to_file(&self.x, &self.y, &self.atoms)
    }
}

fn relabel(a: &Alphabet, f: impl Fn(&Symbol) -> Symbol) -> Result<(Alphabet, Vec<usize>)> {
    let mut out: Vec<Symbol> = Vec::new();
    let mut seen: HashMap<Symbol, usize> = HashMap::new();
    let mut map = Vec::with_capacity(a.len());
    for s in a.symbols() {
        let t = f(s);
        let i = *seen.entry(t.clone()).or_insert_with(|| {
            out.push(t);
            out.len() - 1
        });
        map.push(i);
    }
    Ok((Alphabet::new(out)?, map))
}

fn marginal<'a>(alpha: &Alphabet, cells: impl Iterator<Item = (usize, &'a Prob)>) -> Dist {
    let mut mass = vec![Prob::zero(); alpha.len()];
    for (i, m) in cells {
        mass[i] += m;
    }
    Dist { alphabet: alpha.clone(), mass }
}

fn dense_cells(x: &Alphabet, y: &Alphabet, mass: &[Vec<Prob>]) -> Result<Vec<(usize, usize, Prob)>> {
    if mass.len() != x.len() || mass.iter().any(|r| r.len() != y.len()) {
        return Err(Error::Parse(format!(
            "mass matrix must be {} rows of {} entries",
            x.len(),
            y.len()
        )));
    }
    let mut cells = Vec::new();
    for (i, row) in mass.iter().enumerate() {
        for (j, m) in row.iter().enumerate() {
            cells.push((i, j, m.clone()));
        }
    }
    Ok(cells)
}

fn to_file(x: &Alphabet, y: &Alphabet, atoms: &[Atom]) -> TableFile {
    let mut mass = vec![vec!["0".to_string(); y.len()]; x.len()];
    for a in atoms {
        mass[a.x][a.y] = a.mass.to_string();
    }
    TableFile {
        x_alphabet: x.symbols().iter().map(|s| s.to_string()).collect(),
        y_alphabet: y.symbols().iter().map(|s| s.to_string()).collect(),
        mass,
    }
}

impl SubDist {
    /// Builds a sub-normalized table; the total must lie in `[0, 1]`.
    pub fn from_indexed(
        x: Alphabet,
        y: Alphabet,
        raw: impl IntoIterator<Item = (usize, usize, Prob)>,
    ) -> Result<Self> {
        let atoms = normalize_atoms(&x, &y, raw)?;
        let total: Prob = atoms.iter().map(|a| &a.mass).sum();
        if total > Prob::one() {
            return Err(Error::NotNormalized(total.to_string()));
        }
        Ok(SubDist { x, y, atoms })
    }

    pub fn x_alphabet(&self) -> &Alphabet {
        &self.x
    }

    pub fn y_alphabet(&self) -> &Alphabet {
        &self.y
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total(&self) -> Prob {
        self.atoms.iter().map(|a| &a.mass).sum()
    }

    /// `sum_y max_x Q(x, y)`.
    pub fn guessing_probability(&self) -> Prob {
        let mut best: HashMap<usize, &Prob> = HashMap::new();
        for a in &self.atoms {
            let e = best.entry(a.y).or_insert(&a.mass);
            if a.mass > **e {
                *e = &a.mass;
            }
        }
        best.values().copied().sum()
    }

    /// `max_y |supp Q(., y)|`.
    pub fn max_column_support(&self) -> usize {
        let mut count: HashMap<usize, usize> = HashMap::new();
        for a in &self.atoms {
            *count.entry(a.y).or_default() += 1;
        }
        count.values().copied().max().unwrap_or(0)
    }

    /// Promotes to a [`JointDist`] if the total is exactly one.
    pub fn into_joint(self) -> Result<JointDist> {
        let total = self.total();
        if !total.is_one() {
            return Err(Error::NotNormalized(total.to_string()));
        }
        Ok(JointDist { x: self.x, y: self.y, atoms: self.atoms })
    }

    pub fn to_file(&self) -> TableFile {
        to_file(&self.x, &self.y, &self.atoms)
    }
}

/// Half the L1 distance between two tables, matching cells by label.
pub fn stat_distance(a: &JointDist, b: &JointDist) -> Prob {
    let key = |d: &JointDist, at: &Atom| (d.x.symbol(at.x).clone(), d.y.symbol(at.y).clone());
    let mut diff: HashMap<(Symbol, Symbol), Prob> = HashMap::with_capacity(a.len() + b.len());
    for at in &a.atoms {
        *diff.entry(key(a, at)).or_insert_with(Prob::zero) += &at.mass;
    }
    for at in &b.atoms {
        *diff.entry(key(b, at)).or_insert_with(Prob::zero) -= &at.mass;
    }
    let l1: Prob = diff.values().map(|d| d.abs()).sum();
    l1 / BigInt::from(2)
}

/// Serialized form of a table: `mass[i][j]` is the mass of
/// `(x_alphabet[i], y_alphabet[j])`, written as `"p/q"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableFile {
    pub x_alphabet: Vec<String>,
    pub y_alphabet: Vec<String>,
    pub mass: Vec<Vec<String>>,
}

/// Result of loading a [`TableFile`].
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedTable {
    Normalized(JointDist),
    Subnormalized(SubDist),
}

impl TableFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table file serializes")
    }

    /// Parses the masses. Tables that do not sum to one are rejected unless
    /// `allow_subnormalized` is set.
    pub fn load(&self, allow_subnormalized: bool) -> Result<LoadedTable> {
        let x = Alphabet::from_labels(&self.x_alphabet)?;
        let y = Alphabet::from_labels(&self.y_alphabet)?;
        let mass: Vec<Vec<Prob>> = self
            .mass
            .iter()
            .map(|row| row.iter().map(|s| parse_prob(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let cells = dense_cells(&x, &y, &mass)?;
        let sub = SubDist::from_indexed(x, y, cells)?;
        if sub.total().is_one() {
            Ok(LoadedTable::Normalized(sub.into_joint()?))
        } else if allow_subnormalized {
            Ok(LoadedTable::Subnormalized(sub))
        } else {
            Err(Error::NotNormalized(sub.total().to_string()))
        }
    }
}

/// Joint distribution of several named coordinates, used to regroup
/// variables, e.g. to form `P_{(X,Y),Z}` from `P_{XYZ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiDist {
    alphabets: Vec<Alphabet>,
    atoms: Vec<(Vec<usize>, Prob)>,
}

impl MultiDist {
    pub fn new(alphabets: Vec<Alphabet>, raw: Vec<(Vec<usize>, Prob)>) -> Result<Self> {
        let mut cells: HashMap<Vec<usize>, Prob> = HashMap::new();
        for (idx, m) in raw {
            if idx.len() != alphabets.len()
                || idx.iter().zip(&alphabets).any(|(&i, a)| i >= a.len())
            {
                return Err(Error::InvalidParameter("atom index outside alphabet".into()));
            }
            if m.is_negative() {
                return Err(Error::NegativeMass(m.to_string()));
            }
            if m.is_positive() {
                *cells.entry(idx).or_insert_with(Prob::zero) += m;
            }
        }
        check_budget(cells.len() as u128)?;
        let total: Prob = cells.values().sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(total.to_string()));
        }
        let mut atoms: Vec<_> = cells.into_iter().collect();
        atoms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Ok(MultiDist { alphabets, atoms })
    }

    pub fn from_joint(j: &JointDist) -> Self {
        MultiDist {
            alphabets: vec![j.x.clone(), j.y.clone()],
            atoms: j.atoms.iter().map(|a| (vec![a.x, a.y], a.mass.clone())).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabet(&self, coord: usize) -> &Alphabet {
        &self.alphabets[coord]
    }

    pub fn atoms(&self) -> &[(Vec<usize>, Prob)] {
        &self.atoms
    }

    /// Independent product; coordinates of `other` follow those of `self`.
    pub fn product(&self, other: &MultiDist) -> Result<MultiDist> {
        check_budget(self.atoms.len() as u128 * other.atoms.len() as u128)?;
        let mut alphabets = self.alphabets.clone();
        alphabets.extend(other.alphabets.iter().cloned());
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for (a, p) in &self.atoms {
            for (b, q) in &other.atoms {
                let mut idx = a.clone();
                idx.extend_from_slice(b);
                atoms.push((idx, p * q));
            }
        }
        Ok(MultiDist { alphabets, atoms })
    }

    /// Appends a coordinate computed deterministically from each atom.
    pub fn with_function(
        &self,
        alphabet: Alphabet,
        f: impl Fn(&[usize]) -> usize,
    ) -> MultiDist {
        let mut alphabets = self.alphabets.clone();
        alphabets.push(alphabet);
        let atoms = self
            .atoms
            .iter()
            .map(|(idx, p)| {
                let mut idx2 = idx.clone();
                idx2.push(f(idx));
                (idx2, p.clone())
            })
            .collect();
        MultiDist { alphabets, atoms }
    }

    /// Groups coordinates `xs` into `X` and `ys` into `Y`; other coordinates
    /// are summed out. An empty `ys` gives a trivial `Y`.
    pub fn group(&self, xs: &[usize], ys: &[usize]) -> Result<JointDist> {
        let (xa, xmap) = self.tuple_alphabet(xs)?;
        let (ya, ymap) = self.tuple_alphabet(ys)?;
        let mut cells: HashMap<(usize, usize), Prob> = HashMap::new();
        for (idx, p) in &self.atoms {
            let kx = xmap[&project(idx, xs)];
            let ky = ymap[&project(idx, ys)];
            *cells.entry((kx, ky)).or_insert_with(Prob::zero) += p;
        }
        let mut atoms: Vec<Atom> =
            cells.into_iter().map(|((x, y), mass)| Atom { x, y, mass }).collect();
        atoms.sort_unstable_by_key(|a| (a.x, a.y));
        Ok(JointDist { x: xa, y: ya, atoms })
    }

    fn tuple_alphabet(&self, coords: &[usize]) -> Result<(Alphabet, HashMap<Vec<usize>, usize>)> {
        if coords.iter().any(|&c| c >= self.arity()) {
            return Err(Error::InvalidParameter("coordinate out of range".into()));
        }
        if coords.is_empty() {
            return Ok((Alphabet::unit(), HashMap::from([(Vec::new(), 0)])));
        }
        let mut keys: Vec<Vec<usize>> = self.atoms.iter().map(|(i, _)| project(i, coords)).collect();
        keys.sort_unstable();
        keys.dedup();
        let labels = keys
            .iter()
            .map(|k| Symbol::tuple(k.iter().zip(coords).map(|(&i, &c)| self.alphabets[c].symbol(i))))
            .collect();
        let map = keys.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
        Ok((Alphabet::new(labels)?, map))
    }
}

fn project(idx: &[usize], coords: &[usize]) -> Vec<usize> {
    coords.iter().map(|&c| idx[c]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(cells: &[(&str, &str, i64, i64)]) -> JointDist {
        JointDist::from_labels(cells.iter().map(|&(x, y, n, d)| (x, y, ratio(n, d)))).unwrap()
    }

    #[test]
    fn marginals_and_condition() {
        let j = table(&[("a", "0", 1, 4), ("b", "0", 1, 4), ("a", "1", 1, 2)]);
        assert_eq!(j.marginal_x().get("a"), ratio(3, 4));
        assert_eq!(j.marginal_y().get("1"), ratio(1, 2));
        assert_eq!(j.condition("0").unwrap().get("b"), ratio(1, 2));
    }

    #[test]
    fn condition_on_missing_column_fails() {
        let x = Alphabet::from_labels(["a"]).unwrap();
        let y = Alphabet::from_labels(["0", "1"]).unwrap();
        let j = JointDist::from_indexed(x, y, [(0, 0, ratio(1, 1))]).unwrap();
        assert_eq!(j.condition("1"), Err(Error::ZeroConditioning));
    }

    #[test]
    fn rejects_unnormalized() {
        let r = JointDist::from_labels([("a", "0", ratio(1, 3))]);
        assert!(matches!(r, Err(Error::NotNormalized(_))));
    }

    #[test]
    fn product_has_tuple_labels() {
        let j = table(&[("0", "0", 1, 2), ("1", "1", 1, 2)]);
        let p = j.product(&j).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.get("(0,1)", "(0,1)"), ratio(1, 4));
        let q = j.power(3).unwrap();
        assert_eq!(q.len(), 8);
        assert_eq!(q.get("(0,1,1)", "(0,1,1)"), ratio(1, 8));
    }

    #[test]
    fn distance_matches_by_label() {
        let a = table(&[("0", "0", 1, 2), ("1", "0", 1, 2)]);
        let b = table(&[("1", "0", 1, 4), ("0", "0", 3, 4)]);
        assert_eq!(stat_distance(&a, &b), ratio(1, 4));
        assert_eq!(stat_distance(&a, &a), Prob::zero());
    }

    #[test]
    fn event_weights_are_checked() {
        let j = table(&[("0", "0", 1, 2), ("1", "0", 1, 2)]);
        let bad = EventWeights(vec![ratio(3, 2), ratio(1, 1)]);
        assert!(matches!(j.apply_event(&bad), Err(Error::WeightOutOfRange(_))));
        let q = j.apply_event(&EventWeights(vec![ratio(1, 2), ratio(1, 1)])).unwrap();
        assert_eq!(q.total(), ratio(3, 4));
        assert_eq!(q.guessing_probability(), ratio(1, 2));
    }

    #[test]
    fn file_round_trip() {
        let j = table(&[("a", "0", 1, 8), ("b", "1", 7, 8)]);
        let text = j.to_file().to_json();
        let back = TableFile::from_json(&text).unwrap().load(false).unwrap();
        assert_eq!(back, LoadedTable::Normalized(j));
    }

    #[test]
    fn subnormalized_file_needs_flag() {
        let f = TableFile {
            x_alphabet: vec!["a".into()],
            y_alphabet: vec!["0".into()],
            mass: vec![vec!["1/2".into()]],
        };
        assert!(f.load(false).is_err());
        assert!(matches!(f.load(true), Ok(LoadedTable::Subnormalized(_))));
    }

    #[test]
    fn big_log_is_accurate() {
        let p = BigRational::new(BigInt::from(1), BigInt::from(2).pow(3000u32));
        assert!((log2(&p) + 3000.0).abs() < 1e-9);
    }

    #[test]
    fn group_regroups_coordinates() {
        let j = table(&[("0", "0", 1, 4), ("0", "1", 1, 4), ("1", "1", 1, 2)]);
        let m = MultiDist::from_joint(&j).with_function(Alphabet::from_labels(["e", "o"]).unwrap(), |i| {
            (i[0] + i[1]) % 2
        });
        let g = m.group(&[2], &[0]).unwrap();
        assert_eq!(g.get("o", "0"), ratio(1, 4));
        let u = m.group(&[0, 1], &[]).unwrap();
        assert_eq!(u.get("(1,1)", "*"), ratio(1, 2));
    }
}
