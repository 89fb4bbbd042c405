//! Resource tables and function tables for the standard primitives.
//!
//! Randomness primitives are joint tables `P_UV`:
//!
//! - `OT(t, n, k)^m`: `U = (x_0, .., x_{n-1})` uniform `k`-bit strings,
//!   `V = (c, x_c)` for a uniform sorted `t`-subset `c`;
//! - `Rabin(p, k)`: `U` uniform, `V = U` with probability `p`, else `Δ`;
//! - `OLFE(q)^m`: `U = (a, b)` uniform in `GF(q)^2`, `V = (c, a + b c)`;
//! - leaky OT(`alpha`): `OT(1, 2, 1)` where Bob also receives `x_{1-c}`
//!   with probability `1 - alpha`, else `⊥`.
//!
//! Function primitives are tables `f(x, y)` with inputs taken uniformly when
//! entropies are measured.
//!
//! Labels: bit strings are written as digit strings, an OT receiver value as
//! `c:bits` (indices comma-separated when `t > 1`), and products of several
//! instances as tuples `(a,b,..)`.

use std::collections::HashSet;
use std::sync::Arc;

use num_traits::{One, Signed};

use crate::dist::{check_budget, parse_prob, ratio, Alphabet, JointDist, Prob, Symbol};
use crate::entropy::{smooth_min_entropy, EntropyReport};
use crate::error::{Error, Result};
use crate::protocol::{
    render, rule, ProtocolProgram, ResourceTable, Simulator, Simulators, StepBuilder, Party, Value, View,
};

/// A named primitive.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveSpec {
    pub name: String,
    pub kind: PrimitiveKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PrimitiveKind {
    Randomness(JointDist),
    Function(FunctionTable),
}

impl PrimitiveSpec {
    pub fn randomness(&self) -> Result<&JointDist> {
        match &self.kind {
            PrimitiveKind::Randomness(j) => Ok(j),
            PrimitiveKind::Function(_) => Err(Error::Unsupported(format!("{} is a function, not a resource", self.name))),
        }
    }

    pub fn function(&self) -> Result<&FunctionTable> {
        match &self.kind {
            PrimitiveKind::Function(f) => Ok(f),
            PrimitiveKind::Randomness(_) => Err(Error::NotAFunction(self.name.clone())),
        }
    }
}

/// Deterministic two-input function `f: X x Y -> Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionTable {
    pub x: Alphabet,
    pub y: Alphabet,
    pub z: Alphabet,
    /// `table[x][y]` is the index of `f(x, y)` in `z`.
    pub table: Vec<Vec<usize>>,
}

impl FunctionTable {
    pub fn eval(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    /// The same function on a sub-domain. The output alphabet is kept.
    pub fn restrict(&self, xs: &[usize], ys: &[usize]) -> Result<FunctionTable> {
        let x = Alphabet::new(xs.iter().map(|&i| self.x.symbol(i).clone()).collect())?;
        let y = Alphabet::new(ys.iter().map(|&j| self.y.symbol(j).clone()).collect())?;
        let table = xs.iter().map(|&i| ys.iter().map(|&j| self.table[i][j]).collect()).collect();
        Ok(FunctionTable { x, y, z: self.z.clone(), table })
    }

    /// Joint law of `(X, f(X, y))` for uniform `X`.
    pub fn output_table(&self, y: usize) -> Result<JointDist> {
        let w = ratio(1, self.x.len() as i64);
        JointDist::from_indexed(
            self.x.clone(),
            self.z.clone(),
            (0..self.x.len()).map(|x| (x, self.table[x][y], w.clone())),
        )
    }

    /// `H(X | f(X, y))` for uniform `X`.
    pub fn shannon_given_output(&self, y: usize) -> f64 {
        let n = self.x.len() as f64;
        let mut counts = vec![0usize; self.z.len()];
        for row in &self.table {
            counts[row[y]] += 1;
        }
        counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 / n * (c as f64).log2()).sum()
    }

    /// `max_y H(X | f(X, y))` and a maximizing `y`.
    pub fn max_shannon_given_output(&self) -> (f64, usize) {
        (0..self.y.len())
            .map(|y| (self.shannon_given_output(y), y))
            .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
    }

    /// `max_y H_min^eps(X | f(X, y))` for uniform `X`.
    pub fn max_smooth_min_given_output(&self, eps: &Prob) -> Result<(EntropyReport, usize)> {
        let mut best: Option<(EntropyReport, usize)> = None;
        for y in 0..self.y.len() {
            let r = smooth_min_entropy(&self.output_table(y)?, eps)?;
            if best.as_ref().is_none_or(|(b, _)| r.objective < b.objective) {
                best = Some((r, y));
            }
        }
        best.ok_or_else(|| Error::InvalidParameter("function has no inputs".into()))
    }

    /// `d_f = log max_y |{f(x, y) : x}|`.
    pub fn d_f(&self) -> f64 {
        (0..self.y.len())
            .map(|y| self.table.iter().map(|r| r[y]).collect::<HashSet<_>>().len())
            .max()
            .map(|c| (c as f64).log2())
            .unwrap_or(0.0)
    }
}

/// `n`-bit strings, most significant bit first.
pub fn bit_strings(n: usize) -> Vec<Value> {
    (0..1u64 << n).map(|i| (0..n).map(|j| ((i >> (n - 1 - j)) & 1) as u8).collect()).collect()
}

/// Sorted `t`-subsets of `0..n`, in lexicographic order.
pub fn subsets(n: usize, t: usize) -> Vec<Vec<u8>> {
    fn go(start: usize, n: usize, t: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i as u8);
            go(i + 1, n, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, t, &mut Vec::new(), &mut out);
    out
}

fn choose(n: usize, t: usize) -> u128 {
    (0..t).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn check_ot_params(t: usize, n: usize, k: usize) -> Result<()> {
    if n < 2 || t == 0 || t >= n || k == 0 || n > 255 {
        return Err(Error::InvalidParameter(format!("OT({t},{n},{k}) needs 1 <= t < n and k >= 1")));
    }
    Ok(())
}

fn ot_v_label(c: &[u8], bits: &[u8]) -> String {
    let c = c.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    format!("{c}:{}", render(bits))
}

/// Structured atoms `(u, v, mass)` of one `OT(t, n, k)` instance, with
/// `v = c ++ x_c`.
pub fn ot_randomness_atoms(t: usize, n: usize, k: usize) -> Result<Vec<(Value, Value, Prob)>> {
    check_ot_params(t, n, k)?;
    let count = choose(n, t).checked_mul(1u128.checked_shl((n * k) as u32).unwrap_or(u128::MAX)).unwrap_or(u128::MAX);
    check_budget(count)?;
    let w = Prob::new(1.into(), count.into());
    let cs = subsets(n, t);
    let mut out = Vec::with_capacity(count as usize);
    for u in bit_strings(n * k) {
        for c in &cs {
            let mut v = c.clone();
            for &i in c {
                v.extend_from_slice(&u[i as usize * k..(i as usize + 1) * k]);
            }
            out.push((u.clone(), v, w.clone()));
        }
    }
    Ok(out)
}

/// `m` independent instances of randomized `OT(t, n, k)`.
pub fn make_ot_randomness(t: usize, n: usize, k: usize, m: usize) -> Result<PrimitiveSpec> {
    check_ot_params(t, n, k)?;
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let per = choose(n, t).saturating_mul(1u128.checked_shl((n * k) as u32).unwrap_or(u128::MAX));
    check_budget(per.saturating_pow(m as u32))?;
    let atoms = ot_randomness_atoms(t, n, k)?;
    let one = JointDist::from_labels(atoms.iter().map(|(u, v, p)| (render(u), ot_v_label(&v[..t], &v[t..]), p.clone())))?;
    Ok(PrimitiveSpec { name: format!("ot:{t},{n},{k},{m}"), kind: PrimitiveKind::Randomness(one.power(m)?) })
}

/// Uniform `k`-bit `U`; Bob sees `U` with probability `p` and `Δ` otherwise.
pub fn make_rabin_randomness(p: &Prob, k: usize) -> Result<PrimitiveSpec> {
    if p.is_negative() || *p > Prob::one() || k == 0 {
        return Err(Error::InvalidParameter(format!("Rabin({p}, {k}) needs p in [0,1] and k >= 1")));
    }
    check_budget(2u128 << k.min(100))?;
    let w = Prob::new(1.into(), (1u128 << k).into());
    let mut cells = Vec::new();
    for u in bit_strings(k) {
        let s = render(&u);
        cells.push((s.clone(), s.clone(), p * &w));
        cells.push((s, "Δ".to_string(), (Prob::one() - p) * &w));
    }
    Ok(PrimitiveSpec { name: format!("rabin:{p},{k}"), kind: PrimitiveKind::Randomness(JointDist::from_labels(cells)?) })
}

pub fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

fn check_prime(q: u64) -> Result<()> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    Ok(())
}

/// `m` instances of randomized oblivious linear function evaluation over
/// `GF(q)`.
pub fn make_olfe_randomness(q: u64, m: usize) -> Result<PrimitiveSpec> {
    check_prime(q)?;
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    check_budget((q as u128).saturating_pow(3).saturating_pow(m as u32))?;
    let w = ratio(1, (q * q * q) as i64);
    let mut cells = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                cells.push((format!("({a},{b})"), format!("({c},{})", (a + b * c) % q), w.clone()));
            }
        }
    }
    let one = JointDist::from_labels(cells)?;
    Ok(PrimitiveSpec { name: format!("olfe:{q},{m}"), kind: PrimitiveKind::Randomness(one.power(m)?) })
}

/// `OT(1, 2, 1)` randomness where Bob's view is `(V, V')`, with `V' = x_{1-c}`
/// with probability `1 - alpha` and `⊥` otherwise, so `H(U | V V') = alpha`.
pub fn make_leaky_ot_randomness(alpha: &Prob) -> Result<PrimitiveSpec> {
    if alpha.is_negative() || *alpha > Prob::one() {
        return Err(Error::InvalidParameter(format!("leak parameter {alpha} must be in [0,1]")));
    }
    let w = ratio(1, 8);
    let mut cells = Vec::new();
    for x in bit_strings(2) {
        for c in 0..2usize {
            let v = ot_v_label(&[c as u8], &[x[c]]);
            cells.push((render(&x), format!("({v},{})", x[1 - c]), (Prob::one() - alpha) * &w));
            cells.push((render(&x), format!("({v},⊥)"), alpha * &w));
        }
    }
    Ok(PrimitiveSpec { name: format!("leaky-ot:{alpha}"), kind: PrimitiveKind::Randomness(JointDist::from_labels(cells)?) })
}

/// Function primitives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionKind {
    /// `EQ_n(x, y) = [x == y]` on `n`-bit strings.
    Eq(usize),
    /// Inner product mod 2 of `n`-bit strings.
    Ip(usize),
    /// `OT(t, n, k)`: `x` is `n` strings of `k` bits, `y` a `t`-subset.
    Ot { t: usize, n: usize, k: usize },
    /// `(a, b), c -> a + b c` over `GF(q)`.
    Olfe(u64),
}

fn table_from(
    x: Vec<String>,
    y: Vec<String>,
    f: impl Fn(usize, usize) -> String,
) -> Result<FunctionTable> {
    check_budget(x.len() as u128 * y.len() as u128)?;
    let mut z: Vec<String> = Vec::new();
    let mut zi = std::collections::HashMap::new();
    let mut table = vec![vec![0; y.len()]; x.len()];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let v = f(i, j);
            *cell = *zi.entry(v.clone()).or_insert_with(|| {
                z.push(v);
                z.len() - 1
            });
        }
    }
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[a].cmp(&z[b]));
    let mut rank = vec![0; z.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    for row in &mut table {
        for cell in row.iter_mut() {
            *cell = rank[*cell];
        }
    }
    z.sort();
    Ok(FunctionTable {
        x: Alphabet::from_labels(x)?,
        y: Alphabet::from_labels(y)?,
        z: Alphabet::from_labels(z)?,
        table,
    })
}

pub fn make_function(kind: FunctionKind) -> Result<PrimitiveSpec> {
    let (name, table) = match kind {
        FunctionKind::Eq(n) | FunctionKind::Ip(n) => {
            if n == 0 || n > 12 {
                return Err(Error::InvalidParameter(format!("string length {n} must be in 1..=12")));
            }
            let s = bit_strings(n);
            let labels: Vec<String> = s.iter().map(|v| render(v)).collect();
            let is_eq = matches!(kind, FunctionKind::Eq(_));
            let t = table_from(labels.clone(), labels, |i, j| {
                let v = if is_eq { u8::from(s[i] == s[j]) } else { s[i].iter().zip(&s[j]).fold(0, |a, (p, q)| a ^ (p & q)) };
                v.to_string()
            })?;
            (if is_eq { format!("eq:{n}") } else { format!("ip:{n}") }, t)
        }
        FunctionKind::Ot { t, n, k } => {
            check_ot_params(t, n, k)?;
            check_budget((1u128 << (n * k).min(100)) * choose(n, t))?;
            let xs = bit_strings(n * k);
            let cs = subsets(n, t);
            let table = table_from(
                xs.iter().map(|v| render(v)).collect(),
                cs.iter().map(|c| c.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")).collect(),
                |i, j| {
                    let bits: Vec<u8> =
                        cs[j].iter().flat_map(|&c| xs[i][c as usize * k..(c as usize + 1) * k].to_vec()).collect();
                    render(&bits)
                },
            )?;
            (format!("ot-fn:{t},{n},{k}"), table)
        }
        FunctionKind::Olfe(q) => {
            check_prime(q)?;
            check_budget((q as u128).pow(3))?;
            let xs: Vec<(u64, u64)> = (0..q).flat_map(|a| (0..q).map(move |b| (a, b))).collect();
            let table = table_from(
                xs.iter().map(|(a, b)| format!("({a},{b})")).collect(),
                (0..q).map(|c| c.to_string()).collect(),
                |i, c| ((xs[i].0 + xs[i].1 * c as u64) % q).to_string(),
            )?;
            (format!("olfe-fn:{q}"), table)
        }
    };
    Ok(PrimitiveSpec { name, kind: PrimitiveKind::Function(table) })
}

/// Whether any two distinct inputs `x != x'` are told apart by some `y`.
pub fn check_condition_1(f: &PrimitiveSpec) -> Result<bool> {
    let t = f.function()?;
    let rows: HashSet<&Vec<usize>> = t.table.iter().collect();
    Ok(rows.len() == t.table.len())
}

/// Inputs `y1` on which `f(., y1)` is injective and `y2` on which it is
/// constant; the lowest-index pair is returned.
pub fn find_y1_y2(f: &PrimitiveSpec) -> Result<(Symbol, Symbol)> {
    let t = f.function()?;
    let column = |y: usize| t.table.iter().map(move |r| r[y]);
    let y1 = (0..t.y.len()).find(|&y| column(y).collect::<HashSet<_>>().len() == t.x.len());
    let y2 = (0..t.y.len()).find(|&y| column(y).collect::<HashSet<_>>().len() == 1);
    match (y1, y2) {
        (Some(a), Some(b)) => Ok((t.y.symbol(a).clone(), t.y.symbol(b).clone())),
        _ => Err(Error::NoWitness),
    }
}

/// Parses `ot:t,n,k,m`, `rabin:p,k`, `olfe:q,m`, `leaky-ot:alpha[,copies]`,
/// `eq:n`, `ip:n`, `ot-fn:t,n,k` and `olfe-fn:q`.
pub fn parse_primitive(s: &str) -> Result<PrimitiveSpec> {
    let (name, args) = s.split_once(':').ok_or_else(|| Error::Parse(format!("expected name:params, got {s:?}")))?;
    let args: Vec<&str> = args.split(',').map(str::trim).collect();
    let int = |i: usize| -> Result<usize> {
        args.get(i)
            .ok_or_else(|| Error::Parse(format!("{name} needs more parameters")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer {:?}", args[i])))
    };
    let arity = |n: usize| -> Result<()> {
        if args.len() != n {
            return Err(Error::Parse(format!("{name} takes {n} parameters, got {}", args.len())));
        }
        Ok(())
    };
    match name {
        "ot" => {
            arity(4)?;
            make_ot_randomness(int(0)?, int(1)?, int(2)?, int(3)?)
        }
        "rabin" => {
            arity(2)?;
            make_rabin_randomness(&parse_prob(args[0])?, int(1)?)
        }
        "olfe" => {
            arity(2)?;
            make_olfe_randomness(int(0)? as u64, int(1)?)
        }
        "leaky-ot" => {
            if args.len() != 1 && args.len() != 2 {
                return Err(Error::Parse("leaky-ot takes alpha[,copies]".into()));
            }
            let one = make_leaky_ot_randomness(&parse_prob(args[0])?)?;
            if args.len() == 2 {
                let m = int(1)?;
                if m == 0 {
                    return Err(Error::InvalidParameter("copies must be at least 1".into()));
                }
                let j = one.randomness()?.power(m)?;
                Ok(PrimitiveSpec { name: format!("{},{m}", one.name), kind: PrimitiveKind::Randomness(j) })
            } else {
                Ok(one)
            }
        }
        "eq" => {
            arity(1)?;
            make_function(FunctionKind::Eq(int(0)?))
        }
        "ip" => {
            arity(1)?;
            make_function(FunctionKind::Ip(int(0)?))
        }
        "ot-fn" => {
            arity(3)?;
            make_function(FunctionKind::Ot { t: int(0)?, n: int(1)?, k: int(2)? })
        }
        "olfe-fn" => {
            arity(1)?;
            make_function(FunctionKind::Olfe(int(0)? as u64))
        }
        _ => Err(Error::Parse(format!("unknown primitive {name:?}"))),
    }
}

fn xor_into(dst: &mut [u8], a: &[u8], b: &[u8]) {
    for ((d, x), y) in dst.iter_mut().zip(a).zip(b) {
        *d = x ^ y;
    }
}

/// OT(1, n, k) with chosen inputs from one randomized instance. Bob holds
/// `(c0, u_{c0})` and announces `d = (c0 - c) mod n`; Alice sends
/// `e_i = x_i ^ u_{(i + d) mod n}`; Bob outputs `e_c ^ u_{c0}`.
pub fn derandomize_ot(n: usize, k: usize) -> Result<ProtocolProgram> {
    check_ot_params(1, n, k)?;
    check_budget((1u128 << (2 * n * k).min(100)) * n as u128)?;
    let resource = ResourceTable { atoms: ot_randomness_atoms(1, n, k)? };
    let block = move |s: &[u8], i: usize| -> Vec<u8> { s[i * k..(i + 1) * k].to_vec() };
    let encrypt = move |x: &[u8], u: &[u8], d: usize| -> Vec<u8> {
        let mut e = vec![0; n * k];
        for i in 0..n {
            let j = (i + d) % n;
            xor_into(&mut e[i * k..(i + 1) * k], &block(x, i), &block(u, j));
        }
        e
    };

    let mut b = StepBuilder::new();
    b.send(Party::Bob, rule(move |v| vec![((v.resource[0] as usize + n - v.input[0] as usize) % n) as u8]));
    b.send(Party::Alice, rule(move |v| encrypt(&v.input, &v.resource, v.messages[1][0] as usize)));

    let sims = Simulators {
        alice: Simulator {
            coins: std::iter::repeat_n(2, n * k).chain([n as u8]).collect(),
            run: Arc::new(move |x, _, r| {
                let u = r[..n * k].to_vec();
                let d = r[n * k];
                View {
                    input: x.to_vec(),
                    resource: u.clone(),
                    messages: vec![vec![], vec![d], encrypt(x, &u, d as usize)],
                    ..View::default()
                }
            }),
        },
        bob: Simulator {
            // c0, then u_{c0}, then the n-1 unseen pads of e.
            coins: std::iter::once(n as u8).chain(std::iter::repeat_n(2, n * k)).collect(),
            run: Arc::new(move |y, z, r| {
                let c = y[0] as usize;
                let c0 = r[0] as usize;
                let pad = &r[1..1 + k];
                let mut e = r[1 + k..].to_vec();
                e.splice(c * k..c * k, z.iter().zip(pad).map(|(a, b)| a ^ b));
                let mut res = vec![c0 as u8];
                res.extend_from_slice(pad);
                View {
                    input: y.to_vec(),
                    resource: res,
                    messages: vec![vec![], vec![((c0 + n - c) % n) as u8], e],
                    ..View::default()
                }
            }),
        },
    };

    Ok(ProtocolProgram {
        name: format!("derandomized-ot({n},{k})"),
        resource: Some(resource),
        alice_coins: vec![],
        bob_coins: vec![],
        steps: b.build(),
        alice_output: None,
        bob_output: rule(move |v| {
            let c = v.input[0] as usize;
            let e = &v.messages[2];
            e[c * k..(c + 1) * k].iter().zip(&v.resource[1..]).map(|(a, b)| a ^ b).collect()
        }),
        x_domain: bit_strings(n * k),
        y_domain: (0..n as u8).map(|c| vec![c]).collect(),
        ideal: Arc::new(move |x, y| {
            let c = y[0] as usize;
            vec![(vec![], x[c * k..(c + 1) * k].to_vec(), Prob::one())]
        }),
        simulators: sims,
    })
}
