//! Lower bounds on the resources needed by secure reductions.
//!
//! Every evaluator returns a [`BoundReport`]: a required value, optionally
//! the value measured on a resource, and a verdict. Bounds whose proofs only
//! hold for small errors report [`Verdict::Vacuous`] outside that range
//! instead of extrapolating.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::dist::{ratio, to_f64, JointDist, Prob};
use crate::entropy::{h, max_entropy_cond, mutual_info_cond, shannon_cond, smooth_min_entropy};
use crate::error::{Error, Result};
use crate::primitives::{check_condition_1, find_y1_y2, PrimitiveSpec};
use crate::structure::common_part;

/// Tolerance for comparing a measured value with a requirement.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfiable,
    Violated,
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub required: f64,
    pub measured: Option<f64>,
    /// `measured - required`.
    pub slack: Option<f64>,
    pub verdict: Verdict,
}

impl BoundReport {
    /// A requirement with nothing measured yet: vacuous when `required <= 0`,
    /// otherwise satisfiable (nothing contradicts it).
    pub fn new(name: impl Into<String>, required: f64) -> BoundReport {
        let verdict = if required <= 0.0 { Verdict::Vacuous } else { Verdict::Satisfiable };
        BoundReport { name: name.into(), required, measured: None, slack: None, verdict }
    }

    /// A bound whose precondition does not hold.
    pub fn vacuous(name: impl Into<String>, required: f64) -> BoundReport {
        BoundReport { name: name.into(), required, measured: None, slack: None, verdict: Verdict::Vacuous }
    }

    pub fn with_measured(mut self, measured: f64) -> BoundReport {
        self.measured = Some(measured);
        self.slack = Some(measured - self.required);
        if self.verdict != Verdict::Vacuous {
            self.verdict =
                if measured >= self.required - TOLERANCE { Verdict::Satisfiable } else { Verdict::Violated };
        }
        self
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("error {eps} is outside [0, 1]")));
    }
    Ok(())
}

/// Implementing `m` instances of `OT(1, n, k)` from any `P_UV` with error
/// `eps` needs `H(U|V)`, `H(V|U)` and `I(U;V|C)` at least these values.
pub fn thm_impossibility_bounds(n: usize, k: usize, m: usize, eps: f64) -> Result<[BoundReport; 3]> {
    check_eps(eps)?;
    if n < 2 || k == 0 || m == 0 {
        return Err(Error::InvalidParameter("need n >= 2, k >= 1, m >= 1".into()));
    }
    let (n, k, m) = (n as f64, k as f64, m as f64);
    let he = h(eps);
    Ok([
        BoundReport::new("H(U|V)", m * (n - 1.0) * k - (4.0 * n - 1.0) * (eps * m * k + he)),
        BoundReport::new("H(V|U)", m * n.log2() - m * (4.0 * n.log2() + 7.0) * (eps + he)),
        BoundReport::new("I(U;V|C)", m * k - 7.0 * eps * m * k - 7.0 * he),
    ])
}

/// `M` instances of `OT(1, N, K)` from `m` instances of `OT(1, n, k)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionParams {
    pub big_m: usize,
    pub big_n: usize,
    pub big_k: usize,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub eps: f64,
}

impl ReductionParams {
    pub fn validate(&self) -> Result<()> {
        check_eps(self.eps)?;
        if self.big_n < 2 || self.n < 2 {
            return Err(Error::InvalidParameter("OT arity must be at least 2".into()));
        }
        if [self.big_m, self.big_k, self.m, self.k].contains(&0) {
            return Err(Error::InvalidParameter("counts and string lengths must be positive".into()));
        }
        Ok(())
    }
}

/// Required `m / M`:
/// `max((N-1)K / ((n-1)k), K/k, log N / log n) - 7NK(eps + h(eps))`.
pub fn rate_bound_main2(p: &ReductionParams) -> Result<BoundReport> {
    p.validate()?;
    let (bn, bk, n, k) = (p.big_n as f64, p.big_k as f64, p.n as f64, p.k as f64);
    let ratio = ((bn - 1.0) * bk / ((n - 1.0) * k)).max(bk / k).max(bn.log2() / n.log2());
    let required = ratio - 7.0 * bn * bk * (p.eps + h(p.eps));
    Ok(BoundReport::new("rate m/M", required).with_measured(p.m as f64 / p.big_m as f64))
}

/// `m(n-1)k >= M(N-1)K - (6n+2)eps`, proven for `eps < 1/(2(3n+1))`.
pub fn minentropy_feasibility(p: &ReductionParams) -> Result<BoundReport> {
    p.validate()?;
    let required = (p.big_m * (p.big_n - 1) * p.big_k) as f64 - (6 * p.n + 2) as f64 * p.eps;
    let measured = (p.m * (p.n - 1) * p.k) as f64;
    let name = "m(n-1)k";
    if p.eps >= 1.0 / (2 * (3 * p.n + 1)) as f64 {
        return Ok(BoundReport::vacuous(name, required));
    }
    Ok(BoundReport::new(name, required).with_measured(measured))
}

/// Smallest error the min-entropy bound allows, as an exact rational:
/// `deficit / (6n+2)` with `deficit = M(N-1)K - m(n-1)k`, capped at the
/// edge `1/(2(3n+1))` of the proven range. Zero when there is no deficit.
pub fn minimal_error(p: &ReductionParams) -> Result<Prob> {
    p.validate()?;
    let deficit = (p.big_m * (p.big_n - 1) * p.big_k) as i64 - (p.m * (p.n - 1) * p.k) as i64;
    if deficit <= 0 {
        return Ok(Prob::zero());
    }
    let d = (6 * p.n + 2) as i64;
    Ok(ratio(deficit, d).min(ratio(1, d)))
}

/// `EQ_n` from `m` OTs: `m >= k - 1 - (6 * 2^k + 2) eps` for
/// `eps <= 1/(6 * 2^k + 2)`.
pub fn eq_bound(k: usize, eps: f64) -> Result<BoundReport> {
    check_eps(eps)?;
    if k == 0 || k > 60 {
        return Err(Error::InvalidParameter(format!("k = {k} must be in 1..=60")));
    }
    let c = 6.0 * (1u64 << k) as f64 + 2.0;
    let required = k as f64 - 1.0 - c * eps;
    if eps > 1.0 / c {
        return Ok(BoundReport::vacuous("OT count", required));
    }
    Ok(BoundReport::new("OT count", required))
}

/// `IP_n` from `m` OTs: `m >= n - 1 - (6n + 2) eps` for `eps < 1/(6n + 2)`.
pub fn ip_bound(n: usize, eps: f64) -> Result<BoundReport> {
    check_eps(eps)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let c = (6 * n + 2) as f64;
    let required = n as f64 - 1.0 - c * eps;
    if eps >= 1.0 / c {
        return Ok(BoundReport::vacuous("OT count", required));
    }
    Ok(BoundReport::new("OT count", required))
}

/// `m` instances of OLFE over `GF(q)`: lower bounds on `H(U|V)`, `H(V|U)`
/// and `I(U;V|C)`.
pub fn olfe_bound(q: u64, m: usize, eps: f64) -> Result<[BoundReport; 3]> {
    check_eps(eps)?;
    if q < 2 || m == 0 {
        return Err(Error::InvalidParameter("need q >= 2 and m >= 1".into()));
    }
    let l = m as f64 * (q as f64).log2();
    let he = h(eps);
    Ok([
        BoundReport::new("H(U|V)", l - 5.0 * (eps * l + he)),
        BoundReport::new("H(V|U)", l - 5.0 * (eps * l + he)),
        BoundReport::new("I(U;V|C)", l - 7.0 * (eps * l + he)),
    ])
}

/// Which output-size term the Shannon bound uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputTerm {
    /// `d_f = log max_y |{f(x, y)}|`.
    #[default]
    Image,
    /// `log |Z|`.
    Alphabet,
}

/// `H(U|V) >= max_y H(X|f(X,y)) - (3|Y|-1)(eps L + h(eps)) - eps log|X|`
/// where `L` is chosen by `term`.
pub fn general_h_bound(f: &PrimitiveSpec, resource: &PrimitiveSpec, eps: f64, term: OutputTerm) -> Result<BoundReport> {
    check_eps(eps)?;
    if !check_condition_1(f)? {
        return Err(Error::ConditionViolated);
    }
    let t = f.function()?;
    let j = resource.randomness()?;
    let l = match term {
        OutputTerm::Image => t.d_f(),
        OutputTerm::Alphabet => (t.z.len() as f64).log2(),
    };
    let ny = t.y.len() as f64;
    let (best, _) = t.max_shannon_given_output();
    let required = best - (3.0 * ny - 1.0) * (eps * l + h(eps)) - eps * (t.x.len() as f64).log2();
    Ok(BoundReport::new("H(U|V)", required).with_measured(shannon_cond(j)))
}

/// `I(U;V|C(U,V))`, with `C` the common part.
pub fn common_part_information(j: &JointDist) -> Result<f64> {
    let cp = common_part(j)?;
    mutual_info_cond(&cp.joint_with(j), &[0], &[1], &[2])
}

/// `I(U;V|C) >= log|X| - 7(eps log|X| + h(eps))` for functions with an
/// injective column and a constant column.
pub fn general_i_bound(f: &PrimitiveSpec, resource: &PrimitiveSpec, eps: f64) -> Result<BoundReport> {
    check_eps(eps)?;
    find_y1_y2(f)?;
    let t = f.function()?;
    let lx = (t.x.len() as f64).log2();
    let required = lx - 7.0 * (eps * lx + h(eps));
    Ok(BoundReport::new("I(U;V|C)", required).with_measured(common_part_information(resource.randomness()?)?))
}

/// `(3|Y|+1) eps + eps'`, the smoothing at which the resource is measured.
pub fn compound_smoothing(ny: usize, eps: &Prob, eps_prime: &Prob) -> Prob {
    Prob::from_integer((3 * ny + 1).into()) * eps + eps_prime
}

/// `H_min^{(3|Y|+1)eps + eps'}(U|V) >= max_y H_min^{eps'}(X|f(X,y))`.
pub fn general_hmin_bound(f: &PrimitiveSpec, resource: &PrimitiveSpec, eps: &Prob, eps_prime: &Prob) -> Result<BoundReport> {
    if eps.is_negative() || eps_prime.is_negative() {
        return Err(Error::Domain("smoothing parameters must be non-negative".into()));
    }
    let t = f.function()?;
    let s = compound_smoothing(t.y.len(), eps, eps_prime);
    if s >= Prob::one() {
        return Err(Error::SmoothingOutOfRange(s.to_string()));
    }
    hmin_bound_at(f, resource, &s, eps_prime)
}

/// The min-entropy comparison with the resource smoothed by `smoothing`
/// directly, for callers that state the error as the total smoothing.
pub fn hmin_bound_at(f: &PrimitiveSpec, resource: &PrimitiveSpec, smoothing: &Prob, eps_prime: &Prob) -> Result<BoundReport> {
    if !check_condition_1(f)? {
        return Err(Error::ConditionViolated);
    }
    let t = f.function()?;
    let (best, _) = t.max_smooth_min_given_output(eps_prime)?;
    let measured = smooth_min_entropy(resource.randomness()?, smoothing)?;
    Ok(BoundReport::new("H_min(U|V)", best.value).with_measured(measured.value))
}

/// Error of the semi-honest protocol as an implementation in the malicious
/// model: `(2n+1) eps`.
pub fn malicious_transfer(eps: &Prob, n: usize) -> Prob {
    Prob::from_integer((2 * n + 1).into()) * eps
}

/// `OT(1, 2, k)` in the malicious model from `(U, VV')`:
/// `H_min^{7 eps}(U|VV') >= k` and `H(U|VV') >= k - 6(k eps + h(eps))`.
pub fn malicious_bounds(resource: &PrimitiveSpec, k: usize, eps: &Prob) -> Result<[BoundReport; 2]> {
    let e = to_f64(eps);
    check_eps(e)?;
    let j = resource.randomness()?;
    let smoothing = Prob::from_integer(7.into()) * eps;
    let hmin = if smoothing >= Prob::one() {
        BoundReport::vacuous("H_min(U|VV')", k as f64)
    } else {
        BoundReport::new("H_min(U|VV')", k as f64).with_measured(smooth_min_entropy(j, &smoothing)?.value)
    };
    let kf = k as f64;
    let shannon = BoundReport::new("H(U|VV')", kf - 6.0 * (kf * e + h(e))).with_measured(shannon_cond(j));
    Ok([hmin, shannon])
}

/// Largest error the quantum bounds are proven for.
pub const QUANTUM_EPS_LIMIT: f64 = 0.002;

fn quantum_rhs(k: f64, eps: f64) -> f64 {
    let r = eps.sqrt();
    (1.0 - 3.0 * r) * k - 3.0 * h(r)
}

/// Bit commitments needed for `OT(1, 2, k)` with error `eps`:
/// `(1 - 3 sqrt eps) k - 3 h(sqrt eps)`.
pub fn quantum_commit_bits(k: usize, eps: f64) -> Result<BoundReport> {
    check_eps(eps)?;
    let required = quantum_rhs(k as f64, eps);
    if eps > QUANTUM_EPS_LIMIT {
        return Ok(BoundReport::vacuous("committed bits", required));
    }
    Ok(BoundReport::new("committed bits", required))
}

/// Individual commitments needed: `log(1/eps) - 6`, for `0 < eps <= 0.002`.
pub fn quantum_commit_count(eps: f64) -> Result<BoundReport> {
    check_eps(eps)?;
    if eps == 0.0 {
        return Err(Error::Domain("the commitment count bound needs eps > 0".into()));
    }
    let required = (1.0 / eps).log2() - 6.0;
    if eps > QUANTUM_EPS_LIMIT {
        return Ok(BoundReport::vacuous("commitments", required));
    }
    Ok(BoundReport::new("commitments", required))
}

/// Quantum `OT(1, 2, k)` from `P_UV`: `H_max(U|V) + H_max(V|U)` and
/// `2 H(UV)` must each reach `(1 - 3 sqrt eps) k - 3 h(sqrt eps)`.
pub fn quantum_randomness_bounds(resource: &PrimitiveSpec, k: usize, eps: f64) -> Result<[BoundReport; 2]> {
    check_eps(eps)?;
    let j = resource.randomness()?;
    let required = quantum_rhs(k as f64, eps);
    let hmax = max_entropy_cond(j) + max_entropy_cond(&j.swap());
    let joint = j.marginal_y().entropy() + shannon_cond(j);
    let make = |name: &str, measured: f64| {
        if eps > QUANTUM_EPS_LIMIT {
            BoundReport::vacuous(name, required)
        } else {
            BoundReport::new(name, required).with_measured(measured)
        }
    };
    Ok([make("H_max(U|V)+H_max(V|U)", hmax), make("2H(UV)", 2.0 * joint)])
}

/// `n` bit OTs in either direction for quantum `OT(1, 2, k)`:
/// `2n >= (1 - 3 sqrt eps) k - 3 h(sqrt eps)`.
pub fn quantum_ot_count(n: usize, k: usize, eps: f64) -> Result<BoundReport> {
    check_eps(eps)?;
    let required = quantum_rhs(k as f64, eps);
    if eps > QUANTUM_EPS_LIMIT {
        return Ok(BoundReport::vacuous("2n", required));
    }
    Ok(BoundReport::new("2n", required).with_measured(2.0 * n as f64))
}

/// Smallest error of any quantum OT protocol using `kappa` commitments:
/// `2^-kappa / 36`.
pub fn quantum_commitment_error(kappa: u32) -> Prob {
    Prob::new(1.into(), num_bigint::BigInt::from(36) << kappa as usize)
}

/// Lower bound on the error of a quantum protocol turning `m` bit OTs into
/// `m + 1`. Iterating it `3m` times gives `4m` OTs with error `3m eps`;
/// that is impossible at any error up to 0.002 when
/// `12 sqrt(0.002) + 3 h(sqrt 0.002) / m < 2`, so `eps >= 0.002 / (3m)`.
/// `None` when the check fails and no bound follows.
pub fn quantum_extension_min_error(m: usize) -> Result<Option<Prob>> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    let r = QUANTUM_EPS_LIMIT.sqrt();
    let lhs = 12.0 * r + 3.0 * h(r) / m as f64;
    Ok((lhs < 2.0).then(|| ratio(1, 1500 * m as i64)))
}

/// How a reduction's resource is described.
#[derive(Clone, Debug)]
pub enum ResourceDesc<'a> {
    /// `m` instances of `OT(1, n, k)`, evaluated in closed form.
    Ot { n: usize, k: usize, m: usize },
    /// An explicit table.
    Table(&'a PrimitiveSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionReport {
    pub reports: Vec<BoundReport>,
    /// For OT resources: smallest error not excluded by the min-entropy
    /// bound, as a fraction.
    pub minimal_error: Option<String>,
    pub minimal_error_f64: Option<f64>,
    /// For OT resources: the required `m / M` at error 0.
    pub required_ratio: Option<f64>,
}

/// Checks `M` instances of `OT(1, N, K)` against a resource.
pub fn check_reduction(big_n: usize, big_k: usize, big_m: usize, resource: &ResourceDesc, eps: f64) -> Result<ReductionReport> {
    check_eps(eps)?;
    let mut reports: Vec<BoundReport> = thm_impossibility_bounds(big_n, big_k, big_m, eps)?.into();
    match resource {
        ResourceDesc::Ot { n, k, m } => {
            let p = ReductionParams { big_m, big_n, big_k, m: *m, n: *n, k: *k, eps };
            let (n, k, m) = (*n as f64, *k as f64, *m as f64);
            let measured = [m * (n - 1.0) * k, m * n.log2(), m * k];
            for (r, v) in reports.iter_mut().zip(measured) {
                *r = r.clone().with_measured(v);
            }
            reports.push(rate_bound_main2(&p)?);
            reports.push(minentropy_feasibility(&p)?);
            let me = minimal_error(&p)?;
            let zero = ReductionParams { eps: 0.0, ..p.clone() };
            Ok(ReductionReport {
                reports,
                minimal_error_f64: me.to_f64(),
                minimal_error: Some(me.to_string()),
                required_ratio: Some(rate_bound_main2(&zero)?.required),
            })
        }
        ResourceDesc::Table(spec) => {
            let j = spec.randomness()?;
            let measured = [shannon_cond(j), shannon_cond(&j.swap()), common_part_information(j)?];
            for (r, v) in reports.iter_mut().zip(measured) {
                *r = r.clone().with_measured(v);
            }
            let eps_q = crate::entropy::eps_from_f64(eps)?;
            let s = Prob::from_integer((3 * big_n + 1).into()) * &eps_q;
            let required = (big_m * (big_n - 1) * big_k) as f64;
            if s < Prob::one() {
                let hmin = smooth_min_entropy(j, &s)?.value;
                reports.push(BoundReport::new("H_min(U|V)", required).with_measured(hmin));
            } else {
                reports.push(BoundReport::vacuous("H_min(U|V)", required));
            }
            // The same comparison with eps read as the total smoothing of
            // the resource, which stays meaningful when (3N+1) eps >= 1.
            if eps_q < Prob::one() {
                let hmin = smooth_min_entropy(j, &eps_q)?.value;
                reports.push(BoundReport::new("H_min^eps(U|V)", required).with_measured(hmin));
            }
            Ok(ReductionReport { reports, minimal_error: None, minimal_error_f64: None, required_ratio: None })
        }
    }
}
