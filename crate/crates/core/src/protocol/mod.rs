//! Semi-honest two-party protocols over a shared resource.
//!
//! A [`ProtocolProgram`] is a fixed sequence of [`Step`]s. Each step is either
//! a message computed by one party from its current [`View`], or a call to an
//! ideal two-party functionality such as oblivious transfer. Alice may hold
//! `u` and Bob `v` from a resource table `P_UV` before the first step.
//! Messages alternate starting with Alice; the builder pads with empty
//! messages where a party speaks twice in a row.
//!
//! [`run_exact`] enumerates every resource atom and every coin outcome and
//! returns the exact law of the transcripts. [`verify_security`] compares
//! real views with the program's simulators, input pair by input pair:
//!
//! - correctness: distance between the real and ideal output laws;
//! - Alice: distance between `(View_A, Out_A, Out_B)` and
//!   `(S_A(x, o_A), o_A, o_B)`;
//! - Bob: distance between `(View_B, Out_A, Out_B)` and
//!   `(S_B(y, o_B), o_A, o_B)`;
//!
//! where `(o_A, o_B)` is drawn from the ideal functionality.
//!
//! [`run_sampled`] draws independent trials. Trial `i` of a run with seed `s`
//! uses ChaCha8 seeded from `s` on stream `i`, so results do not depend on
//! how trials are scheduled across threads.

mod gadgets;
pub mod mcom;
mod reverse;

pub use gadgets::{and_share_from_2ot, eq_amplify, eq_from_ot, ip_from_ot, ot_oracle};
pub use mcom::{Mcom, McomOpening, McomReceiver, McomSender, SenderStrategy};
pub use reverse::{reverse_ot_demo, ReverseOtReport};

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dist::{check_budget, ratio, stat_distance, Alphabet, JointDist, MultiDist, Prob};
use crate::error::{Error, Result};

/// A value held or sent by a party: a short vector of small digits.
pub type Value = Vec<u8>;

/// Renders a value as digits; values with any entry above 9 are dot-separated.
pub fn render(v: &[u8]) -> String {
    if v.iter().all(|&d| d < 10) {
        v.iter().map(|d| char::from(b'0' + d)).collect()
    } else {
        v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(".")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

/// Everything one party has seen.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct View {
    pub input: Value,
    pub resource: Value,
    pub coins: Value,
    /// All messages so far, in both directions.
    pub messages: Vec<Value>,
    /// This party's outputs from functionality calls.
    pub oracle: Vec<Value>,
}

impl View {
    /// Canonical label, used to compare real and simulated views.
    pub fn label(&self) -> String {
        let join = |vs: &[Value]| vs.iter().map(|v| render(v)).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        write!(
            s,
            "in={};res={};r={};m=[{}];o=[{}]",
            render(&self.input),
            render(&self.resource),
            render(&self.coins),
            join(&self.messages),
            join(&self.oracle)
        )
        .unwrap();
        s
    }
}

pub type Rule = Arc<dyn Fn(&View) -> Value + Send + Sync>;
/// Ideal two-party functionality: inputs of Alice and Bob to their outputs.
pub type Functionality = Arc<dyn Fn(&[u8], &[u8]) -> (Value, Value) + Send + Sync>;
/// Law of the ideal outputs `(o_A, o_B)` for inputs `(x, y)`.
pub type IdealFn = Arc<dyn Fn(&[u8], &[u8]) -> Vec<(Value, Value, Prob)> + Send + Sync>;

pub fn rule(f: impl Fn(&View) -> Value + Send + Sync + 'static) -> Rule {
    Arc::new(f)
}

#[derive(Clone)]
pub enum Step {
    Message { from: Party, rule: Rule },
    Oracle { name: String, alice: Rule, bob: Rule, f: Functionality },
}

/// Correlated randomness `P_UV` with structured values.
#[derive(Clone, Debug, PartialEq)]
pub struct ResourceTable {
    pub atoms: Vec<(Value, Value, Prob)>,
}

impl ResourceTable {
    pub fn to_joint(&self) -> Result<JointDist> {
        JointDist::from_labels(self.atoms.iter().map(|(u, v, p)| (render(u), render(v), p.clone())))
    }
}

/// Randomized map from (own input, own ideal output, coins) to a view.
#[derive(Clone)]
pub struct Simulator {
    /// Radix of each uniform coin.
    pub coins: Vec<u8>,
    pub run: Arc<dyn Fn(&[u8], &[u8], &[u8]) -> View + Send + Sync>,
}

#[derive(Clone)]
pub struct Simulators {
    pub alice: Simulator,
    pub bob: Simulator,
}

#[derive(Clone)]
pub struct ProtocolProgram {
    pub name: String,
    pub resource: Option<ResourceTable>,
    /// Radix of each of Alice's private uniform coins.
    pub alice_coins: Vec<u8>,
    pub bob_coins: Vec<u8>,
    pub steps: Vec<Step>,
    /// Alice's output; empty for one-sided protocols.
    pub alice_output: Option<Rule>,
    pub bob_output: Rule,
    pub x_domain: Vec<Value>,
    pub y_domain: Vec<Value>,
    pub ideal: IdealFn,
    pub simulators: Simulators,
}

impl ProtocolProgram {
    pub fn rounds(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Message { .. })).count()
    }

    /// Number of functionality calls named `name`.
    pub fn calls(&self, name: &str) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Oracle { name: n, .. } if n == name))
            .count()
    }
}

/// Accumulates steps, inserting empty messages to keep alternation.
#[derive(Default)]
pub struct StepBuilder {
    steps: Vec<Step>,
    last: Option<Party>,
}

impl StepBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn send(&mut self, from: Party, r: Rule) -> &mut Self {
        let expected = match self.last {
            None => Party::Alice,
            Some(p) => p.other(),
        };
        if expected != from {
            self.steps.push(Step::Message { from: expected, rule: rule(|_| Vec::new()) });
        }
        self.steps.push(Step::Message { from, rule: r });
        self.last = Some(from);
        self
    }

    pub fn oracle(&mut self, name: &str, alice: Rule, bob: Rule, f: Functionality) -> &mut Self {
        self.steps.push(Step::Oracle { name: name.to_string(), alice, bob, f });
        self
    }

    pub fn build(self) -> Vec<Step> {
        self.steps
    }
}

/// One complete execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub alice: View,
    pub bob: View,
    pub out_a: Value,
    pub out_b: Value,
}

impl Transcript {
    pub fn messages(&self) -> &[Value] {
        &self.alice.messages
    }
}

/// Runs the program deterministically on fixed inputs, resource and coins.
pub fn execute(
    p: &ProtocolProgram,
    x: &[u8],
    y: &[u8],
    u: &[u8],
    v: &[u8],
    ra: &[u8],
    rb: &[u8],
) -> Transcript {
    let mut a = View { input: x.to_vec(), resource: u.to_vec(), coins: ra.to_vec(), ..View::default() };
    let mut b = View { input: y.to_vec(), resource: v.to_vec(), coins: rb.to_vec(), ..View::default() };
    for step in &p.steps {
        match step {
            Step::Message { from, rule } => {
                let m = match from {
                    Party::Alice => rule(&a),
                    Party::Bob => rule(&b),
                };
                a.messages.push(m.clone());
                b.messages.push(m);
            }
            Step::Oracle { alice, bob, f, .. } => {
                let (oa, ob) = f(&alice(&a), &bob(&b));
                a.oracle.push(oa);
                b.oracle.push(ob);
            }
        }
    }
    let out_a = p.alice_output.as_ref().map(|f| f(&a)).unwrap_or_default();
    let out_b = (p.bob_output)(&b);
    Transcript { alice: a, bob: b, out_a, out_b }
}

/// Every outcome of a mixed-radix coin vector.
pub fn all_coins(radix: &[u8]) -> Vec<Value> {
    let mut out = vec![Vec::with_capacity(radix.len())];
    for &r in radix {
        let mut next = Vec::with_capacity(out.len() * r as usize);
        for prefix in &out {
            for d in 0..r {
                let mut v = prefix.clone();
                v.push(d);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn coin_space(radix: &[u8]) -> u128 {
    radix.iter().map(|&r| r as u128).product()
}

fn trivial_resource() -> ResourceTable {
    ResourceTable { atoms: vec![(Vec::new(), Vec::new(), Prob::one())] }
}

/// Exact law of the transcripts on inputs `(x, y)`.
pub fn run_exact(p: &ProtocolProgram, x: &[u8], y: &[u8]) -> Result<Vec<(Transcript, Prob)>> {
    let resource = p.resource.clone().unwrap_or_else(trivial_resource);
    let ca = coin_space(&p.alice_coins);
    let cb = coin_space(&p.bob_coins);
    check_budget((resource.atoms.len() as u128).saturating_mul(ca).saturating_mul(cb))?;
    let coin_weight = Prob::new(1.into(), (ca * cb).into());
    let ra_all = all_coins(&p.alice_coins);
    let rb_all = all_coins(&p.bob_coins);
    let mut out = Vec::new();
    for (u, v, pr) in &resource.atoms {
        let w = pr * &coin_weight;
        for ra in &ra_all {
            for rb in &rb_all {
                out.push((execute(p, x, y, u, v, ra, rb), w.clone()));
            }
        }
    }
    Ok(out)
}

fn out_label(a: &[u8], b: &[u8]) -> String {
    format!("{}|{}", render(a), render(b))
}

/// Worst case over all inputs of the three distances.
#[derive(Clone, Debug, PartialEq)]
pub struct SecurityReport {
    pub protocol: String,
    pub correctness_error: Prob,
    pub alice_distance: Prob,
    pub bob_distance: Prob,
    pub ot_calls: usize,
    pub rounds: usize,
    pub input_pairs: usize,
}

impl SecurityReport {
    pub fn is_perfect(&self) -> bool {
        self.correctness_error.is_zero() && self.alice_distance.is_zero() && self.bob_distance.is_zero()
    }
}

fn simulated(
    sim: &Simulator,
    own_input: &[u8],
    ideal: &[(Value, Value, Prob)],
    own_output: impl Fn(&Value, &Value) -> Value,
) -> Result<JointDist> {
    let coins = all_coins(&sim.coins);
    let w = Prob::new(1.into(), coin_space(&sim.coins).into());
    let mut cells = Vec::with_capacity(ideal.len() * coins.len());
    for (oa, ob, q) in ideal {
        let own = own_output(oa, ob);
        for r in &coins {
            let view = (sim.run)(own_input, &own, r);
            cells.push((view.label(), out_label(oa, ob), q * &w));
        }
    }
    JointDist::from_labels(cells)
}

/// Exact correctness error and simulator distances, maximized over the
/// program's input domains.
pub fn verify_security(p: &ProtocolProgram, sims: &Simulators) -> Result<SecurityReport> {
    let mut report = SecurityReport {
        protocol: p.name.clone(),
        correctness_error: Prob::zero(),
        alice_distance: Prob::zero(),
        bob_distance: Prob::zero(),
        ot_calls: p.calls("OT"),
        rounds: p.rounds(),
        input_pairs: 0,
    };
    for x in &p.x_domain {
        for y in &p.y_domain {
            let runs = run_exact(p, x, y)?;
            let ideal = (p.ideal)(x, y);

            let real_out = JointDist::from_labels(
                runs.iter().map(|(t, w)| (out_label(&t.out_a, &t.out_b), "*".to_string(), w.clone())),
            )?;
            let ideal_out = JointDist::from_labels(
                ideal.iter().map(|(a, b, q)| (out_label(a, b), "*".to_string(), q.clone())),
            )?;
            let corr = stat_distance(&real_out, &ideal_out);

            let real_a = JointDist::from_labels(
                runs.iter().map(|(t, w)| (t.alice.label(), out_label(&t.out_a, &t.out_b), w.clone())),
            )?;
            let sim_a = simulated(&sims.alice, x, &ideal, |oa, _| oa.clone())?;
            let da = stat_distance(&real_a, &sim_a);

            let real_b = JointDist::from_labels(
                runs.iter().map(|(t, w)| (t.bob.label(), out_label(&t.out_a, &t.out_b), w.clone())),
            )?;
            let sim_b = simulated(&sims.bob, y, &ideal, |_, ob| ob.clone())?;
            let db = stat_distance(&real_b, &sim_b);

            report.correctness_error = report.correctness_error.max(corr);
            report.alice_distance = report.alice_distance.max(da);
            report.bob_distance = report.bob_distance.max(db);
            report.input_pairs += 1;
        }
    }
    Ok(report)
}

/// Coordinates of the table built by [`transcript_table`].
pub mod coord {
    pub const X: usize = 0;
    pub const Y: usize = 1;
    pub const U: usize = 2;
    pub const V: usize = 3;
    pub const M: usize = 4;
    pub const OUT_B: usize = 5;
    pub const VIEW_A: usize = 6;
    pub const VIEW_B: usize = 7;
}

/// Joint law of inputs, resource, messages, Bob's output and both views,
/// with inputs drawn uniformly from the program's domains. See [`coord`].
pub fn transcript_table(p: &ProtocolProgram) -> Result<MultiDist> {
    let nx = p.x_domain.len() as i64;
    let ny = p.y_domain.len() as i64;
    let input_w = ratio(1, nx * ny);
    let mut labels: Vec<BTreeMap<String, usize>> = vec![BTreeMap::new(); 8];
    let mut raw: Vec<(Vec<String>, Prob)> = Vec::new();
    for x in &p.x_domain {
        for y in &p.y_domain {
            for (t, w) in run_exact(p, x, y)? {
                let m = t.messages().iter().map(|v| render(v)).collect::<Vec<_>>().join(",");
                let row = vec![
                    render(x),
                    render(y),
                    render(&t.alice.resource),
                    render(&t.bob.resource),
                    m,
                    render(&t.out_b),
                    t.alice.label(),
                    t.bob.label(),
                ];
                raw.push((row, &w * &input_w));
            }
        }
    }
    for (row, _) in &raw {
        for (c, s) in row.iter().enumerate() {
            let next = labels[c].len();
            labels[c].entry(s.clone()).or_insert(next);
        }
    }
    let alphabets = labels
        .iter()
        .map(|m| {
            let mut v: Vec<(&String, &usize)> = m.iter().collect();
            v.sort_by_key(|(_, i)| **i);
            Alphabet::from_labels(v.into_iter().map(|(s, _)| s.as_str()))
        })
        .collect::<Result<Vec<_>>>()?;
    let atoms = raw
        .into_iter()
        .map(|(row, w)| (row.iter().enumerate().map(|(c, s)| labels[c][s]).collect(), w))
        .collect();
    MultiDist::new(alphabets, atoms)
}

/// Counter-based trial generator: ChaCha8 seeded with `seed`, stream `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Outcome counts of a sampled run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampledRun {
    pub trials: u64,
    /// Trials whose outputs lie in the support of the ideal functionality.
    pub correct: u64,
    /// Counts per `out_a|out_b` label.
    pub outputs: BTreeMap<String, u64>,
}

impl SampledRun {
    fn merge(mut self, other: SampledRun) -> SampledRun {
        self.trials += other.trials;
        self.correct += other.correct;
        for (k, v) in other.outputs {
            *self.outputs.entry(k).or_default() += v;
        }
        self
    }

    pub fn error_rate(&self) -> f64 {
        1.0 - self.correct as f64 / self.trials.max(1) as f64
    }
}

/// Runs `trials` independent executions on inputs `(x, y)`.
pub fn run_sampled(p: &ProtocolProgram, x: &[u8], y: &[u8], trials: u64, seed: u64) -> Result<SampledRun> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let resource = p.resource.clone().unwrap_or_else(trivial_resource);
    let mut cumulative = Vec::with_capacity(resource.atoms.len());
    let mut acc = 0.0;
    for (_, _, pr) in &resource.atoms {
        acc += pr.to_f64().unwrap_or(0.0);
        cumulative.push(acc);
    }
    let support: Vec<String> = (p.ideal)(x, y).iter().map(|(a, b, _)| out_label(a, b)).collect();
    let draw = |radix: &[u8], rng: &mut ChaCha8Rng| -> Value {
        radix.iter().map(|&r| rng.random_range(0..r)).collect()
    };
    let run = (0..trials)
        .into_par_iter()
        .fold(SampledRun::default, |mut acc_run, i| {
            let mut rng = trial_rng(seed, i);
            let r: f64 = rng.random::<f64>() * acc;
            let k = cumulative.partition_point(|&c| c <= r).min(resource.atoms.len() - 1);
            let (u, v, _) = &resource.atoms[k];
            let ra = draw(&p.alice_coins, &mut rng);
            let rb = draw(&p.bob_coins, &mut rng);
            let t = execute(p, x, y, u, v, &ra, &rb);
            let label = out_label(&t.out_a, &t.out_b);
            acc_run.trials += 1;
            if support.contains(&label) {
                acc_run.correct += 1;
            }
            *acc_run.outputs.entry(label).or_default() += 1;
            acc_run
        })
        .reduce(SampledRun::default, SampledRun::merge);
    Ok(run)
}
