//! Empirical check of the block-sampling estimate used by Alice's test.
//!
//! A string `y` of `b * kappa` bits is split into `kappa` blocks. A random
//! set of `alpha * kappa` blocks forms `T`; each position of `T` enters `T'`
//! independently with probability 1/2. A trial fails when the average of
//! `y` over `T'` is at most the average over the unopened positions minus
//! `delta`. An empty `T'` counts as a failure.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::protocol::trial_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StringFamily {
    AllZeros,
    AllOnes,
    /// Alternating bits.
    HalfDense,
    /// The first half of the blocks all ones, the rest zeros.
    BlockConcentrated,
    /// Uniform bits drawn from the run's seed.
    Random,
}

impl StringFamily {
    pub const ADVERSARIAL: [StringFamily; 4] =
        [StringFamily::AllOnes, StringFamily::HalfDense, StringFamily::BlockConcentrated, StringFamily::Random];

    pub fn name(self) -> &'static str {
        match self {
            StringFamily::AllZeros => "all-zeros",
            StringFamily::AllOnes => "all-ones",
            StringFamily::HalfDense => "half-dense",
            StringFamily::BlockConcentrated => "block-concentrated",
            StringFamily::Random => "random",
        }
    }

    pub fn string(self, b: usize, kappa: usize, seed: u64) -> Vec<u8> {
        let m = b * kappa;
        match self {
            StringFamily::AllZeros => vec![0; m],
            StringFamily::AllOnes => vec![1; m],
            StringFamily::HalfDense => (0..m).map(|i| (i % 2) as u8).collect(),
            StringFamily::BlockConcentrated => (0..m).map(|i| u8::from(i / b < kappa / 2)).collect(),
            StringFamily::Random => {
                let mut rng = trial_rng(seed, u64::MAX);
                (0..m).map(|_| rng.random_range(0..2)).collect()
            }
        }
    }
}

/// `3 exp(-(1/2 - delta) alpha kappa delta^2 / 8)`.
pub fn sampling_bound(kappa: usize, alpha: f64, delta: f64) -> f64 {
    3.0 * (-(0.5 - delta) * alpha * kappa as f64 * delta * delta / 8.0).exp()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingReport {
    pub family: StringFamily,
    pub trials: u64,
    pub failures: u64,
    pub bound: f64,
}

impl SamplingReport {
    pub fn rate(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }

    pub fn within_bound(&self) -> bool {
        self.rate() <= self.bound
    }
}

pub fn sampling_check(
    b: usize,
    kappa: usize,
    alpha: f64,
    delta: f64,
    family: StringFamily,
    trials: u64,
    seed: u64,
) -> Result<SamplingReport> {
    let opened = alpha * kappa as f64;
    if b == 0 || kappa == 0 || trials == 0 {
        return Err(Error::InvalidParameter("b, kappa and trials must be positive".into()));
    }
    if !(0.0..=0.5).contains(&alpha) || opened.fract() != 0.0 || opened == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} must lie in (0, 1/2] with alpha * kappa integral"
        )));
    }
    if delta <= 0.0 {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let y = family.string(b, kappa, seed);
    let opened = opened as usize;
    let rest = (kappa - opened) * b;
    let total: u64 = y.iter().map(|&v| v as u64).sum();
    let failures = (0..trials)
        .filter(|&i| {
            let mut rng = trial_rng(seed, i);
            let mut sub_n = 0u64;
            let mut sub_ones = 0u64;
            let mut t_ones = 0u64;
            for blk in sample(&mut rng, kappa, opened).into_iter() {
                for &v in &y[blk * b..(blk + 1) * b] {
                    t_ones += v as u64;
                    if rng.random::<bool>() {
                        sub_n += 1;
                        sub_ones += v as u64;
                    }
                }
            }
            if sub_n == 0 {
                return true;
            }
            let sub_avg = sub_ones as f64 / sub_n as f64;
            let rest_avg = (total - t_ones) as f64 / rest as f64;
            sub_avg <= rest_avg - delta
        })
        .count() as u64;
    Ok(SamplingReport { family, trials, failures, bound: sampling_bound(kappa, alpha, delta) })
}
