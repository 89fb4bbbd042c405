//! Desk-scale simulation of OT from commitments over EPR pairs.
//!
//! Pairs are simulated one at a time ([`PairState`]), either with a full
//! density matrix or with a classical emulation of EPR statistics; both
//! engines give identical outcome laws for every pair of bases. Adversaries
//! are restricted to per-pair strategies without cross-pair entanglement.

mod hash;
mod sampling;
mod session;
mod state;

pub use hash::{hash_extract, HashSpec};
pub use sampling::{sampling_bound, sampling_check, SamplingReport, StringFamily};
pub use session::{
    adversary_run, honest_run, run_sessions, Engine, SessionConfig, SessionOutcome, SessionStats, Strategy,
};
pub use state::{classical_pair_distribution, kron, measure_pair, projector, Basis, Mat2, Mat4, PairState, C64};

use crate::entropy::h;
use crate::error::{Error, Result};

/// Terms of the bound on how far `Z_{1-C}` is from uniform given `Z_C` and
/// Bob's system.
#[derive(Clone, Debug, PartialEq)]
pub struct SecurityBound {
    /// `2^{-((1/4 - eps/2 - h(delta))(1-alpha)m - k)/2 - 1}`.
    pub privacy_amplification: f64,
    /// `2 exp(-2 eps^2 (1-alpha) m)`.
    pub basis_mismatch: f64,
    /// `sqrt(3) exp(-alpha' kappa delta^2 / 16)` with
    /// `alpha' = (1/2 - delta) alpha`.
    pub sampling: f64,
}

impl SecurityBound {
    pub fn total(&self) -> f64 {
        self.privacy_amplification + self.basis_mismatch + self.sampling
    }

    /// A bound of 1 or more says nothing about a distance.
    pub fn is_vacuous(&self) -> bool {
        self.total() >= 1.0
    }
}

pub fn security_bound_eval(m: usize, kappa: usize, alpha: f64, k: usize, eps: f64, delta: f64) -> Result<SecurityBound> {
    if m == 0 || kappa == 0 {
        return Err(Error::Domain("m and kappa must be positive".into()));
    }
    if !(0.0..1.0).contains(&alpha) || !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Domain(format!(
            "need 0 <= alpha < 1, 0 < eps < 1, 0 < delta < 1/2 (got {alpha}, {eps}, {delta})"
        )));
    }
    let rest = (1.0 - alpha) * m as f64;
    let exponent = -0.5 * ((0.25 - eps / 2.0 - h(delta)) * rest - k as f64) - 1.0;
    let alpha_p = (0.5 - delta) * alpha;
    Ok(SecurityBound {
        privacy_amplification: exponent.exp2(),
        basis_mismatch: 2.0 * (-2.0 * eps * eps * rest).exp(),
        sampling: 3f64.sqrt() * (-alpha_p * kappa as f64 * delta * delta / 16.0).exp(),
    })
}
