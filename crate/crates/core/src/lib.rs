//! Exact information-theoretic analysis of two-party primitives.
//!
//! The crate measures how much oblivious transfer (OT) and related
//! primitives can be obtained from a given correlated resource `P_UV`:
//!
//! - [`dist`]: exact rational joint tables and their algebra;
//! - [`entropy`]: Shannon, min- and smooth entropies with event witnesses;
//! - [`structure`]: common part and sufficient statistics;
//! - [`primitives`]: resource tables and function tables (OT, Rabin, OLFE,
//!   EQ, IP, leaky OT);
//! - [`bounds`]: closed-form impossibility bounds evaluated against
//!   measured entropies;
//! - [`protocol`]: exact and sampled simulation of semi-honest protocols,
//!   with simulator-distance checks;
//! - [`quantum`]: EPR-pair OT-from-commitment sessions with a
//!   density-matrix engine and a classical fast path.

pub mod bounds;
pub mod dist;
pub mod entropy;
pub mod error;
pub mod primitives;
pub mod protocol;
pub mod quantum;
pub mod structure;

pub use dist::{Alphabet, Dist, EventWeights, JointDist, MultiDist, Prob, SubDist, Symbol};
pub use error::{Error, Result};
