//! Two-qubit density matrices and single-qubit measurements.
//!
//! Projectors are written with dyadic entries (`1/2`, `-1/2`) rather than
//! through a Hadamard gate, so for the states used here every probability is
//! computed exactly in `f64`.

use nalgebra::{Complex, Matrix2, Matrix4};
use num_rational::BigRational;
use rand::Rng;

use crate::dist::ratio;
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

/// Measurement basis: computational (`+`) or Hadamard (`x`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Computational,
    Hadamard,
}

impl Basis {
    pub fn from_bit(b: u8) -> Basis {
        if b == 0 {
            Basis::Computational
        } else {
            Basis::Hadamard
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Basis::Computational => 0,
            Basis::Hadamard => 1,
        }
    }
}

fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Projector onto outcome `bit` of `basis`.
pub fn projector(basis: Basis, bit: u8) -> Mat2 {
    match (basis, bit) {
        (Basis::Computational, 0) => Mat2::new(c(1.0), c(0.0), c(0.0), c(0.0)),
        (Basis::Computational, _) => Mat2::new(c(0.0), c(0.0), c(0.0), c(1.0)),
        (Basis::Hadamard, 0) => Mat2::new(c(0.5), c(0.5), c(0.5), c(0.5)),
        (Basis::Hadamard, _) => Mat2::new(c(0.5), c(-0.5), c(-0.5), c(0.5)),
    }
}

/// Kronecker product `a (x) b`; `a` acts on Alice's qubit.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// State of one EPR pair shared between Alice (first qubit) and Bob.
#[derive(Clone, Debug, PartialEq)]
pub struct PairState {
    rho: Mat4,
}

impl PairState {
    /// `(|00> + |11>) / sqrt 2`.
    pub fn epr() -> PairState {
        let mut rho = Mat4::zeros();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            rho[(i, j)] = c(0.5);
        }
        PairState { rho }
    }

    /// `a (x) b` for single-qubit states `a` (Alice) and `b` (Bob).
    pub fn product(a: &Mat2, b: &Mat2) -> Result<PairState> {
        PairState::from_matrix(kron(a, b))
    }

    pub fn from_matrix(rho: Mat4) -> Result<PairState> {
        let s = PairState { rho };
        s.check(1e-9)?;
        Ok(s)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.rho
    }

    /// Hermitian, unit trace, positive semidefinite within `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        if (self.rho - self.rho.adjoint()).norm() > tol {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        if (self.rho.trace() - c(1.0)).norm() > tol {
            return Err(Error::InvalidState("density matrix trace is not 1".into()));
        }
        let eig = self.rho.symmetric_eigenvalues();
        if eig.iter().any(|&e| e < -tol) {
            return Err(Error::InvalidState("density matrix is not positive".into()));
        }
        Ok(())
    }

    fn prob(&self, op: &Mat4) -> f64 {
        (op * self.rho).trace().re
    }

    /// `Pr[a, b]` when Alice measures in `alice` and Bob in `bob`.
    pub fn outcome_distribution(&self, alice: Basis, bob: Basis) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for (a, row) in out.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                *cell = self.prob(&kron(&projector(alice, a as u8), &projector(bob, b as u8)));
            }
        }
        out
    }

    fn measure(&self, op0: Mat4, op1: Mat4, rng: &mut impl Rng) -> (u8, PairState) {
        let p0 = self.prob(&op0);
        let (bit, op, p) = if rng.random::<f64>() < p0 { (0, op0, p0) } else { (1, op1, 1.0 - p0) };
        let rho = op * self.rho * op / c(p);
        (bit, PairState { rho })
    }

    pub fn measure_alice(&self, basis: Basis, rng: &mut impl Rng) -> (u8, PairState) {
        let id = Mat2::identity();
        self.measure(kron(&projector(basis, 0), &id), kron(&projector(basis, 1), &id), rng)
    }

    pub fn measure_bob(&self, basis: Basis, rng: &mut impl Rng) -> (u8, PairState) {
        let id = Mat2::identity();
        self.measure(kron(&id, &projector(basis, 0)), kron(&id, &projector(basis, 1)), rng)
    }
}

/// Measures both halves; the two measurements commute.
pub fn measure_pair(s: &PairState, alice: Basis, bob: Basis, rng: &mut impl Rng) -> (u8, u8, PairState) {
    let (a, s1) = s.measure_alice(alice, rng);
    let (b, s2) = s1.measure_bob(bob, rng);
    (a, b, s2)
}

/// Outcome law of an EPR pair without any matrix arithmetic: equal bases
/// give equal uniform bits, different bases independent uniform bits.
pub fn classical_pair_distribution(alice: Basis, bob: Basis) -> [[BigRational; 2]; 2] {
    if alice == bob {
        [[ratio(1, 2), ratio(0, 1)], [ratio(0, 1), ratio(1, 2)]]
    } else {
        [[ratio(1, 4), ratio(1, 4)], [ratio(1, 4), ratio(1, 4)]]
    }
}
