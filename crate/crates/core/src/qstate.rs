//! Dense density matrices over one to four qubits.
//!
//! Qubits are addressed by [`Role`] rather than by index, so removing a
//! measured qubit never forces callers to renumber the rest. The first role
//! in a state is the most significant bit of the basis index.

use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;

pub const MAX_QUBITS: usize = 4;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Which physical qubit a tensor factor describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    /// Optically active broker at node 1.
    B1,
    /// Optically active broker at node 2.
    B2,
    /// Long-lived client at node 1.
    C1,
    /// Long-lived client at node 2.
    C2,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::B1 => "B1",
            Role::B2 => "B2",
            Role::C1 => "C1",
            Role::C2 => "C2",
        };
        f.write_str(s)
    }
}

/// Result of a single-qubit X-basis measurement. `Plus` is recorded as bit 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum XOutcome {
    Plus,
    Minus,
}

impl XOutcome {
    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 0 {
            XOutcome::Plus
        } else {
            XOutcome::Minus
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            XOutcome::Plus => 0,
            XOutcome::Minus => 1,
        }
    }

    /// Eigenvalue of X for this outcome, `(-1)^bit`.
    pub fn sign(self) -> f64 {
        match self {
            XOutcome::Plus => 1.0,
            XOutcome::Minus => -1.0,
        }
    }
}

/// A (possibly unnormalized) density operator on a labelled register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    roles: Vec<Role>,
    elements: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(roles: Vec<Role>, elements: DMatrix<C64>) -> Result<Self> {
        check_roles(&roles)?;
        let dim = 1usize << roles.len();
        if elements.nrows() != dim || elements.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: elements.nrows().max(elements.ncols()),
            });
        }
        Ok(Self { roles, elements })
    }

    /// `|ψ⟩⟨ψ|` for the given amplitudes; the vector is used as given, not normalized.
    pub fn from_pure(roles: Vec<Role>, amplitudes: &[C64]) -> Result<Self> {
        check_roles(&roles)?;
        let dim = 1usize << roles.len();
        if amplitudes.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let elements = DMatrix::from_fn(dim, dim, |r, c| amplitudes[r] * amplitudes[c].conj());
        Ok(Self { roles, elements })
    }

    /// Projector onto a computational basis state.
    pub fn basis(roles: Vec<Role>, index: usize) -> Result<Self> {
        check_roles(&roles)?;
        let dim = 1usize << roles.len();
        if index >= dim {
            return Err(Error::Dimension {
                expected: dim,
                got: index + 1,
            });
        }
        let mut elements = DMatrix::zeros(dim, dim);
        elements[(index, index)] = ONE;
        Ok(Self { roles, elements })
    }

    /// `|+⟩⊗…⊗|+⟩` on the given roles.
    pub fn all_plus(roles: Vec<Role>) -> Result<Self> {
        check_roles(&roles)?;
        let dim = 1usize << roles.len();
        let v = 1.0 / dim as f64;
        Self::new(roles, DMatrix::from_element(dim, dim, C64::new(v, 0.0)))
    }

    /// `(|01⟩ + |10⟩)/√2` on two roles.
    pub fn psi_plus(a: Role, b: Role) -> Result<Self> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_pure(
            vec![a, b],
            &[ZERO, C64::new(h, 0.0), C64::new(h, 0.0), ZERO],
        )
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn n_qubits(&self) -> usize {
        self.roles.len()
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn into_elements(self) -> DMatrix<C64> {
        self.elements
    }

    pub fn position(&self, role: Role) -> Result<usize> {
        self.roles
            .iter()
            .position(|&r| r == role)
            .ok_or(Error::UnknownRole(role))
    }

    pub fn trace(&self) -> f64 {
        self.elements.trace().re
    }

    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= tolerances::VANISHING_TRACE {
            return Err(Error::VanishingTrace(tr));
        }
        Ok(self.scaled(1.0 / tr))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            roles: self.roles.clone(),
            elements: &self.elements * C64::new(factor, 0.0),
        }
    }

    /// Sum of two operators on the same register (used for convex mixtures).
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.roles != other.roles {
            return Err(Error::RoleMismatch);
        }
        Ok(Self {
            roles: self.roles.clone(),
            elements: &self.elements + &other.elements,
        })
    }

    /// `self ⊗ other`, with `self`'s roles first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut roles = self.roles.clone();
        roles.extend_from_slice(&other.roles);
        check_roles(&roles)?;
        Ok(Self {
            roles,
            elements: self.elements.kronecker(&other.elements),
        })
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.elements - self.elements.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.elements + self.elements.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Hermitian and positive semidefinite within the shared tolerances.
    pub fn is_physical(&self) -> bool {
        self.hermiticity_error() <= tolerances::ALGEBRAIC
            && self.min_eigenvalue() >= -tolerances::EIGENVALUE
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.roles != other.roles {
            return f64::INFINITY;
        }
        (&self.elements - &other.elements)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn bit(&self, index: usize, position: usize) -> usize {
        (index >> (self.n_qubits() - 1 - position)) & 1
    }
}

fn check_roles(roles: &[Role]) -> Result<()> {
    if roles.is_empty() || roles.len() > MAX_QUBITS {
        return Err(Error::QubitCount(roles.len()));
    }
    for (i, r) in roles.iter().enumerate() {
        if roles[..i].contains(r) {
            return Err(Error::DuplicateRole(*r));
        }
    }
    Ok(())
}

/// A 2×2 operator together with a verified unitarity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitOperator {
    matrix: Matrix2<C64>,
    unitary: bool,
}

impl SingleQubitOperator {
    pub fn new(matrix: Matrix2<C64>) -> Self {
        let gram = matrix.adjoint() * matrix;
        let unitary = (gram - Matrix2::identity())
            .iter()
            .all(|z| z.norm() <= tolerances::ALGEBRAIC);
        Self { matrix, unitary }
    }

    pub fn identity() -> Self {
        Self::new(Matrix2::identity())
    }

    pub fn pauli_x() -> Self {
        Self::new(Matrix2::new(ZERO, ONE, ONE, ZERO))
    }

    pub fn pauli_y() -> Self {
        let i = C64::i();
        Self::new(Matrix2::new(ZERO, -i, i, ZERO))
    }

    pub fn pauli_z() -> Self {
        Self::new(Matrix2::new(ONE, ZERO, ZERO, -ONE))
    }

    /// Asymmetry operator `[cos φ + sin φ Z][cos Δ + i sin Δ Z]`.
    ///
    /// Diagonal, with entries `(cos φ + sin φ) e^{iΔ}` and `(cos φ − sin φ) e^{−iΔ}`.
    /// Its adjoint is `zasym(phi, -delta)` and `zasym(φ,Δ)·zasym(−φ,−Δ) = cos 2φ · 1`.
    pub fn zasym(phi: f64, delta: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let e = C64::from_polar(1.0, delta);
        Self::new(Matrix2::new(e * (c + s), ZERO, ZERO, e.conj() * (c - s)))
    }

    /// The same asymmetry operator written in the X basis.
    pub fn xasym(phi: f64, delta: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let (sd, cd) = delta.sin_cos();
        let x = Self::pauli_x().matrix;
        let id = Matrix2::<C64>::identity();
        let amp = id * C64::new(c, 0.0) + x * C64::new(s, 0.0);
        let phase = id * C64::new(cd, 0.0) + x * C64::new(0.0, sd);
        Self::new(amp * phase)
    }

    /// The broker rotation `(1 + iY)/√2`, mapping `|1⟩ → |+⟩` and `|0⟩ → |−⟩`.
    pub fn broker_rotation() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(Matrix2::new(h, h, -h, h))
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.matrix
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.matrix.adjoint())
    }

    /// `self · other` (apply `other` first).
    pub fn then_after(&self, other: &Self) -> Self {
        Self::new(self.matrix * other.matrix)
    }
}

fn embed(op: &SingleQubitOperator, position: usize, n_qubits: usize) -> DMatrix<C64> {
    let mut full = DMatrix::<C64>::identity(1, 1);
    for p in 0..n_qubits {
        let factor = if p == position {
            DMatrix::from_iterator(2, 2, op.matrix.iter().copied())
        } else {
            DMatrix::identity(2, 2)
        };
        full = full.kronecker(&factor);
    }
    full
}

/// `(O ⊗ 1) ρ (O ⊗ 1)†` on the target role, optionally renormalized.
pub fn apply_one_qubit(
    rho: &DensityMatrix,
    op: &SingleQubitOperator,
    target: Role,
    normalize: bool,
) -> Result<DensityMatrix> {
    let pos = rho.position(target)?;
    let full = embed(op, pos, rho.n_qubits());
    let out = DensityMatrix {
        roles: rho.roles.clone(),
        elements: &full * &rho.elements * full.adjoint(),
    };
    if normalize {
        out.normalized()
    } else {
        Ok(out)
    }
}

/// Conjugation by the controlled-Z gate between two roles.
pub fn apply_cz(rho: &DensityMatrix, a: Role, b: Role) -> Result<DensityMatrix> {
    if a == b {
        return Err(Error::DuplicateRole(a));
    }
    let pa = rho.position(a)?;
    let pb = rho.position(b)?;
    let sign = |k: usize| {
        if rho.bit(k, pa) & rho.bit(k, pb) == 1 {
            -1.0
        } else {
            1.0
        }
    };
    let mut elements = rho.elements.clone();
    for r in 0..rho.dim() {
        for c in 0..rho.dim() {
            elements[(r, c)] *= sign(r) * sign(c);
        }
    }
    Ok(DensityMatrix {
        roles: rho.roles.clone(),
        elements,
    })
}

/// Unnormalized `⟨±|ρ|±⟩` on the target, which is removed from the register.
///
/// The trace of the result is the outcome probability times `tr ρ`.
pub fn project_x(rho: &DensityMatrix, target: Role, outcome: XOutcome) -> Result<DensityMatrix> {
    let pos = rho.position(target)?;
    let n = rho.n_qubits();
    if n == 1 {
        return Err(Error::QubitCount(0));
    }
    let roles: Vec<Role> = rho.roles.iter().copied().filter(|&r| r != target).collect();
    let low_bits = n - 1 - pos;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = DMatrix::<C64>::zeros(1 << (n - 1), rho.dim());
    for full in 0..rho.dim() {
        let b = (full >> low_bits) & 1;
        let high = full >> (low_bits + 1);
        let low = full & ((1 << low_bits) - 1);
        let rest = (high << low_bits) | low;
        let amp = if b == 0 { h } else { h * outcome.sign() };
        k[(rest, full)] = C64::new(amp, 0.0);
    }
    Ok(DensityMatrix {
        roles,
        elements: &k * &rho.elements * k.adjoint(),
    })
}

/// Outcome of an X-basis measurement with the measured qubit traced out.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub outcome: XOutcome,
    pub probability: f64,
    pub post_state: DensityMatrix,
}

/// Forced-outcome X measurement. `probability` is `tr⟨±|ρ|±⟩`; the post-state is renormalized.
pub fn measure_x(rho: &DensityMatrix, target: Role, outcome: XOutcome) -> Result<Measurement> {
    let projected = project_x(rho, target, outcome)?;
    let probability = projected.trace();
    if probability < tolerances::VANISHING_TRACE {
        return Err(Error::VanishingTrace(probability));
    }
    Ok(Measurement {
        outcome,
        probability,
        post_state: projected.scaled(1.0 / probability),
    })
}

/// X measurement with the outcome drawn from `rng`.
pub fn measure_x_sampled<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    target: Role,
    rng: &mut R,
) -> Result<Measurement> {
    let plus = project_x(rho, target, XOutcome::Plus)?;
    let p_plus = plus.trace() / rho.trace();
    let u: f64 = rng.random();
    if u < p_plus {
        measure_x(rho, target, XOutcome::Plus)
    } else {
        measure_x(rho, target, XOutcome::Minus)
    }
}

/// `⟨ψ|ρ|ψ⟩ / tr ρ` for a rank-one reference `|ψ⟩⟨ψ|` (any positive scale).
pub fn fidelity(rho: &DensityMatrix, pure: &DensityMatrix) -> Result<f64> {
    if rho.roles != pure.roles {
        return Err(Error::RoleMismatch);
    }
    let pure_trace = pure.trace();
    if pure_trace <= tolerances::VANISHING_TRACE {
        return Err(Error::VanishingTrace(pure_trace));
    }
    let largest = *pure.eigenvalues().last().expect("non-empty spectrum");
    let fraction = largest / pure_trace;
    if fraction < 1.0 - tolerances::EIGENVALUE {
        return Err(Error::NotPure(fraction));
    }
    let tr = rho.trace();
    if tr <= tolerances::VANISHING_TRACE {
        return Err(Error::VanishingTrace(tr));
    }
    let overlap = (&rho.elements * &pure.elements).trace().re;
    Ok(overlap / (tr * pure_trace))
}
