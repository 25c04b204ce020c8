//! One- and two-qubit density matrices, projective measurements, conditional
//! states, probabilities, correlation matrices, Bloch-vector conversions and
//! the named state families used throughout.
//!
//! Convention, fixed project-wide: the first tensor factor is Alice's
//! subsystem, basis order |00>, |01>, |10>, |11>; outcome `a` carries the
//! measurement eigenvalue `(-1)^a`.

use num_complex::Complex;

use crate::error::Error;
use crate::matrix::{
    norm3, pauli, tensor, ComplexMatrix, PauliAxis, RealMatrix3, HERMITICITY_TOL,
};
use crate::scalar::Real;

/// Tolerance on `|trace - 1|` for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues above this (negative) floor count as nonnegative.
pub const PSD_TOL: f64 = 1e-10;

/// A measurement outcome, 0 or 1; eigenvalue `(-1)^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Zero, Outcome::One];

    pub fn sign<T: Real>(self) -> T {
        match self {
            Outcome::Zero => T::one(),
            Outcome::One => -T::one(),
        }
    }
}

/// Unit vector on the Bloch sphere selecting a projective measurement.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MeasurementDirection<T> {
    n: [T; 3],
}

impl<T: Real> MeasurementDirection<T> {
    /// Normalizes the given vector; rejects the zero vector.
    pub fn new(v: [T; 3]) -> Result<Self, Error> {
        let norm = norm3(v);
        if !norm.is_finite() || norm <= T::zero() {
            return Err(Error::ZeroDirection);
        }
        Ok(MeasurementDirection {
            n: [v[0] / norm, v[1] / norm, v[2] / norm],
        })
    }

    pub fn x() -> Self {
        MeasurementDirection {
            n: [T::one(), T::zero(), T::zero()],
        }
    }

    pub fn y() -> Self {
        MeasurementDirection {
            n: [T::zero(), T::one(), T::zero()],
        }
    }

    pub fn z() -> Self {
        MeasurementDirection {
            n: [T::zero(), T::zero(), T::one()],
        }
    }

    pub fn components(&self) -> [T; 3] {
        self.n
    }
}

/// Bloch 3-vector of a qubit state; valid iff its norm is at most 1.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BlochVector<T> {
    pub r: [T; 3],
}

impl<T: Real> BlochVector<T> {
    pub fn new(r: [T; 3]) -> Result<Self, Error> {
        let norm = norm3(r);
        if norm > T::one() + T::c(PSD_TOL) {
            return Err(Error::BlochNormExceeded {
                norm: norm.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(BlochVector { r })
    }

    pub fn norm(&self) -> T {
        norm3(self.r)
    }
}

fn check_density<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, Error> {
    let defect = m.hermiticity_defect();
    if defect > T::c(HERMITICITY_TOL) {
        return Err(Error::InvalidDensityMatrix {
            invariant: "Hermitian",
            detail: format!("max |m - m^dagger| = {:e}", defect.to_f64().unwrap()),
        });
    }
    let m = m.symmetrized();
    let tr = m.trace().re;
    if (tr - T::one()).abs() > T::c(TRACE_TOL) {
        return Err(Error::InvalidDensityMatrix {
            invariant: "unit trace",
            detail: format!("trace = {}", tr),
        });
    }
    let min = m.min_eigenvalue()?;
    if min < -T::c(PSD_TOL) {
        return Err(Error::InvalidDensityMatrix {
            invariant: "positive semidefinite",
            detail: format!("min eigenvalue = {}", min),
        });
    }
    Ok(m)
}

/// A validated 4x4 two-qubit density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> TwoQubitState<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self, Error> {
        if matrix.dim() != 4 {
            return Err(Error::Format(format!(
                "expected a 4x4 matrix, got {0}x{0}",
                matrix.dim()
            )));
        }
        Ok(TwoQubitState {
            matrix: check_density(&matrix)?,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }
}

/// A validated 2x2 qubit density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitState<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> QubitState<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self, Error> {
        if matrix.dim() != 2 {
            return Err(Error::Format(format!(
                "expected a 2x2 matrix, got {0}x{0}",
                matrix.dim()
            )));
        }
        Ok(QubitState {
            matrix: check_density(&matrix)?,
        })
    }

    pub fn maximally_mixed() -> Self {
        QubitState {
            matrix: ComplexMatrix::identity(2).scale_real(T::c(0.5)),
        }
    }

    /// |0><0|
    pub fn ket0() -> Self {
        QubitState {
            matrix: ComplexMatrix::from_real_row_major(2, &[T::one(), T::zero(), T::zero(), T::zero()]),
        }
    }

    /// |1><1|
    pub fn ket1() -> Self {
        QubitState {
            matrix: ComplexMatrix::from_real_row_major(2, &[T::zero(), T::zero(), T::zero(), T::one()]),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }
}

/// `(I + (-1)^a n.sigma) / 2`: rank-1 projector onto the outcome-`a`
/// eigenspace of the measurement along `n`.
pub fn projector<T: Real>(n: &MeasurementDirection<T>, a: Outcome) -> ComplexMatrix<T> {
    let [nx, ny, nz] = n.components();
    let sign: T = a.sign();
    let half = T::c(0.5);
    let mut m = ComplexMatrix::identity(2);
    let terms = [
        (PauliAxis::X, nx),
        (PauliAxis::Y, ny),
        (PauliAxis::Z, nz),
    ];
    for (axis, comp) in terms {
        let p = pauli::<T>(axis).scale_real(sign * comp);
        m = &m + &p;
    }
    m.scale_real(half)
}

fn ptrace_b_raw<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut out = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..2 {
                acc = acc + m.get(2 * i + k, 2 * j + k);
            }
            out.set(i, j, acc);
        }
    }
    out
}

fn ptrace_a_raw<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut out = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..2 {
                acc = acc + m.get(2 * k + i, 2 * k + j);
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// Reduced state on Alice's side.
pub fn partial_trace_b<T: Real>(rho: &TwoQubitState<T>) -> QubitState<T> {
    QubitState::new(ptrace_b_raw(rho.matrix())).expect("partial trace preserves density invariants")
}

/// Reduced state on Bob's side.
pub fn partial_trace_a<T: Real>(rho: &TwoQubitState<T>) -> QubitState<T> {
    QubitState::new(ptrace_a_raw(rho.matrix())).expect("partial trace preserves density invariants")
}

/// Bob's unnormalized conditional state `tr_A[(Pi^n_a (x) I) rho]`; its trace
/// is Alice's marginal probability for outcome `a`.
pub fn conditional_state<T: Real>(
    rho: &TwoQubitState<T>,
    n: &MeasurementDirection<T>,
    a: Outcome,
) -> ComplexMatrix<T> {
    let proj = tensor(&projector(n, a), &ComplexMatrix::identity(2));
    ptrace_a_raw(&(&proj * rho.matrix()))
}

fn clamp_probability<T: Real>(p: T) -> T {
    let tol = T::c(PSD_TOL);
    assert!(
        p >= -tol && p <= T::one() + tol,
        "probability {} outside [0,1] beyond tolerance",
        p
    );
    p.max(T::zero()).min(T::one())
}

/// `tr[(Pi^nA_a (x) Pi^nB_b) tau]`, clamped to [0,1].
pub fn joint_probability<T: Real>(
    tau: &TwoQubitState<T>,
    n_a: &MeasurementDirection<T>,
    a: Outcome,
    n_b: &MeasurementDirection<T>,
    b: Outcome,
) -> T {
    let op = tensor(&projector(n_a, a), &projector(n_b, b));
    clamp_probability((&op * tau.matrix()).trace().re)
}

/// Alice's marginal `tr[Pi^nA_a tau_A]`.
pub fn marginal_probability<T: Real>(
    tau: &TwoQubitState<T>,
    n_a: &MeasurementDirection<T>,
    a: Outcome,
) -> T {
    let tau_a = partial_trace_b(tau);
    clamp_probability((&projector(n_a, a) * tau_a.matrix()).trace().re)
}

/// Pauli correlation matrix `T_ij = tr[rho sigma_i (x) sigma_j]`.
pub fn correlation_matrix<T: Real>(rho: &TwoQubitState<T>) -> RealMatrix3<T> {
    let axes = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
    let mut t = RealMatrix3::zeros();
    for (i, &ai) in axes.iter().enumerate() {
        for (j, &aj) in axes.iter().enumerate() {
            let op = tensor(&pauli(ai), &pauli(aj));
            let v = (&op * rho.matrix()).trace().re;
            t.m[i][j] = v.max(-T::one()).min(T::one());
        }
    }
    t
}

/// `(I + r.sigma) / 2`.
pub fn bloch_to_state<T: Real>(r: &BlochVector<T>) -> QubitState<T> {
    let half = T::c(0.5);
    let mut m = ComplexMatrix::identity(2);
    let terms = [
        (PauliAxis::X, r.r[0]),
        (PauliAxis::Y, r.r[1]),
        (PauliAxis::Z, r.r[2]),
    ];
    for (axis, comp) in terms {
        m = &m + &pauli::<T>(axis).scale_real(comp);
    }
    QubitState {
        matrix: m.scale_real(half),
    }
}

pub fn state_to_bloch<T: Real>(rho: &QubitState<T>) -> BlochVector<T> {
    let axes = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
    let mut r = [T::zero(); 3];
    for (i, &axis) in axes.iter().enumerate() {
        r[i] = (&pauli(axis) * rho.matrix()).trace().re;
    }
    BlochVector { r }
}

/// `|Psi><Psi|` with `|Psi> = (|00> + |11>)/sqrt(2)`.
pub fn bell_state<T: Real>() -> TwoQubitState<T> {
    let h = T::c(0.5);
    let z = T::zero();
    let entries = [
        h, z, z, h, //
        z, z, z, z, //
        z, z, z, z, //
        h, z, z, h,
    ];
    TwoQubitState {
        matrix: ComplexMatrix::from_real_row_major(4, &entries),
    }
}

/// `w |Psi><Psi| + (1 - w) I/4`.
pub fn werner<T: Real>(w: T) -> Result<TwoQubitState<T>, Error> {
    if !(T::zero()..=T::one()).contains(&w) {
        return Err(Error::ParameterOutOfRange {
            name: "w",
            value: w.to_f64().unwrap_or(f64::NAN),
            range: "[0, 1]",
        });
    }
    let noise = ComplexMatrix::identity(4).scale_real((T::one() - w) * T::c(0.25));
    let m = &bell_state::<T>().matrix().scale_real(w) + &noise;
    Ok(TwoQubitState { matrix: m })
}

pub fn product_state<T: Real>(rho_a: &QubitState<T>, rho_b: &QubitState<T>) -> TwoQubitState<T> {
    TwoQubitState {
        matrix: tensor(rho_a.matrix(), rho_b.matrix()),
    }
}
