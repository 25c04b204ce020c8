//! Dense complex matrices at the two sizes the problem needs (2x2 and 4x4),
//! real 3x3 matrices for correlation data, and the eigen/singular
//! decompositions built on cyclic Jacobi rotations.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::Error;
use crate::scalar::Real;

/// Absolute tolerance on `max |m - m^dagger|` below which a matrix is
/// accepted as Hermitian and symmetrized before decomposition.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// One of the three Pauli axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// Row-major dense complex matrix, dimension 2 or 4.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "only 2x2 and 4x4 matrices supported");
        ComplexMatrix {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex::new(T::one(), T::zero()));
        }
        m
    }

    /// Build from a row-major slice of entries; length must be `dim * dim`.
    pub fn from_row_major(dim: usize, entries: &[Complex<T>]) -> Self {
        assert!(dim == 2 || dim == 4);
        assert_eq!(entries.len(), dim * dim);
        ComplexMatrix {
            dim,
            data: entries.to_vec(),
        }
    }

    /// Build from real row-major entries (imaginary parts zero).
    pub fn from_real_row_major(dim: usize, entries: &[T]) -> Self {
        let data: Vec<Complex<T>> = entries
            .iter()
            .map(|&r| Complex::new(r, T::zero()))
            .collect();
        Self::from_row_major(dim, &data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        let mut t = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            t = t + self.get(i, i);
        }
        t
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let data = self.data.iter().map(|&v| v * s).collect();
        ComplexMatrix {
            dim: self.dim,
            data,
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// Largest entrywise absolute difference against `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Max deviation from Hermiticity, `max_ij |m_ij - conj(m_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(m + m^dagger) / 2`.
    pub fn symmetrized(&self) -> Self {
        let adj = self.adjoint();
        let half = T::c(0.5);
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, (self.get(i, j) + adj.get(i, j)).scale(half));
            }
        }
        out
    }

    /// Eigenvalues of a Hermitian matrix, sorted descending.
    ///
    /// The input is symmetrized first; rejects matrices whose Hermiticity
    /// defect exceeds [`HERMITICITY_TOL`].
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<T>, Error> {
        let defect = self.hermiticity_defect();
        if defect > T::c(HERMITICITY_TOL) {
            return Err(Error::NotHermitian {
                defect: defect.to_f64().unwrap_or(f64::NAN),
            });
        }
        let h = self.symmetrized();
        // Embed the d x d Hermitian H = A + iB into the real symmetric
        // 2d x 2d matrix [[A, -B], [B, A]]; its spectrum is that of H with
        // every eigenvalue doubled.
        let d = self.dim;
        let n = 2 * d;
        let mut m = vec![T::zero(); n * n];
        for i in 0..d {
            for j in 0..d {
                let v = h.get(i, j);
                m[i * n + j] = v.re;
                m[(i + d) * n + (j + d)] = v.re;
                m[i * n + (j + d)] = -v.im;
                m[(i + d) * n + j] = v.im;
            }
        }
        let (mut evals, _) = jacobi_symmetric(&mut m, n);
        evals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // Doubled spectrum: keep one of each pair.
        Ok(evals.into_iter().step_by(2).collect())
    }

    pub fn min_eigenvalue(&self) -> Result<T, Error> {
        let evals = self.hermitian_eigenvalues()?;
        Ok(*evals.last().unwrap())
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(&a, &b)| a + b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            data,
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(&a, &b)| a - b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            data,
        }
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..d {
                    acc = acc + self.get(i, k) * rhs.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// The standard Pauli matrix for an axis.
pub fn pauli<T: Real>(axis: PauliAxis) -> ComplexMatrix<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let entries = match axis {
        PauliAxis::X => [zero, one, one, zero],
        PauliAxis::Y => [zero, -i, i, zero],
        PauliAxis::Z => [one, zero, zero, -one],
    };
    ComplexMatrix::from_row_major(2, &entries)
}

/// Kronecker product of two 2x2 matrices; the first factor is Alice's
/// subsystem, basis order |00>, |01>, |10>, |11>.
pub fn tensor<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    assert_eq!(a.dim(), 2);
    assert_eq!(b.dim(), 2);
    let mut out = ComplexMatrix::zeros(4);
    for ia in 0..2 {
        for ja in 0..2 {
            for ib in 0..2 {
                for jb in 0..2 {
                    out.set(2 * ia + ib, 2 * ja + jb, a.get(ia, ja) * b.get(ib, jb));
                }
            }
        }
    }
    out
}

/// Real 3x3 matrix, row-major. Carrier for the Pauli correlation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealMatrix3<T> {
    pub m: [[T; 3]; 3],
}

/// Singular value decomposition of a 3x3 real matrix: `t = u diag(s) v^T`
/// with `s` descending and the columns of `u`, `v` orthonormal.
#[derive(Clone, Copy, Debug)]
pub struct Svd3<T> {
    pub s: [T; 3],
    /// Left singular vectors, one per singular value.
    pub u: [[T; 3]; 3],
    /// Right singular vectors, one per singular value.
    pub v: [[T; 3]; 3],
}

impl<T: Real> RealMatrix3<T> {
    pub fn zeros() -> Self {
        RealMatrix3 {
            m: [[T::zero(); 3]; 3],
        }
    }

    pub fn from_diag(d: [T; 3]) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            out.m[i][i] = d[i];
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[j][i];
            }
        }
        out
    }

    pub fn matvec(&self, x: [T; 3]) -> [T; 3] {
        let mut y = [T::zero(); 3];
        for i in 0..3 {
            for j in 0..3 {
                y[i] = y[i] + self.m[i][j] * x[j];
            }
        }
        y
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = out.m[i][j] * s;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        worst
    }

    pub fn frobenius_sq(&self) -> T {
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                s = s + self.m[i][j] * self.m[i][j];
            }
        }
        s
    }

    /// Singular values, descending, all nonnegative.
    pub fn singular_values(&self) -> [T; 3] {
        self.svd().s
    }

    pub fn svd(&self) -> Svd3<T> {
        // One-sided Jacobi: rotate column pairs of a working copy until all
        // columns are mutually orthogonal; singular values are then the
        // column norms (accurate even when tiny) and the left vectors the
        // normalized columns.
        let mut b = self.m; // b[i][j]: row i, column j
        let mut vmat = [[T::zero(); 3]; 3];
        for i in 0..3 {
            vmat[i][i] = T::one();
        }
        let eps = T::epsilon() * T::c(1e-1);
        for _sweep in 0..60 {
            let mut rotated = false;
            for p in 0..3 {
                for q in (p + 1)..3 {
                    let mut app = T::zero();
                    let mut aqq = T::zero();
                    let mut apq = T::zero();
                    for i in 0..3 {
                        app += b[i][p] * b[i][p];
                        aqq += b[i][q] * b[i][q];
                        apq += b[i][p] * b[i][q];
                    }
                    if apq.abs() <= eps * (app * aqq).sqrt() || apq == T::zero() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (aqq - app) / (T::c(2.0) * apq);
                    let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                    let t = sign / (zeta.abs() + (zeta * zeta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = c * t;
                    for i in 0..3 {
                        let bip = b[i][p];
                        let biq = b[i][q];
                        b[i][p] = c * bip - s * biq;
                        b[i][q] = s * bip + c * biq;
                        let vip = vmat[i][p];
                        let viq = vmat[i][q];
                        vmat[i][p] = c * vip - s * viq;
                        vmat[i][q] = s * vip + c * viq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut cols: Vec<(T, usize)> = (0..3)
            .map(|j| (norm3([b[0][j], b[1][j], b[2][j]]), j))
            .collect();
        cols.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

        let mut s = [T::zero(); 3];
        let mut u = [[T::zero(); 3]; 3];
        let mut v = [[T::zero(); 3]; 3];
        for (slot, &(sv, j)) in cols.iter().enumerate() {
            s[slot] = sv;
            for r in 0..3 {
                v[slot][r] = vmat[r][j];
            }
            if sv > T::zero() {
                for r in 0..3 {
                    u[slot][r] = b[r][j] / sv;
                }
            } else {
                // Zero singular value: complete an orthonormal frame.
                u[slot] = if slot == 0 {
                    [T::one(), T::zero(), T::zero()]
                } else if slot == 1 {
                    any_orthogonal(u[0])
                } else {
                    cross3(u[0], u[1])
                };
            }
        }
        Svd3 { s, u, v }
    }
}

pub fn norm3<T: Real>(x: [T; 3]) -> T {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

pub fn dot3<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn scale3<T: Real>(x: [T; 3], s: T) -> [T; 3] {
    [x[0] * s, x[1] * s, x[2] * s]
}

pub fn add3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn cross3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn any_orthogonal<T: Real>(a: [T; 3]) -> [T; 3] {
    let candidate = if a[0].abs() < T::c(0.9) {
        [T::one(), T::zero(), T::zero()]
    } else {
        [T::zero(), T::one(), T::zero()]
    };
    let c = cross3(a, candidate);
    let n = norm3(c);
    if n > T::zero() {
        scale3(c, T::one() / n)
    } else {
        [T::zero(), T::zero(), T::one()]
    }
}

/// Cyclic Jacobi eigen-decomposition of a real symmetric n x n matrix stored
/// row-major in `a` (destroyed). Returns eigenvalues and the eigenvector
/// matrix with eigenvectors in columns.
pub(crate) fn jacobi_symmetric<T: Real>(a: &mut [T], n: usize) -> (Vec<T>, Vec<T>) {
    debug_assert_eq!(a.len(), n * n);
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let scale = {
        let mut s = T::zero();
        for x in a.iter() {
            s = s + *x * *x;
        }
        s.sqrt().max(T::min_positive_value())
    };
    let stop = scale * T::epsilon() * T::c(1e-2);
    for _sweep in 0..60 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= stop * T::c(1e-3) {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (T::c(2.0) * apq);
                let t = {
                    let sign = if theta >= T::zero() {
                        T::one()
                    } else {
                        -T::one()
                    };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // Rotate rows/columns p and q.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let evals = (0..n).map(|i| a[i * n + i]).collect();
    (evals, v)
}
