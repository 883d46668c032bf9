//! Dense complex matrices of fixed size 2 or 4.
//!
//! Everything downstream (density matrices, Kraus operators, the spin-flip
//! transform) lives in a 2- or 4-dimensional Hilbert space, so this is a
//! deliberately small carrier: row-major `Complex64` storage, exact-shape
//! arithmetic, Kronecker products and nothing else.

use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex matrix restricted to dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix. Panics if `dim` is not 2 or 4.
    pub fn zeros(dim: usize) -> Self {
        assert!(
            dim == 2 || dim == 4,
            "only 2x2 and 4x4 matrices are supported"
        );
        Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    /// Identity matrix. Panics if `dim` is not 2 or 4.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    /// Diagonal matrix from real entries. Panics unless 2 or 4 entries are given.
    pub fn diag_real(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        m
    }

    /// Build from a row-major slice of `dim * dim` complex entries.
    pub fn from_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Shape {
                context: "from_slice",
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let mut m = Self::zeros(dim);
        m.data.copy_from_slice(entries);
        Ok(m)
    }

    /// Pauli σ_z = diag(1, −1).
    pub fn pauli_z() -> Self {
        Self::diag_real(&[1.0, -1.0])
    }

    /// Pauli σ_y = [[0, −i], [i, 0]].
    pub fn pauli_y() -> Self {
        let mut m = Self::zeros(2);
        m.set(0, 1, Complex64::new(0.0, -1.0));
        m.set(1, 0, Complex64::new(0.0, 1.0));
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape {
                context: "mul",
                expected: self.dim,
                got: other.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape {
                context: "add",
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(other.data.iter()) {
            *o += v;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape {
                context: "sub",
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(other.data.iter()) {
            *o -= v;
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v *= s;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    /// Elementwise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = v.conj();
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest elementwise deviation from Hermiticity, max |m_ij − m_ji*|.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Largest elementwise |difference| against another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// True if every entry is real and off-diagonal entries vanish.
    pub fn is_real_diagonal(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let v = self.get(i, j);
                if v.im.abs() > tol || (i != j && v.re.abs() > tol) {
                    return false;
                }
            }
        }
        true
    }
}

/// Kronecker product of two 2×2 matrices; qubit A is the slow (block) index,
/// so `(a ⊗ b)[2i+k][2j+l] = a[i][j] b[k][l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != 2 {
        return Err(Error::Shape {
            context: "tensor",
            expected: 2,
            got: a.dim(),
        });
    }
    if b.dim() != 2 {
        return Err(Error::Shape {
            context: "tensor",
            expected: 2,
            got: b.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.set(2 * i + k, 2 * j + l, a.get(i, j) * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// σ_y ⊗ σ_y, the spin-flip operator entering the concurrence.
pub fn sigma_y_pair() -> ComplexMatrix {
    tensor(&ComplexMatrix::pauli_y(), &ComplexMatrix::pauli_y()).expect("2x2 inputs")
}
