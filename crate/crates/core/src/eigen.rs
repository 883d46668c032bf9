//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! The matrices here are at most 4×4, where Jacobi converges in a handful of
//! sweeps and needs no pivot bookkeeping. Each rotation kills one off-diagonal
//! pair (p, q): the complex phase of `a_pq` is absorbed first, which reduces
//! the 2×2 block to a real symmetric one, and a standard Givens rotation
//! diagonalises that.

use num_complex::Complex64;

use crate::matrix::ComplexMatrix;

/// Eigendecomposition of a Hermitian matrix: `a = vectors · diag(values) · vectors†`.
///
/// Eigenvalues are real and sorted in decreasing order; `vectors` is unitary
/// with eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

const MAX_SWEEPS: usize = 60;

/// Sum of squared magnitudes of the strict upper triangle.
fn off_diagonal_norm_sq(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += a.get(p, q).norm_sqr();
        }
    }
    s
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi.
///
/// The input is symmetrised as (a + a†)/2 to shed roundoff asymmetry; callers
/// are expected to pass matrices that are Hermitian up to noise.
pub fn eigh(a: &ComplexMatrix) -> Eigendecomposition {
    let n = a.dim();
    let mut m = a
        .add(&a.adjoint())
        .expect("same shape")
        .scale(Complex64::new(0.5, 0.0));
    let mut v = ComplexMatrix::identity(n);

    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j).norm())
        .fold(1.0f64, f64::max);
    let tol_sq = (1e-15 * scale).powi(2);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm_sq(&m) <= tol_sq {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let values_raw: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| {
        values_raw[j]
            .partial_cmp(&values_raw[i])
            .expect("finite eigenvalues")
    });

    let mut vectors = ComplexMatrix::zeros(n);
    let mut values = Vec::with_capacity(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        values.push(values_raw[old_col]);
        for row in 0..n {
            vectors.set(row, new_col, v.get(row, old_col));
        }
    }

    Eigendecomposition { values, vectors }
}

/// Eigenvalues only, sorted in decreasing order.
pub fn eigvalsh(a: &ComplexMatrix) -> Vec<f64> {
    eigh(a).values
}

/// One Jacobi rotation annihilating the (p, q) element of `m`, accumulated
/// into `v`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m.get(p, q);
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;

    // Real Givens angle for the phase-stripped block [[app, mag], [mag, aqq]].
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Column rotation R restricted to (p, q):
    //   R_pp = u·c, R_pq = u·s, R_qp = −s, R_qq = c,  u = phase of a_pq.
    let rpp = phase * c;
    let rpq = phase * s;
    let rqp = Complex64::new(-s, 0.0);
    let rqq = Complex64::new(c, 0.0);

    let n = m.dim();
    // m ← R† m R: update columns, then rows (conjugated).
    for row in 0..n {
        let mp = m.get(row, p);
        let mq = m.get(row, q);
        m.set(row, p, mp * rpp + mq * rqp);
        m.set(row, q, mp * rpq + mq * rqq);
    }
    for col in 0..n {
        let mp = m.get(p, col);
        let mq = m.get(q, col);
        m.set(p, col, rpp.conj() * mp + rqp.conj() * mq);
        m.set(q, col, rpq.conj() * mp + rqq.conj() * mq);
    }
    // Pin what the rotation guarantees: real diagonal, zero pivot.
    m.set(p, q, Complex64::ZERO);
    m.set(q, p, Complex64::ZERO);
    m.set(p, p, Complex64::new(m.get(p, p).re, 0.0));
    m.set(q, q, Complex64::new(m.get(q, q).re, 0.0));

    for row in 0..n {
        let vp = v.get(row, p);
        let vq = v.get(row, q);
        v.set(row, p, vp * rpp + vq * rqp);
        v.set(row, q, vp * rpq + vq * rqq);
    }
}

/// Hermitian PSD square root via the spectral decomposition.
///
/// Eigenvalues below `clamp_floor` (noise around exact zeros) are treated as
/// zero; genuinely negative input is the caller's bug and is clamped the same
/// way rather than poisoning the result with NaN.
pub fn sqrt_psd(a: &ComplexMatrix, clamp_floor: f64) -> ComplexMatrix {
    let eig = eigh(a);
    let n = a.dim();
    let mut out = ComplexMatrix::zeros(n);
    for (k, &lam) in eig.values.iter().enumerate() {
        let root = if lam <= clamp_floor { 0.0 } else { lam.sqrt() };
        if root == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let v = out.get(i, j) + eig.vectors.get(i, k) * eig.vectors.get(j, k).conj() * root;
                out.set(i, j, v);
            }
        }
    }
    out
}
