//! Two-qubit states in the standard basis.
//!
//! The basis is fixed project-wide as
//! |1⟩ = |++⟩, |2⟩ = |+−⟩, |3⟩ = |−+⟩, |4⟩ = |−−⟩,
//! with qubit A as the slow (most significant) index. Density matrices are
//! validated on construction — Hermitian, unit trace, positive semidefinite —
//! and are never silently repaired: a violation is a bug upstream, not noise
//! to clamp away.

use num_complex::Complex64;

use crate::eigen::eigvalsh;
use crate::matrix::ComplexMatrix;
use crate::{Error, Result};

/// Elementwise Hermiticity tolerance |ρ_ij − ρ_ji*|.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Trace tolerance |Tr ρ − 1|.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue; below this PSD is considered violated.
pub const PSD_TOL: f64 = -1e-10;
/// Pure-state normalisation tolerance |Σ|a_i|² − 1|.
pub const NORM_TOL: f64 = 1e-12;

/// Which qubit of the pair, A being the slow tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    A,
    B,
}

/// Standard-basis label 1..=4 with its (s_A, s_B) sign pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(u8);

impl BasisIndex {
    pub const ALL: [BasisIndex; 4] = [BasisIndex(1), BasisIndex(2), BasisIndex(3), BasisIndex(4)];

    pub fn new(index: u8) -> Result<Self> {
        if (1..=4).contains(&index) {
            Ok(Self(index))
        } else {
            Err(Error::BasisIndex { index })
        }
    }

    /// σ_z eigenvalue signs (s_A, s_B) of this basis state.
    pub fn signs(self) -> (i8, i8) {
        let i = self.0 - 1;
        let s_a = if i < 2 { 1 } else { -1 };
        let s_b = if i.is_multiple_of(2) { 1 } else { -1 };
        (s_a, s_b)
    }

    pub fn from_signs(s_a: i8, s_b: i8) -> Self {
        let row = if s_a > 0 { 0 } else { 2 } + if s_b > 0 { 0 } else { 1 };
        Self(row as u8 + 1)
    }

    /// One-based label as printed in the standard basis.
    pub fn label(self) -> u8 {
        self.0
    }

    /// Zero-based row/column offset into a 4×4 matrix.
    pub fn row(self) -> usize {
        usize::from(self.0) - 1
    }
}

/// Normalised two-qubit pure state Σ a_i |i⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: [Complex64; 4],
}

impl PureState {
    /// Validates Σ|a_i|² = 1 to within [`NORM_TOL`].
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let deficit = (norm_sq - 1.0).abs();
        if !norm_sq.is_finite() || deficit > NORM_TOL {
            return Err(Error::NotNormalized { deficit });
        }
        Ok(Self { amps })
    }

    /// Builds from real amplitudes and normalises them.
    pub fn from_reals_normalized(amps: [f64; 4]) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { deficit: 1.0 });
        }
        let mut out = [Complex64::ZERO; 4];
        for (o, a) in out.iter_mut().zip(amps) {
            *o = Complex64::new(a / norm, 0.0);
        }
        Self::new(out)
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amps
    }

    pub fn amplitude(&self, index: BasisIndex) -> Complex64 {
        self.amps[index.row()]
    }

    /// Bell state (|1⟩ + |4⟩)/√2.
    pub fn bell_phi_plus() -> Self {
        Self::from_reals_normalized([1.0, 0.0, 0.0, 1.0]).expect("normalizable")
    }
}

/// Validation outcome for a candidate density matrix. Never aborts; callers
/// decide what to do with a failing report.
#[derive(Debug, Clone, Copy)]
pub struct ValidationReport {
    pub hermiticity_residual: f64,
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
    pub finite: bool,
}

impl ValidationReport {
    pub fn hermitian_ok(&self) -> bool {
        self.finite && self.hermiticity_residual <= HERMITICITY_TOL
    }

    pub fn trace_ok(&self) -> bool {
        self.finite && self.trace_residual <= TRACE_TOL
    }

    pub fn psd_ok(&self) -> bool {
        self.finite && self.min_eigenvalue >= PSD_TOL
    }

    pub fn is_valid(&self) -> bool {
        self.hermitian_ok() && self.trace_ok() && self.psd_ok()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "hermiticity residual {:.3e} ({}), trace residual {:.3e} ({}), min eigenvalue {:.3e} ({}){}",
            self.hermiticity_residual,
            if self.hermitian_ok() { "ok" } else { "FAIL" },
            self.trace_residual,
            if self.trace_ok() { "ok" } else { "FAIL" },
            self.min_eigenvalue,
            if self.psd_ok() { "ok" } else { "FAIL" },
            if self.finite { "" } else { ", non-finite entries" },
        )
    }
}

/// Checks a candidate matrix against the density-matrix invariants.
pub fn validate(m: &ComplexMatrix) -> ValidationReport {
    let finite = m.is_finite();
    if !finite {
        return ValidationReport {
            hermiticity_residual: f64::INFINITY,
            trace_residual: f64::INFINITY,
            min_eigenvalue: f64::NEG_INFINITY,
            finite,
        };
    }
    let hermiticity_residual = m.hermiticity_residual();
    let trace_residual = (m.trace() - Complex64::ONE).norm();
    let min_eigenvalue = eigvalsh(m).into_iter().fold(f64::INFINITY, f64::min);
    ValidationReport {
        hermiticity_residual,
        trace_residual,
        min_eigenvalue,
        finite,
    }
}

/// Validated density matrix, 4×4 for the two-qubit state or 2×2 for a
/// reduced single-qubit state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps; rejects anything that fails the invariants.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let report = validate(&m);
        if report.is_valid() {
            Ok(Self { m })
        } else {
            Err(Error::InvalidDensity { report })
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// ρ_ij by one-based basis labels.
    pub fn element(&self, i: BasisIndex, j: BasisIndex) -> Complex64 {
        self.m.get(i.row(), j.row())
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.m)
    }

    /// Eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.m)
    }

    /// Traces out the complementary qubit, keeping `keep`.
    pub fn partial_trace(&self, keep: Qubit) -> Result<DensityMatrix> {
        if self.dim() != 4 {
            return Err(Error::Shape {
                context: "partial_trace",
                expected: 4,
                got: self.dim(),
            });
        }
        let r = &self.m;
        let mut s = ComplexMatrix::zeros(2);
        match keep {
            // s^A_kl = Σ_b ρ_{(k,b),(l,b)}
            Qubit::A => {
                s.set(0, 0, r.get(0, 0) + r.get(1, 1));
                s.set(0, 1, r.get(0, 2) + r.get(1, 3));
                s.set(1, 0, r.get(2, 0) + r.get(3, 1));
                s.set(1, 1, r.get(2, 2) + r.get(3, 3));
            }
            // s^B_kl = Σ_a ρ_{(a,k),(a,l)}
            Qubit::B => {
                s.set(0, 0, r.get(0, 0) + r.get(2, 2));
                s.set(0, 1, r.get(0, 1) + r.get(2, 3));
                s.set(1, 0, r.get(1, 0) + r.get(3, 2));
                s.set(1, 1, r.get(1, 1) + r.get(3, 3));
            }
        }
        DensityMatrix::new(s)
    }
}

/// Outer product ρ = |ψ⟩⟨ψ|, i.e. ρ_ij = a_i a_j*.
pub fn pure_density(psi: &PureState) -> DensityMatrix {
    let mut m = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            m.set(i, j, psi.amps[i] * psi.amps[j].conj());
        }
    }
    DensityMatrix::new(m).expect("outer product of a normalized state is a valid density matrix")
}
