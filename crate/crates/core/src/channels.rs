//! The four dephasing channels in Kraus operator-sum form.
//!
//! Local noise on qubit A (B) is carried by the pair E_1 = diag(1, γ_A) ⊗ I,
//! E_2 = diag(0, ω_A) ⊗ I (mirrored for F_1, F_2 on qubit B); collective
//! noise by the triple
//!
//!   D_1 = diag(γ, 1, 1, γ),  D_2 = diag(ω_1, 0, 0, ω_2),  D_3 = diag(0, 0, 0, ω_3),
//!
//! with the time functions
//!
//!   γ_X = e^{−t/2T_2^X},  ω_X = √(1 − e^{−t/T_2^X}),
//!   γ   = e^{−t/2T_2},    ω_1 = √(1 − e^{−t/T_2}),
//!   ω_2 = −e^{−t/T_2} ω_1,  ω_3 = √((1 − e^{−t/T_2})(1 − e^{−2t/T_2})).
//!
//! All operators are real diagonal, so the channels commute and every channel
//! acts as an elementwise damping mask on the density matrix: that closed
//! form is exposed alongside the literal operator-sum as a cross-checkable
//! fast path.

use crate::matrix::{tensor, ComplexMatrix};
use crate::state::DensityMatrix;
use crate::{Error, Result};

/// Completeness tolerance for Σ K†K = I, elementwise.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Dephasing rates: collective Γ and local Γ_A, Γ_B, each ≥ 0.
///
/// The corresponding phase relaxation times are T_2 = 1/Γ and so on, infinite
/// when the rate vanishes; a zero rate is an exact identity factor throughout,
/// never a 0·∞ product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseRates {
    collective: f64,
    local_a: f64,
    local_b: f64,
}

impl NoiseRates {
    pub fn new(collective: f64, local_a: f64, local_b: f64) -> Result<Self> {
        for (name, value) in [
            ("Gamma", collective),
            ("Gamma_A", local_a),
            ("Gamma_B", local_b),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidRate { name, value });
            }
        }
        Ok(Self {
            collective,
            local_a,
            local_b,
        })
    }

    /// Collective dephasing rate Γ.
    pub fn collective(&self) -> f64 {
        self.collective
    }

    /// Local dephasing rate Γ_A.
    pub fn local_a(&self) -> f64 {
        self.local_a
    }

    /// Local dephasing rate Γ_B.
    pub fn local_b(&self) -> f64 {
        self.local_b
    }

    /// T_2 = 1/Γ, infinite at zero rate.
    pub fn t2(&self) -> f64 {
        1.0 / self.collective
    }

    /// T_2^A = 1/Γ_A.
    pub fn t2_a(&self) -> f64 {
        1.0 / self.local_a
    }

    /// T_2^B = 1/Γ_B.
    pub fn t2_b(&self) -> f64 {
        1.0 / self.local_b
    }
}

/// Time-evaluated channel parameters; see the module docs for the formulas.
#[derive(Debug, Clone, Copy)]
pub struct ChannelParams {
    pub gamma_a: f64,
    pub omega_a: f64,
    pub gamma_b: f64,
    pub omega_b: f64,
    pub gamma: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub omega_3: f64,
    pub t: f64,
}

/// Evaluates the γ/ω parameter functions at elapsed time `t ≥ 0`.
pub fn channel_params(t: f64, rates: &NoiseRates) -> Result<ChannelParams> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    // x = e^{−t/T_2} = e^{−Γt}; a zero rate gives exactly x = 1, γ = 1, ω = 0.
    let (gamma_a, omega_a) = local_pair(t, rates.local_a);
    let (gamma_b, omega_b) = local_pair(t, rates.local_b);
    let x = (-t * rates.collective).exp();
    let gamma = (-0.5 * t * rates.collective).exp();
    let omega_1 = (1.0 - x).sqrt();
    let omega_2 = -x * omega_1;
    let omega_3 = ((1.0 - x) * (1.0 - x * x)).sqrt();
    Ok(ChannelParams {
        gamma_a,
        omega_a,
        gamma_b,
        omega_b,
        gamma,
        omega_1,
        omega_2,
        omega_3,
        t,
    })
}

fn local_pair(t: f64, rate: f64) -> (f64, f64) {
    let gamma = (-0.5 * t * rate).exp();
    let omega = (1.0 - (-t * rate).exp()).sqrt();
    (gamma, omega)
}

/// The five channel constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    /// ℰ_A: local dephasing of qubit A only ({E_1, E_2}).
    OneQubitA,
    /// ℰ_B: local dephasing of qubit B only ({F_1, F_2}).
    OneQubitB,
    /// ℰ_AB: both local fields ({M_μ = E_i F_j}).
    TwoQubitLocal,
    /// ℰ_D: the collective field only ({D_1, D_2, D_3}).
    Collective,
    /// All three fields, as the twelve products F_i E_j D_k.
    FullTwelve,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 5] = [
        ChannelKind::OneQubitA,
        ChannelKind::OneQubitB,
        ChannelKind::TwoQubitLocal,
        ChannelKind::Collective,
        ChannelKind::FullTwelve,
    ];

    /// Number of Kraus operators in this construction.
    pub fn operator_count(&self) -> usize {
        match self {
            ChannelKind::OneQubitA | ChannelKind::OneQubitB => 2,
            ChannelKind::TwoQubitLocal => 4,
            ChannelKind::Collective => 3,
            ChannelKind::FullTwelve => 12,
        }
    }
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ChannelKind::OneQubitA => "one-qubit-a",
            ChannelKind::OneQubitB => "one-qubit-b",
            ChannelKind::TwoQubitLocal => "two-qubit-local",
            ChannelKind::Collective => "collective",
            ChannelKind::FullTwelve => "full-twelve",
        };
        f.write_str(name)
    }
}

/// A dephasing channel as an ordered set of 4×4 Kraus operators, with its
/// completeness residual max |(Σ K†K − I)_ij| recorded at construction.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kind: ChannelKind,
    operators: Vec<ComplexMatrix>,
    completeness_residual: f64,
}

impl KrausChannel {
    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn completeness_residual(&self) -> f64 {
        self.completeness_residual
    }

    /// Applies the operator sum ρ(t) = Σ_μ K_μ ρ(0) K_μ†.
    ///
    /// Every operator here is real diagonal (K = K† = K*), so this matches
    /// the convention with the daggers on the left as well.
    pub fn apply(&self, rho0: &DensityMatrix) -> Result<DensityMatrix> {
        if rho0.dim() != 4 {
            return Err(Error::Shape {
                context: "apply",
                expected: 4,
                got: rho0.dim(),
            });
        }
        let mut sum = ComplexMatrix::zeros(4);
        for k in &self.operators {
            let term = k.mul(rho0.matrix())?.mul(&k.adjoint())?;
            sum = sum.add(&term)?;
        }
        DensityMatrix::new(sum)
    }
}

fn local_kraus_a(params: &ChannelParams) -> Result<Vec<ComplexMatrix>> {
    let i2 = ComplexMatrix::identity(2);
    Ok(vec![
        tensor(&ComplexMatrix::diag_real(&[1.0, params.gamma_a]), &i2)?,
        tensor(&ComplexMatrix::diag_real(&[0.0, params.omega_a]), &i2)?,
    ])
}

fn local_kraus_b(params: &ChannelParams) -> Result<Vec<ComplexMatrix>> {
    let i2 = ComplexMatrix::identity(2);
    Ok(vec![
        tensor(&i2, &ComplexMatrix::diag_real(&[1.0, params.gamma_b]))?,
        tensor(&i2, &ComplexMatrix::diag_real(&[0.0, params.omega_b]))?,
    ])
}

fn collective_kraus(params: &ChannelParams) -> Vec<ComplexMatrix> {
    vec![
        ComplexMatrix::diag_real(&[params.gamma, 1.0, 1.0, params.gamma]),
        ComplexMatrix::diag_real(&[params.omega_1, 0.0, 0.0, params.omega_2]),
        ComplexMatrix::diag_real(&[0.0, 0.0, 0.0, params.omega_3]),
    ]
}

/// Builds the Kraus operator set for `kind` and certifies Σ K†K = I.
///
/// A completeness residual above [`COMPLETENESS_TOL`] signals inconsistent
/// parameters and is returned as an error rather than a silently lossy
/// channel.
pub fn build_kraus(kind: ChannelKind, params: &ChannelParams) -> Result<KrausChannel> {
    let operators = match kind {
        ChannelKind::OneQubitA => local_kraus_a(params)?,
        ChannelKind::OneQubitB => local_kraus_b(params)?,
        ChannelKind::TwoQubitLocal => {
            let es = local_kraus_a(params)?;
            let fs = local_kraus_b(params)?;
            // M_1 = E_1 F_1, M_2 = E_1 F_2, M_3 = E_2 F_1, M_4 = E_2 F_2.
            let mut ops = Vec::with_capacity(4);
            for e in &es {
                for f in &fs {
                    ops.push(e.mul(f)?);
                }
            }
            ops
        }
        ChannelKind::Collective => collective_kraus(params),
        ChannelKind::FullTwelve => {
            let es = local_kraus_a(params)?;
            let fs = local_kraus_b(params)?;
            let ds = collective_kraus(params);
            let mut ops = Vec::with_capacity(12);
            for f in &fs {
                for e in &es {
                    for d in &ds {
                        ops.push(f.mul(e)?.mul(d)?);
                    }
                }
            }
            ops
        }
    };
    debug_assert!(operators.iter().all(|k| k.is_real_diagonal(0.0)));

    let mut sum = ComplexMatrix::zeros(4);
    for k in &operators {
        sum = sum.add(&k.adjoint().mul(k)?)?;
    }
    let completeness_residual = sum.max_abs_diff(&ComplexMatrix::identity(4));
    if completeness_residual > COMPLETENESS_TOL {
        return Err(Error::Completeness {
            kind,
            residual: completeness_residual,
        });
    }
    Ok(KrausChannel {
        kind,
        operators,
        completeness_residual,
    })
}

/// Elementwise damping factors of `kind` in the standard basis: ρ_ij(t) =
/// mask_ij · ρ_ij(0).
///
/// Local fields damp every element whose two labels differ in the respective
/// qubit's sign; the collective field damps by γ^{d²} where d is half the
/// difference of the summed signs, which reproduces the printed matrices
/// (γ on single-flip elements, γ⁴ on (1,4), nothing on (2,3)).
pub fn damping_mask(kind: ChannelKind, params: &ChannelParams) -> [[f64; 4]; 4] {
    let sa = [1i8, 1, -1, -1];
    let sb = [1i8, -1, 1, -1];
    let mut mask = [[1.0f64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut f = 1.0;
            let local_a = sa[i] != sa[j];
            let local_b = sb[i] != sb[j];
            let collective_halfdiff = ((sa[i] + sb[i]) - (sa[j] + sb[j])) / 2;
            match kind {
                ChannelKind::OneQubitA => {
                    if local_a {
                        f *= params.gamma_a;
                    }
                }
                ChannelKind::OneQubitB => {
                    if local_b {
                        f *= params.gamma_b;
                    }
                }
                ChannelKind::TwoQubitLocal | ChannelKind::FullTwelve => {
                    if local_a {
                        f *= params.gamma_a;
                    }
                    if local_b {
                        f *= params.gamma_b;
                    }
                }
                ChannelKind::Collective => {}
            }
            if matches!(kind, ChannelKind::Collective | ChannelKind::FullTwelve) {
                f *= params
                    .gamma
                    .powi((collective_halfdiff * collective_halfdiff) as i32);
            }
            mask[i][j] = f;
        }
    }
    mask
}

/// Applies `kind` through its closed-form damping mask; agrees with the
/// operator-sum route to machine precision.
pub fn apply_closed_form(
    kind: ChannelKind,
    params: &ChannelParams,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix> {
    if rho0.dim() != 4 {
        return Err(Error::Shape {
            context: "apply_closed_form",
            expected: 4,
            got: rho0.dim(),
        });
    }
    let mask = damping_mask(kind, params);
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            out.set(i, j, rho0.matrix().get(i, j) * mask[i][j]);
        }
    }
    DensityMatrix::new(out)
}
