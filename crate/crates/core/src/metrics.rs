//! Entanglement and coherence quantifiers.
//!
//! Concurrence follows the spin-flip construction: ϱ = ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y),
//! C = max(0, √λ_1 − √λ_2 − √λ_3 − √λ_4) with the λ_i in decreasing order.
//! ϱ itself is not Hermitian, so the eigenvalues are taken from the similar
//! Hermitian PSD matrix √ρ · (σ_y⊗σ_y) ρ* (σ_y⊗σ_y) · √ρ, keeping the whole
//! pipeline on Hermitian solvers with a guaranteed real spectrum.
//!
//! Timescales for the two-local-field channel: τ_A = 2/Γ_A, τ_B = 2/Γ_B for
//! the reduced single-qubit coherences, Γ_ij elementwise rates with
//! Γ_12 = Γ_34 = Γ_B/2, Γ_13 = Γ_24 = Γ_A/2, Γ_14 = Γ_23 = (Γ_A+Γ_B)/2,
//! the mixed dephasing time τ = max 1/Γ_ij over the populated elements, and
//! the entanglement decay time 1/τ_e = 1/τ_A + 1/τ_B.

use num_complex::Complex64;

use crate::channels::{
    apply_closed_form, channel_params, damping_mask, ChannelKind, ChannelParams, NoiseRates,
};
use crate::eigen::{eigvalsh, sqrt_psd};
use crate::matrix::{sigma_y_pair, ComplexMatrix};
use crate::state::{pure_density, BasisIndex, DensityMatrix, PureState, Qubit};
use crate::{Error, Result};

/// Eigenvalues of ϱ this close to zero are solver noise around an exact zero
/// and are treated as zero before the square root, which would otherwise
/// amplify 1e−15 noise into 3e−8 of concurrence error.
const LAMBDA_CLAMP: f64 = 1e-14;

/// Hard floor: a spectrum below this indicates a broken input, not roundoff.
const LAMBDA_FLOOR: f64 = -1e-10;

/// Concurrence value together with the spin-flip spectrum it came from.
#[derive(Debug, Clone, Copy)]
pub struct ConcurrenceResult {
    /// C ∈ [0, 1].
    pub c: f64,
    /// Eigenvalues of ϱ, clamped at zero and sorted in decreasing order.
    pub lambdas: [f64; 4],
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    if rho.dim() != 4 {
        return Err(Error::Shape {
            context: "concurrence",
            expected: 4,
            got: rho.dim(),
        });
    }
    let flip = sigma_y_pair();
    // ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y), conjugation taken in the standard basis.
    let rho_tilde = flip.mul(&rho.matrix().conj())?.mul(&flip)?;
    let root = sqrt_psd(rho.matrix(), LAMBDA_CLAMP);
    let h = root.mul(&rho_tilde)?.mul(&root)?;
    let raw = eigvalsh(&h);

    let mut lambdas = [0.0f64; 4];
    for (slot, &lam) in lambdas.iter_mut().zip(raw.iter()) {
        if lam < LAMBDA_FLOOR {
            return Err(Error::SpectrumNegative { value: lam });
        }
        *slot = if lam < LAMBDA_CLAMP { 0.0 } else { lam };
    }

    let s: Vec<f64> = lambdas.iter().map(|l| l.sqrt()).collect();
    let c = (s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0);
    Ok(ConcurrenceResult { c, lambdas })
}

/// Concurrence of a pure state, C = 2|a_1 a_4 − a_2 a_3|.
pub fn pure_concurrence(psi: &PureState) -> f64 {
    let a = psi.amplitudes();
    2.0 * (a[0] * a[3] - a[1] * a[2]).norm()
}

/// Input-output fidelity for a pure input, F = ⟨ψ|ρ_out|ψ⟩.
pub fn fidelity_pure(psi: &PureState, rho_out: &DensityMatrix) -> Result<f64> {
    if rho_out.dim() != 4 {
        return Err(Error::Shape {
            context: "fidelity_pure",
            expected: 4,
            got: rho_out.dim(),
        });
    }
    let a = psi.amplitudes();
    let mut f = Complex64::ZERO;
    for i in 0..4 {
        for j in 0..4 {
            f += a[i].conj() * rho_out.matrix().get(i, j) * a[j];
        }
    }
    // Exactly real for Hermitian ρ; clamp roundoff to the contract range.
    Ok(f.re.clamp(0.0, 1.0))
}

/// Off-diagonal coherence of the reduced state of one qubit:
/// s^A_12 = ρ_13 + ρ_24 or s^B_12 = ρ_12 + ρ_34.
pub fn reduced_coherence(rho: &DensityMatrix, qubit: Qubit) -> Result<Complex64> {
    if rho.dim() != 4 {
        return Err(Error::Shape {
            context: "reduced_coherence",
            expected: 4,
            got: rho.dim(),
        });
    }
    let m = rho.matrix();
    Ok(match qubit {
        Qubit::A => m.get(0, 2) + m.get(1, 3),
        Qubit::B => m.get(0, 1) + m.get(2, 3),
    })
}

/// The six off-diagonal element pairs (i, j), i < j, in row-major order.
pub fn off_diagonal_pairs() -> [(BasisIndex, BasisIndex); 6] {
    let b = BasisIndex::ALL;
    [
        (b[0], b[1]),
        (b[0], b[2]),
        (b[0], b[3]),
        (b[1], b[2]),
        (b[1], b[3]),
        (b[2], b[3]),
    ]
}

/// Decay rate Γ_ij of element (i, j) under the two-local-field channel.
pub fn element_rate(rates: &NoiseRates, i: BasisIndex, j: BasisIndex) -> f64 {
    let (sa_i, sb_i) = i.signs();
    let (sa_j, sb_j) = j.signs();
    let mut rate = 0.0;
    if sa_i != sa_j {
        rate += rates.local_a();
    }
    if sb_i != sb_j {
        rate += rates.local_b();
    }
    rate / 2.0
}

/// Off-diagonal pairs of `rho` with magnitude above `tol`.
pub fn off_diagonal_support(rho: &DensityMatrix, tol: f64) -> Vec<(BasisIndex, BasisIndex)> {
    off_diagonal_pairs()
        .into_iter()
        .filter(|&(i, j)| rho.element(i, j).norm() > tol)
        .collect()
}

/// All decay timescales of the two-local-field channel.
#[derive(Debug, Clone)]
pub struct Timescales {
    /// Local dephasing time τ_A = 2/Γ_A (infinite at zero rate).
    pub tau_a: f64,
    /// Local dephasing time τ_B = 2/Γ_B.
    pub tau_b: f64,
    /// Entanglement decay time, 1/τ_e = 1/τ_A + 1/τ_B; undefined when both
    /// local rates vanish.
    pub tau_e: Option<f64>,
    /// Mixed dephasing time, max over the populated off-diagonal elements of
    /// 1/Γ_ij; undefined for empty support, infinite if a populated element
    /// never decays.
    pub tau: Option<f64>,
    /// Elementwise rates Γ_ij for all six pairs.
    pub gamma_ij: [((BasisIndex, BasisIndex), f64); 6],
}

/// Computes every timescale from the rates and the set of initially populated
/// off-diagonal elements.
pub fn timescales(rates: &NoiseRates, support: &[(BasisIndex, BasisIndex)]) -> Timescales {
    let tau_a = 2.0 / rates.local_a();
    let tau_b = 2.0 / rates.local_b();
    let tau_e = if rates.local_a() == 0.0 && rates.local_b() == 0.0 {
        None
    } else {
        Some(1.0 / (1.0 / tau_a + 1.0 / tau_b))
    };
    let gamma_ij = off_diagonal_pairs().map(|(i, j)| ((i, j), element_rate(rates, i, j)));
    let tau = if support.is_empty() {
        None
    } else {
        Some(
            support
                .iter()
                .map(|&(i, j)| 1.0 / element_rate(rates, i, j))
                .fold(0.0, f64::max),
        )
    };
    Timescales {
        tau_a,
        tau_b,
        tau_e,
        tau,
        gamma_ij,
    }
}

/// Outcome of the disentanglement-time search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    /// Smallest time at which C(ρ(t)) first falls below the threshold.
    At(f64),
    /// The channel keeps C above the threshold for all times.
    Never,
}

/// Relative resolution of the reported crossing time.
const CROSSING_REL_TOL: f64 = 1e-6;
/// Grid points per scan pass.
const SCAN_POINTS: usize = 256;

/// Time at which the concurrence of `psi0` evolved under `kind` first drops
/// below `epsilon`.
///
/// A coarse log-grid scan brackets the crossing before bisection refines it,
/// so no global monotonicity of C(t) is assumed. Channels that preserve the
/// entanglement forever (a zero-rate channel, or the collective channel on
/// states supported in the {|2⟩, |3⟩} subspace) report [`Crossing::Never`].
pub fn disentanglement_time(
    kind: ChannelKind,
    rates: &NoiseRates,
    psi0: &PureState,
    epsilon: f64,
) -> Result<Crossing> {
    if !(epsilon > 0.0 && epsilon <= 0.1) {
        return Err(Error::InvalidThreshold { epsilon });
    }
    let rho0 = pure_density(psi0);
    let c0 = concurrence(&rho0)?.c;
    if c0 <= epsilon {
        return Err(Error::BelowThreshold { c0, epsilon });
    }

    let c_at = |t: f64| -> Result<f64> {
        let params = channel_params(t, rates)?;
        Ok(concurrence(&apply_closed_form(kind, &params, &rho0)?)?.c)
    };

    // All damping factors have a t → ∞ limit (0 or 1); the limiting state
    // decides whether a crossing exists at all.
    let c_limit = concurrence(&limit_state(kind, rates, &rho0)?)?.c;

    let relevant: Vec<f64> = match kind {
        ChannelKind::OneQubitA => vec![rates.local_a()],
        ChannelKind::OneQubitB => vec![rates.local_b()],
        ChannelKind::TwoQubitLocal => vec![rates.local_a(), rates.local_b()],
        ChannelKind::Collective => vec![rates.collective()],
        ChannelKind::FullTwelve => vec![rates.collective(), rates.local_a(), rates.local_b()],
    };
    let fastest = relevant.iter().copied().fold(0.0, f64::max);
    let slowest_positive = relevant
        .iter()
        .copied()
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    if fastest == 0.0 {
        // Identity channel: nothing ever decays.
        return Ok(Crossing::Never);
    }

    let t_lo = 1e-3 / fastest;
    // Generous first bracket: even the slowest factor alone reaches ε within
    // (2/r) ln(C0/ε); scan four times further before doubling.
    let mut t_hi = 8.0 / slowest_positive * (c0 / epsilon).ln().max(1.0);

    for _ in 0..64 {
        let mut prev_t = 0.0;
        for k in 0..SCAN_POINTS {
            let frac = k as f64 / (SCAN_POINTS - 1) as f64;
            let t = t_lo * (t_hi / t_lo).powf(frac);
            if c_at(t)? < epsilon {
                return bisect(&c_at, prev_t, t, epsilon);
            }
            prev_t = t;
        }
        if c_limit >= epsilon {
            return Ok(Crossing::Never);
        }
        t_hi *= 2.0;
    }
    // C tends below ε but astronomically slowly; report the limit honestly.
    Err(Error::CrossingNotBracketed { t_max: t_hi })
}

fn bisect(
    c_at: &dyn Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    epsilon: f64,
) -> Result<Crossing> {
    while hi - lo > CROSSING_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if c_at(mid)? < epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Crossing::At(hi))
}

/// The t → ∞ limit of the channel applied to `rho0`: each damping factor is
/// replaced by its limit, 1 where no positive rate touches the element and 0
/// otherwise.
fn limit_state(
    kind: ChannelKind,
    rates: &NoiseRates,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix> {
    let limit_of = |rate: f64| if rate > 0.0 { 0.0 } else { 1.0 };
    let p = ChannelParams {
        gamma_a: limit_of(rates.local_a()),
        omega_a: 1.0 - limit_of(rates.local_a()),
        gamma_b: limit_of(rates.local_b()),
        omega_b: 1.0 - limit_of(rates.local_b()),
        gamma: limit_of(rates.collective()),
        omega_1: 1.0 - limit_of(rates.collective()),
        omega_2: 0.0,
        omega_3: 0.0,
        t: f64::MAX,
    };
    let mask = damping_mask(kind, &p);
    let mut m = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            m.set(i, j, rho0.matrix().get(i, j) * mask[i][j]);
        }
    }
    DensityMatrix::new(m)
}
