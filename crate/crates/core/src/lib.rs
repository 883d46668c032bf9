//! Two-qubit dephasing channels and their entanglement dynamics.
//!
//! A pair of qubits exposed to classical white-noise Zeeman fields — one
//! collective field plus one local field per qubit — undergoes pure dephasing.
//! This crate provides:
//!
//! - the exact Kraus operator-sum representations of the four channels
//!   (local A, local B, both locals, collective) and their twelve-operator
//!   composition, with CPTP completeness certified at construction
//!   ([`channels`]);
//! - Wootters concurrence, pure-input fidelity, reduced coherences and every
//!   decay timescale, including the entanglement decay time
//!   1/τ_e = 1/τ_A + 1/τ_B that undercuts both local dephasing times
//!   ([`metrics`]);
//! - an independent Monte Carlo oracle that samples the stochastic fields
//!   trajectory-by-trajectory and checks the closed forms to statistical
//!   precision ([`oracle`]);
//! - the small exact-shape complex matrix and state layer underneath
//!   ([`matrix`], [`state`], [`eigen`]).
//!
//! All values are `f64`; states use the standard basis |1⟩ = |++⟩,
//! |2⟩ = |+−⟩, |3⟩ = |−+⟩, |4⟩ = |−−⟩ with qubit A as the slow index.

// Index loops address matrices and masks side by side; iterator rewrites
// obscure the (i, j) symmetry.
#![allow(clippy::needless_range_loop)]

pub mod channels;
pub mod eigen;
pub mod matrix;
pub mod metrics;
pub mod oracle;
pub mod state;

pub use channels::{
    apply_closed_form, build_kraus, channel_params, damping_mask, ChannelKind, ChannelParams,
    KrausChannel, NoiseRates, COMPLETENESS_TOL,
};
pub use matrix::{sigma_y_pair, tensor, ComplexMatrix};
pub use metrics::{
    concurrence, disentanglement_time, element_rate, fidelity_pure, off_diagonal_pairs,
    off_diagonal_support, pure_concurrence, reduced_coherence, timescales, ConcurrenceResult,
    Crossing, Timescales,
};
pub use oracle::{
    ensemble_average, oracle_report, sample_path, sample_trajectory, trajectory_phases,
    OracleReport, OracleRow, TrajectoryEnsemble, TrajectoryPhases, MIN_TRAJECTORIES, Z_PASS,
};
pub use state::{
    pure_density, validate, BasisIndex, DensityMatrix, PureState, Qubit, ValidationReport,
};

/// Errors across the crate. Statistical failures of the oracle are *not*
/// errors — they come back as data in the report.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{context}: expected dimension {expected}, got {got}")]
    Shape {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("basis index {index} outside 1..=4")]
    BasisIndex { index: u8 },

    #[error("state not normalized: |Σ|a_i|² − 1| = {deficit:.3e}")]
    NotNormalized { deficit: f64 },

    #[error("invalid density matrix: {report}")]
    InvalidDensity { report: state::ValidationReport },

    #[error("invalid rate {name} = {value}: rates must be finite and ≥ 0")]
    InvalidRate { name: &'static str, value: f64 },

    #[error("elapsed time must be ≥ 0, got {t}")]
    NegativeTime { t: f64 },

    #[error(
        "{kind} channel violates Σ K†K = I (residual {residual:.3e}); inconsistent parameters"
    )]
    Completeness {
        kind: channels::ChannelKind,
        residual: f64,
    },

    #[error("spin-flip spectrum has eigenvalue {value:.3e} below the −1e−10 floor")]
    SpectrumNegative { value: f64 },

    #[error("threshold ε = {epsilon} outside (0, 0.1]")]
    InvalidThreshold { epsilon: f64 },

    #[error("initial concurrence {c0:.3e} does not exceed the threshold ε = {epsilon:.3e}")]
    BelowThreshold { c0: f64, epsilon: f64 },

    #[error("concurrence crossing not bracketed below t = {t_max:.3e}")]
    CrossingNotBracketed { t_max: f64 },

    #[error("ensemble of {n} trajectories is below the minimum {min}")]
    EnsembleTooSmall { n: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
