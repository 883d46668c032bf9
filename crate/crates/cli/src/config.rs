//! Experiment configuration: JSON config file, CLI overrides, named state
//! presets and the time grid.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use dephasing::{ChannelKind, NoiseRates, PureState};

/// Named initial states available as `--state` presets.
pub const PRESETS: [(&str, [f64; 8]); 5] = [
    // (|1⟩ + |4⟩)/√2
    ("bell-phi-plus", [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
    // (|2⟩ + |3⟩)/√2, immune to the collective field
    ("robust-23", [0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
    // (|1⟩ + |2⟩ + |4⟩)/√3
    ("superpos-124", [1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
    // (|1⟩ + |3⟩ + |4⟩)/√3
    ("superpos-134", [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]),
    // (|1⟩ + |2⟩ + |3⟩ − |4⟩)/2, the fidelity-floor demo
    ("fidelity-floor", [1.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ChannelArg {
    OneQubitA,
    OneQubitB,
    TwoQubitLocal,
    Collective,
    FullTwelve,
}

impl From<ChannelArg> for ChannelKind {
    fn from(value: ChannelArg) -> Self {
        match value {
            ChannelArg::OneQubitA => ChannelKind::OneQubitA,
            ChannelArg::OneQubitB => ChannelKind::OneQubitB,
            ChannelArg::TwoQubitLocal => ChannelKind::TwoQubitLocal,
            ChannelArg::Collective => ChannelKind::Collective,
            ChannelArg::FullTwelve => ChannelKind::FullTwelve,
        }
    }
}

fn parse_channel(name: &str) -> Result<ChannelKind, String> {
    match name {
        "one-qubit-a" => Ok(ChannelKind::OneQubitA),
        "one-qubit-b" => Ok(ChannelKind::OneQubitB),
        "two-qubit-local" => Ok(ChannelKind::TwoQubitLocal),
        "collective" => Ok(ChannelKind::Collective),
        "full-twelve" => Ok(ChannelKind::FullTwelve),
        other => Err(format!(
            "unknown channel {other:?}; expected one-qubit-a, one-qubit-b, two-qubit-local, collective or full-twelve"
        )),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    channel: Option<String>,
    rates: Option<FileRates>,
    initial: Option<InitialSpec>,
    grid: Option<FileGrid>,
    epsilon: Option<f64>,
    oracle: Option<FileOracle>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRates {
    gamma: Option<f64>,
    gamma_a: Option<f64>,
    gamma_b: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGrid {
    t_min: Option<f64>,
    t_max: Option<f64>,
    points: Option<usize>,
    spacing: Option<Spacing>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileOracle {
    enabled: Option<bool>,
    n: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum InitialSpec {
    Preset(String),
    Amplitudes { amplitudes: [[f64; 2]; 4] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Time grid, `points` values from `t_min` to `t_max` inclusive.
#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn times(&self) -> Vec<f64> {
        let steps = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| match self.spacing {
                Spacing::Linear => self.t_min + (self.t_max - self.t_min) * k as f64 / steps,
                Spacing::Log => self.t_min * (self.t_max / self.t_min).powf(k as f64 / steps),
            })
            .collect()
    }
}

/// Monte Carlo validation settings.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub enabled: bool,
    pub n: usize,
    pub seed: u64,
}

/// Fully resolved experiment: config file values overridden by flags, with
/// documented defaults backfilling the rest.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub channel: ChannelKind,
    pub rates: NoiseRates,
    pub initial: PureState,
    /// True when the state came from the user rather than the default.
    pub initial_explicit: bool,
    pub grid: Grid,
    pub epsilon: f64,
    pub oracle: OracleConfig,
}

/// Flag-level overrides; every field is optional and wins over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub channel: Option<ChannelKind>,
    pub gamma: Option<f64>,
    pub gamma_a: Option<f64>,
    pub gamma_b: Option<f64>,
    pub state: Option<String>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub log: bool,
    pub epsilon: Option<f64>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
}

/// Looks up a preset or parses eight comma-separated numbers
/// (re1,im1,…,re4,im4); explicit amplitudes are normalised.
pub fn parse_state(spec: &str) -> Result<PureState, String> {
    for (name, amps) in PRESETS {
        if spec == name {
            return state_from_pairs(amps);
        }
    }
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 8 {
        return Err(format!(
            "state {spec:?} is neither a preset ({}) nor 8 comma-separated re,im values",
            PRESETS.map(|(n, _)| n).join(", ")
        ));
    }
    let mut values = [0.0f64; 8];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad amplitude component {part:?}: {e}"))?;
    }
    state_from_pairs(values)
}

fn state_from_pairs(pairs: [f64; 8]) -> Result<PureState, String> {
    let mut amps = [Complex64::ZERO; 4];
    let mut norm_sq = 0.0;
    for (a, p) in amps.iter_mut().zip(pairs.chunks(2)) {
        *a = Complex64::new(p[0], p[1]);
        norm_sq += a.norm_sqr();
    }
    if !norm_sq.is_finite() || norm_sq == 0.0 {
        return Err("state amplitudes must be finite and not all zero".into());
    }
    let norm = norm_sq.sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    PureState::new(amps).map_err(|e| e.to_string())
}

/// Loads the config file (if any), applies the overrides and validates the
/// combined experiment.
pub fn resolve(config_path: Option<&Path>, overrides: &Overrides) -> Result<Experiment, String> {
    let file: FileConfig = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("bad config {}: {e}", path.display()))?
        }
        None => FileConfig {
            channel: None,
            rates: None,
            initial: None,
            grid: None,
            epsilon: None,
            oracle: None,
        },
    };

    let channel = match overrides.channel {
        Some(kind) => kind,
        None => match &file.channel {
            Some(name) => parse_channel(name)?,
            None => ChannelKind::TwoQubitLocal,
        },
    };

    let file_rates = file.rates.unwrap_or(FileRates {
        gamma: None,
        gamma_a: None,
        gamma_b: None,
    });
    let rates = NoiseRates::new(
        overrides.gamma.or(file_rates.gamma).unwrap_or(0.0),
        overrides.gamma_a.or(file_rates.gamma_a).unwrap_or(0.0),
        overrides.gamma_b.or(file_rates.gamma_b).unwrap_or(0.0),
    )
    .map_err(|e| e.to_string())?;

    let (initial, initial_explicit) = match (&overrides.state, &file.initial) {
        (Some(spec), _) => (parse_state(spec)?, true),
        (None, Some(InitialSpec::Preset(name))) => (parse_state(name)?, true),
        (None, Some(InitialSpec::Amplitudes { amplitudes })) => {
            let flat = [
                amplitudes[0][0],
                amplitudes[0][1],
                amplitudes[1][0],
                amplitudes[1][1],
                amplitudes[2][0],
                amplitudes[2][1],
                amplitudes[3][0],
                amplitudes[3][1],
            ];
            (state_from_pairs(flat)?, true)
        }
        (None, None) => (parse_state("bell-phi-plus")?, false),
    };

    let file_grid = file.grid.unwrap_or(FileGrid {
        t_min: None,
        t_max: None,
        points: None,
        spacing: None,
    });
    let spacing = if overrides.log {
        Spacing::Log
    } else {
        file_grid.spacing.unwrap_or(Spacing::Linear)
    };
    let t_min = file_grid.t_min.unwrap_or(match spacing {
        Spacing::Linear => 0.0,
        Spacing::Log => 1e-3,
    });
    let grid = Grid {
        t_min,
        t_max: overrides.t_max.or(file_grid.t_max).unwrap_or(5.0),
        points: overrides.points.or(file_grid.points).unwrap_or(101),
        spacing,
    };
    if !grid.t_min.is_finite() || grid.t_min < 0.0 {
        return Err(format!("t_min must be ≥ 0, got {}", grid.t_min));
    }
    if !grid.t_max.is_finite() || grid.t_min >= grid.t_max {
        return Err(format!(
            "grid needs t_min < t_max, got [{}, {}]",
            grid.t_min, grid.t_max
        ));
    }
    if grid.points < 2 {
        return Err(format!("grid needs at least 2 points, got {}", grid.points));
    }
    if grid.spacing == Spacing::Log && grid.t_min == 0.0 {
        return Err("log spacing requires t_min > 0".into());
    }

    let epsilon = overrides.epsilon.or(file.epsilon).unwrap_or(1e-6);
    if !(epsilon > 0.0 && epsilon <= 0.1) {
        return Err(format!("epsilon must lie in (0, 0.1], got {epsilon}"));
    }

    let file_oracle = file.oracle.unwrap_or(FileOracle {
        enabled: None,
        n: None,
        seed: None,
    });
    let oracle = OracleConfig {
        enabled: file_oracle.enabled.unwrap_or(true),
        n: overrides.n.or(file_oracle.n).unwrap_or(100_000),
        seed: overrides.seed.or(file_oracle.seed).unwrap_or(1),
    };

    Ok(Experiment {
        channel,
        rates,
        initial,
        initial_explicit,
        grid,
        epsilon,
        oracle,
    })
}
