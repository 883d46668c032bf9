//! Command-line front end: time sweeps of entanglement and coherence under
//! the dephasing channels, Monte Carlo validation against the stochastic
//! fields, and the decay-timescale table.
//!
//! Exit codes: 0 success, 1 configuration error, 2 statistical validation
//! failure.

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use dephasing::metrics::off_diagonal_support;
use dephasing::state::Qubit;
use dephasing::{
    apply_closed_form, channel_params, concurrence, disentanglement_time, fidelity_pure,
    off_diagonal_pairs, oracle_report, pure_density, reduced_coherence, timescales, Crossing,
    Error as CoreError, Z_PASS,
};

use config::{resolve, ChannelArg, Overrides};

/// CSV header of the sweep output; byte-exact contract.
const SWEEP_HEADER: &str =
    "t,gamma_A,gamma_B,gamma,C,F,abs_sA12,abs_sB12,rho14_re,rho14_im,rho23_re,rho23_im";

#[derive(Parser)]
#[command(
    name = "dephasing",
    about = "Two-qubit dephasing channels: sweeps, timescales and Monte Carlo validation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the closed-form channel over a time grid and emit CSV rows.
    Evolve(RunArgs),
    /// Compare the Monte Carlo ensemble against the closed form at 5σ.
    Validate(RunArgs),
    /// Print the decay timescales and elementwise rates as JSON.
    Timescales(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Channel kind.
    #[arg(long, value_enum)]
    channel: Option<ChannelArg>,
    /// Collective dephasing rate Γ.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Local dephasing rate Γ_A.
    #[arg(long = "gamma-a", allow_negative_numbers = true)]
    gamma_a: Option<f64>,
    /// Local dephasing rate Γ_B.
    #[arg(long = "gamma-b", allow_negative_numbers = true)]
    gamma_b: Option<f64>,
    /// Initial state: a preset name or re1,im1,...,re4,im4 (normalised).
    #[arg(long, allow_hyphen_values = true)]
    state: Option<String>,
    /// Upper end of the time grid.
    #[arg(long = "t-max", allow_negative_numbers = true)]
    t_max: Option<f64>,
    /// Number of grid points (≥ 2).
    #[arg(long)]
    points: Option<usize>,
    /// Logarithmic grid spacing (requires t_min > 0).
    #[arg(long)]
    log: bool,
    /// Concurrence threshold for the disentanglement time, in (0, 0.1].
    #[arg(long)]
    epsilon: Option<f64>,
    /// Monte Carlo trajectories per grid point (validate only).
    #[arg(long)]
    n: Option<usize>,
    /// Base seed of the trajectory streams (validate only).
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary JSON path; stderr when omitted (evolve only).
    #[arg(long)]
    summary: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            channel: self.channel.map(Into::into),
            gamma: self.gamma,
            gamma_a: self.gamma_a,
            gamma_b: self.gamma_b,
            state: self.state.clone(),
            t_max: self.t_max,
            points: self.points,
            log: self.log,
            epsilon: self.epsilon,
            n: self.n,
            seed: self.seed,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            // Flag mistakes are configuration errors: exit 1, single line.
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("bad arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("error: {first}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Evolve(args) => cmd_evolve(&args),
        Command::Validate(args) => cmd_validate(&args),
        Command::Timescales(args) => cmd_timescales(&args),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {}", message.replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, String> {
    match path {
        Some(p) => {
            let file =
                File::create(p).map_err(|e| format!("cannot create {}: {e}", p.display()))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

/// Full round-trip precision: 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_time(v: f64) -> serde_json::Value {
    if v.is_infinite() {
        json!("inf")
    } else {
        json!(v)
    }
}

fn json_opt_time(v: Option<f64>) -> serde_json::Value {
    match v {
        None => json!("undefined"),
        Some(x) => json_time(x),
    }
}

fn cmd_evolve(args: &RunArgs) -> Result<ExitCode, String> {
    let exp = resolve(args.config.as_deref(), &args.overrides())?;
    let rho0 = pure_density(&exp.initial);
    let mut out = open_out(&args.out)?;
    let io_err = |e: std::io::Error| format!("write failed: {e}");

    writeln!(out, "{SWEEP_HEADER}").map_err(io_err)?;
    for t in exp.grid.times() {
        let params = channel_params(t, &exp.rates).map_err(|e| e.to_string())?;
        let rho_t = apply_closed_form(exp.channel, &params, &rho0).map_err(|e| e.to_string())?;
        let c = concurrence(&rho_t).map_err(|e| e.to_string())?.c;
        let f = fidelity_pure(&exp.initial, &rho_t).map_err(|e| e.to_string())?;
        let s_a = reduced_coherence(&rho_t, Qubit::A).map_err(|e| e.to_string())?;
        let s_b = reduced_coherence(&rho_t, Qubit::B).map_err(|e| e.to_string())?;
        let rho14 = rho_t.matrix().get(0, 3);
        let rho23 = rho_t.matrix().get(1, 2);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            num(t),
            num(params.gamma_a),
            num(params.gamma_b),
            num(params.gamma),
            num(c),
            num(f),
            num(s_a.norm()),
            num(s_b.norm()),
            num(rho14.re),
            num(rho14.im),
            num(rho23.re),
            num(rho23.im),
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;

    let support = off_diagonal_support(&rho0, 1e-12);
    let ts = timescales(&exp.rates, &support);
    let crossing = match disentanglement_time(exp.channel, &exp.rates, &exp.initial, exp.epsilon) {
        Ok(Crossing::At(t)) => json!(t),
        Ok(Crossing::Never) => json!("never"),
        Err(CoreError::BelowThreshold { .. }) => json!("undefined"),
        Err(CoreError::CrossingNotBracketed { .. }) => {
            eprintln!("warning: concurrence crossing lies beyond the search horizon");
            json!("undefined")
        }
        Err(e) => return Err(e.to_string()),
    };
    let summary = json!({
        "tau_A": json_time(ts.tau_a),
        "tau_B": json_time(ts.tau_b),
        "tau_e": json_opt_time(ts.tau_e),
        "tau": json_opt_time(ts.tau),
        "epsilon": exp.epsilon,
        "t_disentangle": crossing,
    });
    write_summary(&args.summary, &summary)?;
    Ok(ExitCode::SUCCESS)
}

fn write_summary(path: &Option<PathBuf>, summary: &serde_json::Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(summary).expect("serializable summary");
    match path {
        Some(p) => {
            std::fs::write(p, text + "\n").map_err(|e| format!("cannot write {}: {e}", p.display()))
        }
        None => {
            eprintln!("{text}");
            Ok(())
        }
    }
}

fn cmd_validate(args: &RunArgs) -> Result<ExitCode, String> {
    let exp = resolve(args.config.as_deref(), &args.overrides())?;
    if !exp.oracle.enabled {
        return Err("oracle disabled in config; enable it to run validate".into());
    }
    if exp.oracle.n < 1_000 {
        return Err(format!(
            "validate needs at least 1000 trajectories, got {}",
            exp.oracle.n
        ));
    }
    if exp.oracle.n < 10_000 {
        eprintln!(
            "warning: n = {} gives coarse statistics; occasional 5σ failures are expected at this size",
            exp.oracle.n
        );
    }

    let report = oracle_report(
        &exp.initial,
        &exp.rates,
        &exp.grid.times(),
        exp.oracle.n,
        exp.oracle.seed,
    )
    .map_err(|e| e.to_string())?;

    let mut out = open_out(&args.out)?;
    let io_err = |e: std::io::Error| format!("write failed: {e}");
    write!(out, "t").map_err(io_err)?;
    for (i, j) in element_labels() {
        write!(out, ",z_{i}{j}").map_err(io_err)?;
    }
    writeln!(out, ",max_z,C_mc,C_cf,pass").map_err(io_err)?;
    for row in &report.rows {
        write!(out, "{}", num(row.t)).map_err(io_err)?;
        for (i, j) in element_labels() {
            write!(
                out,
                ",{}",
                num(row.z[usize::from(i) - 1][usize::from(j) - 1])
            )
            .map_err(io_err)?;
        }
        writeln!(
            out,
            ",{},{},{},{}",
            num(row.max_z),
            num(row.c_mc),
            num(row.c_cf),
            u8::from(row.pass()),
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;

    if report.pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        let worst = report.worst_row().expect("non-empty report");
        eprintln!(
            "error: oracle mismatch at t = {}: element rho_{}{} has |z| = {:.2} > {Z_PASS}",
            worst.t, worst.worst_element.0, worst.worst_element.1, worst.max_z
        );
        Ok(ExitCode::from(2))
    }
}

fn element_labels() -> Vec<(u8, u8)> {
    let mut labels = Vec::with_capacity(10);
    for i in 1..=4u8 {
        for j in i..=4u8 {
            labels.push((i, j));
        }
    }
    labels
}

fn cmd_timescales(args: &RunArgs) -> Result<ExitCode, String> {
    let exp = resolve(args.config.as_deref(), &args.overrides())?;
    // Support comes from the configured state when one was given, otherwise
    // all six off-diagonal elements.
    let support = if exp.initial_explicit {
        off_diagonal_support(&pure_density(&exp.initial), 1e-12)
    } else {
        off_diagonal_pairs().to_vec()
    };
    let ts = timescales(&exp.rates, &support);

    let mut gamma_ij = serde_json::Map::new();
    for ((i, j), rate) in ts.gamma_ij {
        gamma_ij.insert(format!("{}{}", i.label(), j.label()), json!(rate));
    }
    let support_labels: Vec<String> = support
        .iter()
        .map(|(i, j)| format!("{}{}", i.label(), j.label()))
        .collect();
    let summary = json!({
        "tau_A": json_time(ts.tau_a),
        "tau_B": json_time(ts.tau_b),
        "tau_e": json_opt_time(ts.tau_e),
        "tau": json_opt_time(ts.tau),
        "Gamma_ij": gamma_ij,
        "support": support_labels,
    });
    let mut out = open_out(&args.out)?;
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&summary).expect("serializable")
    )
    .map_err(|e| format!("write failed: {e}"))?;
    out.flush().map_err(|e| format!("write failed: {e}"))?;
    Ok(ExitCode::SUCCESS)
}
