//! Batch front end: one subcommand per run mode, CSV artifacts out.
//!
//! Exit codes: 0 success, 1 configuration error (including a verb that does
//! not match the config's mode), 2 total computational failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qsl::config::{parse_config, run, Mode, RunConfig};

#[derive(Parser)]
#[command(name = "qsl", version, about = "Coupled quantum oscillator batch runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; overrides `output_path` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available execution units).
    #[arg(long)]
    threads: Option<usize>,
    /// Base random seed; overrides the config's `sde.base_seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Classical attractor sweep.
    ClassicalScan(RunArgs),
    /// Single quantum steady state.
    QuantumSteady(RunArgs),
    /// Quantum steady-state sweep (one or two parameters).
    QuantumSweep(RunArgs),
    /// Wigner field of one steady state.
    WignerExport(RunArgs),
    /// Stochastic ensemble amplitudes.
    SdeEnsemble(RunArgs),
    /// Negativity and Renyi entropy sweep.
    EntanglementSweep(RunArgs),
}

impl Command {
    fn mode(&self) -> Mode {
        match self {
            Command::ClassicalScan(_) => Mode::ClassicalScan,
            Command::QuantumSteady(_) => Mode::QuantumSteady,
            Command::QuantumSweep(_) => Mode::QuantumSweep,
            Command::WignerExport(_) => Mode::WignerExport,
            Command::SdeEnsemble(_) => Mode::SdeEnsemble,
            Command::EntanglementSweep(_) => Mode::EntanglementSweep,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::ClassicalScan(a)
            | Command::QuantumSteady(a)
            | Command::QuantumSweep(a)
            | Command::WignerExport(a)
            | Command::SdeEnsemble(a)
            | Command::EntanglementSweep(a) => a,
        }
    }
}

fn load_config(args: &RunArgs, verb_mode: Mode) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let mut config = parse_config(&text).map_err(|e| e.to_string())?;
    if config.mode != verb_mode {
        return Err(format!(
            "config mode is {} but the {} verb was invoked",
            config.mode.label(),
            verb_mode.label()
        ));
    }
    if let Some(seed) = args.seed {
        config.override_seed(seed);
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = cli.command.args();
    let config = match load_config(args, cli.command.mode()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("qsl: configuration error: {msg}");
            return ExitCode::from(1);
        }
    };
    let out_path = match args.out.clone().or_else(|| config.output_path.clone().map(PathBuf::from))
    {
        Some(p) => p,
        None => {
            eprintln!("qsl: configuration error: no output path (set output_path or pass --out)");
            return ExitCode::from(1);
        }
    };
    if let Some(threads) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("qsl: cannot configure {threads} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&config, &out_path) {
        Ok(summary) if summary.total_failure() => {
            eprintln!("qsl: every point failed; see the errors column in {}", out_path.display());
            ExitCode::from(2)
        }
        Ok(summary) => {
            if summary.failed_rows > 0 {
                eprintln!(
                    "qsl: {}/{} points failed; see the errors column",
                    summary.failed_rows, summary.rows
                );
            }
            println!("qsl: wrote {} rows to {}", summary.rows, out_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qsl: run failed: {e}");
            ExitCode::from(2)
        }
    }
}
