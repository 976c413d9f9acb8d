//! `omit`: figure-reproduction sweeps, feasibility reports and oracle
//! cross-checks for OMIT dispersive spin readout.
//!
//! Exit codes: 0 on success, 1 when the run cannot start (bad configuration,
//! bad flags, unwritable output), 2 when some points failed or an oracle
//! check missed its tolerance. Partial results are still written.

mod artifacts;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "omit", version, about = "OMIT spin-readout sweeps and reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (`key = value`). Defaults to the built-in SiV example.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output CSV. Defaults to `<command>.csv` in the working directory.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Override a configuration key; applied after the file, last one wins.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Number of grid points of the swept variable.
    #[arg(long, global = true, value_name = "N")]
    points: Option<usize>,

    /// Worker threads for the sweep (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Relative tolerance of the measurement-time root finder.
    #[arg(long, global = true, value_name = "X")]
    tolerance: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Optimised measurement time versus χ/Γ_mech.
    #[command(name = "fig2")]
    Fig2,
    /// Added noise versus detection efficiency.
    #[command(name = "fig3")]
    Fig3,
    /// Measurement time versus χ/Γ_mech at n_th = 0, 1, 10.
    #[command(name = "figS1")]
    FigS1,
    /// Measurement time versus χ/Γ_mech under cooperativity caps.
    #[command(name = "figS2")]
    FigS2,
    /// SiV strain coupling along the tuned magnetic-field path.
    #[command(name = "figS5")]
    FigS5,
    /// Readout and QND feasibility figures at the configured point.
    #[command(name = "report")]
    Report,
    /// SNR and occupations versus integration time at the configured point.
    #[command(name = "snr-trace")]
    SnrTrace,
    /// Closed forms against the finite-κ oracles at the configured point.
    #[command(name = "oracle-check")]
    OracleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::FigS1 => "figS1",
            Command::FigS2 => "figS2",
            Command::FigS5 => "figS5",
            Command::Report => "report",
            Command::SnrTrace => "snr-trace",
            Command::OracleCheck => "oracle-check",
        }
    }

    fn default_points(self) -> usize {
        match self {
            Command::Fig2 | Command::FigS1 | Command::FigS2 => 60,
            Command::Fig3 => 100,
            Command::FigS5 | Command::SnrTrace => 200,
            Command::Report | Command::OracleCheck => 1,
        }
    }
}

/// Failure classes that map onto exit codes.
pub enum Failure {
    /// Nothing could be run.
    Setup(String),
    /// Output was written but is incomplete or a check failed.
    Partial(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Setup(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Partial(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let setup = artifacts::load(cli.config.as_deref(), &cli.set)?;
    for w in &setup.raw.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(cmd) = &setup.directives.command {
        if cmd != cli.command.name() {
            eprintln!("warning: config was recorded for `{cmd}`, running `{}`", cli.command.name());
        }
    }

    let points = cli.points.or(setup.directives.points).unwrap_or(cli.command.default_points());
    if points < 1 || (points < 2 && !matches!(cli.command, Command::Report | Command::OracleCheck)) {
        return Err(Failure::Setup(format!("--points must be at least 2, got {points}")));
    }
    let tolerance = cli.tolerance.or(setup.directives.tolerance).unwrap_or(omit_core::readout::DEFAULT_REL_TOL);
    if !(tolerance > 0.0 && tolerance < 1e-2) {
        return Err(Failure::Setup(format!("--tolerance must lie in (0, 1e-2), got {tolerance}")));
    }

    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", cli.command.name())));
    artifacts::check_output(&out)?;

    let ctx = commands::Context { run: &setup.run, points, tolerance };
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = cli.jobs {
            if j == 0 {
                return Err(Failure::Setup("--jobs must be at least 1".into()));
            }
            b = b.num_threads(j);
        }
        b.build().map_err(|e| Failure::Setup(format!("cannot start worker pool: {e}")))?
    };
    let outcome = pool.install(|| commands::execute(cli.command, &ctx));

    artifacts::write_csv(&out, &outcome.table)?;
    artifacts::write_meta(&out, cli.command, &setup.raw, points, tolerance)?;
    if let Some(script) = artifacts::gnuplot_script(cli.command, &out) {
        artifacts::write_sidecar(&out, "gp", &script)?;
    }
    for note in &outcome.notes {
        eprintln!("warning: {note}");
    }
    if let Some(text) = &outcome.stdout {
        print!("{text}");
    }
    match outcome.failure {
        None => Ok(()),
        Some(msg) => Err(Failure::Partial(msg)),
    }
}
