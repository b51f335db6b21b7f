//! Command-line front door: builds the tables, runs the verification
//! suites, assembles constants, and drives the large weighted sums.
//!
//! Exit codes: 0 success, 1 verification/runtime failure, 2 usage or
//! configuration error, 3 resource cap.

mod config;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::RunConfig;
use pipeline::{CliError, Outcome};

#[derive(Parser)]
#[command(name = "symsum", version, about = "Weighted mean-square sums of symmetric-power eigenvalues: tables, identities, L-values, asymptotics")]
struct Cli {
    /// Flat key-value configuration file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (falls back to SYMSUM_OUT, then the config file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Machine-readable JSON on stdout instead of the human summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact tau table: binary cache plus CSV export.
    Tau {
        #[arg(long)]
        n: u64,
    },
    /// Symmetric-power coefficient table CSV.
    Sympow {
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        n: u64,
    },
    /// Six-square representation counts and divisor weights CSV.
    R6 {
        #[arg(long)]
        n: u64,
    },
    /// Run a verification suite; exit 1 on any failed invariant.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Evaluate a single L-value estimate.
    Lvalue {
        #[arg(long, value_enum)]
        kind: LvalueKind,
        /// Evaluation point (beta and sym kinds).
        #[arg(long, default_value_t = 3.0)]
        s: f64,
        /// Symmetric power (sym kind).
        #[arg(long, default_value_t = 2)]
        m: u32,
        /// Twist by the mod-4 character (sym kind).
        #[arg(long)]
        twist: bool,
    },
    /// Assemble the constant c(j) with factor provenance.
    Constant {
        #[arg(long)]
        j: Option<u32>,
        /// Prime cutoff for the Euler products.
        #[arg(long)]
        p: Option<u64>,
    },
    /// Accumulate the weighted sum S_j(x) and its decomposition.
    Sum {
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        x: Option<u64>,
        /// Comma-separated checkpoint list (default: dyadic).
        #[arg(long)]
        checkpoints: Option<String>,
    },
    /// Re-derive convergence diagnostics from a sum JSON artifact.
    Report {
        #[arg(long)]
        sum: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Hecke,
    R6,
    Factorization,
    Lvalues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LvalueKind {
    Beta,
    Sym,
    H,
    HTwisted,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome {
            verification_ok: true,
        }) => ExitCode::SUCCESS,
        Ok(Outcome {
            verification_ok: false,
        }) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text).map_err(CliError::usage)?
        }
        None => RunConfig::default(),
    };
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    } else if cli.config.is_none() {
        if let Ok(dir) = std::env::var("SYMSUM_OUT") {
            cfg.output_dir = PathBuf::from(dir);
        }
    }
    cfg.validate().map_err(CliError::usage)?;

    match cli.command {
        Command::Tau { n } => pipeline::cmd_tau(&cfg, n, cli.json),
        Command::Sympow { j, n } => pipeline::cmd_sympow(&cfg, j.unwrap_or(cfg.j), n, cli.json),
        Command::R6 { n } => pipeline::cmd_r6(&cfg, n, cli.json),
        Command::Verify { suite } => {
            let suites: &[&str] = match suite {
                Suite::All => &["hecke", "r6", "factorization", "lvalues"],
                Suite::Hecke => &["hecke"],
                Suite::R6 => &["r6"],
                Suite::Factorization => &["factorization"],
                Suite::Lvalues => &["lvalues"],
            };
            pipeline::cmd_verify(&cfg, suites, cli.json)
        }
        Command::Lvalue { kind, s, m, twist } => {
            let kind = match kind {
                LvalueKind::Beta => pipeline::LvalueRequest::Beta { s },
                LvalueKind::Sym => pipeline::LvalueRequest::Sym { m, s, twist },
                LvalueKind::H => pipeline::LvalueRequest::H { twisted: false },
                LvalueKind::HTwisted => pipeline::LvalueRequest::H { twisted: true },
            };
            pipeline::cmd_lvalue(&cfg, kind, cli.json)
        }
        Command::Constant { j, p } => pipeline::cmd_constant(
            &cfg,
            j.unwrap_or(cfg.j),
            p.unwrap_or(cfg.prime_cutoff),
            cli.json,
        ),
        Command::Sum { j, x, checkpoints } => {
            let cps = match checkpoints {
                Some(list) => Some(
                    list.split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| {
                            s.trim()
                                .parse::<u64>()
                                .map_err(|_| CliError::usage(format!("bad checkpoint `{s}`")))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                None => None,
            };
            pipeline::cmd_sum(&cfg, j.unwrap_or(cfg.j), x.unwrap_or(cfg.x), cps, cli.json)
        }
        Command::Report { sum } => pipeline::cmd_report(&sum, cli.json),
    }
}
