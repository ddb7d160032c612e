#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperpoincare::report::{emit, Cell, Format, PayloadKind, ReportEnvelope, Table};
use hyperpoincare::{Error, InequalityKind, Params};

mod commands;

/// Numerical checks of improved L^p-Poincaré inequalities on hyperbolic space.
#[derive(Debug, Parser)]
#[command(name = "hyperpoincare", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, default_value = "csv")]
    format: FormatArg,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "UPPER")]
enum KindArg {
    Pgap,
    Prop11,
    Thm23,
    Thm25,
    Cor27,
    Thm29,
    Thm32,
    Thm72,
    Hardy1d,
}

impl From<KindArg> for InequalityKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Pgap => InequalityKind::Pgap,
            KindArg::Prop11 => InequalityKind::Prop11,
            KindArg::Thm23 => InequalityKind::Thm23,
            KindArg::Thm25 => InequalityKind::Thm25,
            KindArg::Cor27 => InequalityKind::Cor27,
            KindArg::Thm29 => InequalityKind::Thm29,
            KindArg::Thm32 => InequalityKind::Thm32,
            KindArg::Thm72 => InequalityKind::Thm72,
            KindArg::Hardy1d => InequalityKind::Hardy1d,
        }
    }
}

#[derive(Debug, Clone, Copy, Args)]
struct ParamArgs {
    /// Dimension of the hyperbolic space.
    #[arg(long = "N", value_name = "N")]
    n: u32,
    /// Exponent.
    #[arg(long)]
    p: f64,
}

impl ParamArgs {
    fn params(&self) -> hyperpoincare::Result<Params> {
        Params::new(self.n, self.p)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sharp constants, remainder constant and a brute-force cross-check.
    Constants {
        #[command(flatten)]
        params: ParamArgs,
        /// Grid size of the brute-force optimizer.
        #[arg(long, default_value_t = 20_000)]
        grid: usize,
    },
    /// Sample W, H_p and V on equally spaced radii.
    Weights {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 10.0)]
        r_max: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// The radius r_0 where H_p peaks and the critical radius r_p.
    Rp {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// r_p and its slopes along a list of N (fixed p) or of p (fixed N).
    RpScan {
        #[arg(
            long = "N",
            value_name = "N",
            conflicts_with = "n_values",
            requires = "p_values"
        )]
        n: Option<u32>,
        #[arg(long, conflicts_with = "p_values", requires = "n_values")]
        p: Option<f64>,
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',')]
        n_values: Vec<u32>,
        /// Comma-separated exponents.
        #[arg(long, value_delimiter = ',')]
        p_values: Vec<f64>,
    },
    /// Check an inequality on a seeded batch of random test functions.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        /// Inequality tag (case-insensitive).
        #[arg(long, ignore_case = true)]
        kind: KindArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Let radial supports reach the origin.
        #[arg(long)]
        allow_origin: bool,
        /// Exponent of the HARDY1D quotient; random in (1, p) if absent.
        #[arg(long)]
        l: Option<f64>,
    },
    /// Quotients along the extremal families for a decreasing eps schedule.
    Sharpness {
        #[command(flatten)]
        params: ParamArgs,
        /// PGAP or HARDY1D.
        #[arg(long, ignore_case = true)]
        kind: KindArg,
        /// Comma-separated `eps` or `eps:delta` entries; delta defaults to eps.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
        schedule: Vec<String>,
        /// Exponent of the HARDY1D quotient; defaults to p.
        #[arg(long)]
        l: Option<f64>,
    },
    /// The curve y = H_p(r) with a final row marking r_p.
    Figure1 {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 15.0)]
        r_max: f64,
        #[arg(long, default_value_t = 1500)]
        samples: usize,
    },
    /// Elementary inequalities, F~ and supersolution identities.
    Proofcheck {
        #[command(flatten)]
        params: ParamArgs,
        /// Random samples for each elementary inequality.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constants { .. } => "constants",
            Command::Weights { .. } => "weights",
            Command::Rp { .. } => "rp",
            Command::RpScan { .. } => "rp-scan",
            Command::Verify { .. } => "verify",
            Command::Sharpness { .. } => "sharpness",
            Command::Figure1 { .. } => "figure1",
            Command::Proofcheck { .. } => "proofcheck",
        }
    }
}

/// Result of a subcommand: its envelope and whether every check passed.
pub struct Outcome {
    pub envelope: ReportEnvelope,
    pub pass: bool,
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("HYPERPOINCARE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| format!("HYPERPOINCARE_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn error_envelope(command: &str, params: Option<Params>, err: &Error) -> ReportEnvelope {
    let class = if err.is_hypothesis_violation() {
        "hypothesis"
    } else {
        "failure"
    };
    let mut table = Table::new(["error", "message"]);
    table
        .push(vec![Cell::from(class), Cell::from(err.to_string())])
        .expect("two cells");
    let mut env = ReportEnvelope::new(command, params, PayloadKind::Checks, table);
    env.diagnostics.push(err.to_string());
    env
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let format = Format::from(cli.format);
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let name = cli.command.name();

    let (envelope, code) = match commands::run(&cli) {
        Ok(mut out) => {
            out.envelope
                .diagnostics
                .insert(0, format!("args: {}", argv.join(" ")));
            (out.envelope, if out.pass { 0 } else { 1 })
        }
        Err((params, err)) => {
            eprintln!("error: {err}");
            let code = if err.is_hypothesis_violation() { 2 } else { 1 };
            let mut env = error_envelope(name, params, &err);
            env.diagnostics
                .insert(0, format!("args: {}", argv.join(" ")));
            (env, code)
        }
    };
    if let Err(e) = emit(&envelope, format, cli.output.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
