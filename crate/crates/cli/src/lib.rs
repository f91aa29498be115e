//! Scenario-driven front end for the `warped-fields` engine.
//!
//! Exit status: 0 on success, 2 for configuration errors (unreadable or
//! invalid scenario, refused request), 3 for numeric failures (a quadrature
//! that cannot be resolved, a cross-check row outside its budget), 1 for I/O.

pub mod commands;
pub mod output;
pub mod scenario;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use warped_fields::wick::BlockLayout;

pub use scenario::Scenario;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "warped", version, about = "Modular-flow limits of deformed free-field correlators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Limit report per κ: per-type series, total, target and residual over t.
    Limits(CommonArgs),
    /// Wick pipeline against the brute-force Fock oracle (N ≤ 6).
    CrossCheck(CommonArgs),
    /// Pair partitions of a block layout with their contraction types.
    Partitions(PartitionArgs),
    /// ω(AB) − ω(A)ω(B) for wedge-localized monomials, scanned over offsets.
    ProductDefect(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Directory for CSV and JSON outputs; nothing is written without it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "WARPED_THREADS")]
    pub threads: Option<usize>,
    /// Overrides `quad.points_per_dim`.
    #[arg(long)]
    pub quad_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// `a,n,m,b`; taken from the scenario when absent.
    #[arg(long, conflicts_with = "scenario")]
    pub layout: Option<String>,
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "WARPED_THREADS")]
    pub threads: Option<usize>,
    #[arg(long)]
    pub quad_points: Option<usize>,
}

fn init_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn report_written(paths: &[PathBuf]) -> String {
    paths.iter().map(|p| format!("wrote {}\n", p.display())).collect()
}

/// Runs one command and returns what it prints on success.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Limits(args) => {
            init_threads(args.threads)?;
            let scn = Scenario::load(&args.scenario)?;
            let quad = scn.quadrature(args.quad_points);
            let reports = commands::limits(&scn, &quad)?;
            let mut s = commands::limits_summary(&reports);
            if let Some(out) = &args.out {
                s += &report_written(&commands::write_limits(out, &scn, &reports)?);
            }
            Ok(s)
        }
        Command::CrossCheck(args) => {
            init_threads(args.threads)?;
            let scn = Scenario::load(&args.scenario)?;
            let quad = scn.quadrature(args.quad_points);
            let rows = commands::cross_check(&scn, &quad)?;
            let mut s = commands::cross_check_table(&rows);
            if let Some(out) = &args.out {
                s += &report_written(&commands::write_cross_check(out, &scn, &rows)?);
            }
            let failed = rows.iter().filter(|r| r.verdict == commands::Verdict::Fail).count();
            if failed > 0 {
                return Err(CliError::Numeric(format!("{failed} cross-check rows outside their budget\n{s}")));
            }
            Ok(s)
        }
        Command::Partitions(args) => {
            init_threads(args.threads)?;
            let layout: BlockLayout = match (&args.layout, &args.scenario) {
                (Some(l), _) => l.parse().map_err(|e: warped_fields::wick::WickError| CliError::Config(e.to_string()))?,
                (None, Some(p)) => Scenario::load(p)?.layout()?,
                (None, None) => return Err(CliError::Config("partitions needs --layout or --scenario".into())),
            };
            let s = commands::partitions(&layout)?;
            if let Some(out) = &args.out {
                let file = out.join(format!("partitions_{}.txt", layout.to_string().replace(',', "_")));
                let written = output::write_atomic(out, vec![output::Staged::new(file, s.clone())])?;
                return Ok(s + &report_written(&written));
            }
            Ok(s)
        }
        Command::ProductDefect(args) => {
            init_threads(args.threads)?;
            let scn = Scenario::load(&args.scenario)?;
            let quad = scn.quadrature(args.quad_points);
            let outcomes = commands::product_defect(&scn, &quad)?;
            let mut s = commands::defect_summary(&outcomes);
            if let Some(out) = &args.out {
                s += &report_written(&commands::write_defect(out, &scn, &outcomes)?);
            }
            Ok(s)
        }
    }
}
