//! `holonomy-lab`: batch driver around `holonomy_core`.
//!
//! Reads one JSON config, runs a subcommand on a rayon pool of the requested
//! size and writes JSON (plus CSV where tabular) with 17 significant digits.
//! Results are gathered in input order, so outputs do not depend on the
//! thread count.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use holonomy_core::word::Word;

pub use commands::{cmd_checks, cmd_compare, cmd_enumerate, cmd_parry, cmd_trace_map, CompareInput, Context};
pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "holonomy-lab", version, about = "Holonomy and trace-map experiments on hyperbolic surfaces")]
pub struct Cli {
    #[arg(long, global = true, default_value = "lab.json")]
    pub config: PathBuf,
    /// Output directory; results go to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "HOLONOMY_LAB_THREADS")]
    pub threads: Option<usize>,
    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Replace integrated holonomies by matrix products (flat connections).
    #[arg(long, global = true)]
    pub oracle: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Primitive conjugacy classes up to `run.max_word_len`.
    Enumerate,
    /// Primitive trace map of a named connection.
    TraceMap { connection: String },
    /// Trace-equivalence of two connections, or of two trace-map files.
    Compare {
        first: String,
        second: String,
        /// Treat the arguments as trace-map JSON files.
        #[arg(long)]
        files: bool,
    },
    /// Homoclinic orbits, Parry approximants and their character table.
    Parry {
        connection: String,
        /// Overrides `parry.reference`.
        #[arg(long)]
        reference: Option<Word>,
        /// Comma-separated labels; overrides `parry.labels`.
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<Word>>,
    },
    /// Ambrose–Singer, mixed-connection and spiral batteries.
    Checks {
        /// Divide every residual tolerance by this factor.
        #[arg(long, default_value_t = 1.0)]
        tighten: f64,
    },
}

/// Loads the config, applies flag overrides and runs the subcommand.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let mut config = RunConfig::load(&cli.config)?;
    if let Some(s) = cli.seed {
        config.run.seed = s;
    }
    let threads = cli.threads.or(config.run.threads);
    if threads == Some(0) {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let ctx = Context::new(config, cli.out.clone())?;
    pool.install(|| dispatch(&ctx, cli))
}

fn dispatch(ctx: &Context, cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Enumerate => {
            let t = cmd_enumerate(ctx)?;
            Ok(format!("{} classes up to length {}", t.classes.len(), t.max_word_len))
        }
        Command::TraceMap { connection } => {
            let t = cmd_trace_map(ctx, connection, cli.oracle)?;
            Ok(format!("{} traces for {connection} ({})", t.classes.len(), t.source))
        }
        Command::Compare { first, second, files } => {
            let input = if *files {
                CompareInput::Files(first.into(), second.into())
            } else {
                CompareInput::Connections(first.clone(), second.clone())
            };
            let r = cmd_compare(ctx, &input)?;
            Ok(format!("equivalent over {} classes, max deviation {:e}", r.compared, r.max_abs_deviation))
        }
        Command::Parry { connection, reference, labels } => {
            let p = &ctx.config.parry;
            let reference = reference.clone().unwrap_or_else(|| p.reference.clone());
            let labels = labels.clone().unwrap_or_else(|| p.labels.clone());
            let r = cmd_parry(ctx, connection, &reference, &labels)?;
            let degenerate = r.labels.iter().filter(|l| l.degenerate).count();
            Ok(format!("{} labels ({degenerate} degenerate), {} character entries", r.labels.len(), r.character_table.len()))
        }
        Command::Checks { tighten } => {
            let r = cmd_checks(ctx, *tighten)?;
            Ok(format!("{} checks passed", r.rows.len()))
        }
    }
}
