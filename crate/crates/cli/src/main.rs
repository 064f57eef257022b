//! `canvdw`: decide, count and estimate van der Waerden-type properties of
//! integer sets from the shell.
//!
//! Exit codes: 0 property holds / success, 1 property fails, 2 search budget
//! exhausted, 3 non-monotone or missing threshold crossing, 4 replay
//! mismatch, 64 usage error, 65 malformed input file, 74 I/O error.

mod commands;
mod ingest;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_USAGE: u8 = 64;
pub const EXIT_INGEST: u8 = 65;
pub const EXIT_IO: u8 = 74;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn ingest(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INGEST,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<canvdw::Error> for CliError {
    fn from(e: canvdw::Error) -> Self {
        use canvdw::Error;
        let code = match e {
            Error::InvalidParameter(_) => EXIT_USAGE,
            Error::Precondition(_) => EXIT_INGEST,
            Error::BudgetExhausted { .. } => 2,
            Error::NoCrossing { .. } | Error::NonMonotone { .. } => 3,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "canvdw",
    version,
    about = "Van der Waerden-type properties of integer sets"
)]
pub struct Cli {
    /// Directory that receives one subdirectory per run.
    #[arg(long, global = true, env = "CANVDW_RUNS_DIR", default_value = "runs")]
    runs_dir: PathBuf,
    /// Do not write a run directory.
    #[arg(long, global = true)]
    no_record: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DecideProperty {
    Canvdw,
    Rkvdw,
    Alpharb,
    Alphasz,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LabProperty {
    Canvdw,
    Rkvdw,
    Alpharb,
    Alphasz,
    Girth,
    Size,
}

/// Parameters shared by the properties; each property reads the ones it needs.
#[derive(Debug, Args)]
pub struct PropertyParams {
    /// Progression length.
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    /// Number of colours for rkvdw.
    #[arg(long)]
    pub r: Option<u32>,
    /// Density for alpharb and alphasz, as `a/b` or a decimal.
    #[arg(long)]
    pub alpha: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a colouring property of a set; writes a certificate when it fails.
    Decide {
        /// `a..b`, a comma list, or a file.
        #[arg(long)]
        set: String,
        #[arg(long, value_enum)]
        property: DecideProperty,
        #[command(flatten)]
        params: PropertyParams,
        /// Maximum number of search nodes.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Count k-APs in `[n]` or a set, or classify them under a colouring.
    Count {
        #[arg(long, conflicts_with = "set")]
        n: Option<u32>,
        #[arg(long)]
        set: Option<String>,
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Restricted-growth colouring, inline (`[0,0,1]`) or a file.
        #[arg(long)]
        colouring: Option<String>,
    },
    /// Girth of the k-AP hypergraph of a set.
    Girth {
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// List the minimal cycles and check their spans.
        #[arg(long)]
        enumerate: bool,
        /// Longest cycle to enumerate.
        #[arg(long, default_value_t = 5)]
        lmax: u32,
        /// Most cycles written to cycles.json; the rest are only counted.
        #[arg(long, default_value_t = 1000)]
        list_limit: usize,
        /// Maximum number of enumeration steps.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Estimate where the probability that `[n]_p` has a property crosses a target.
    Threshold {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum)]
        property: LabProperty,
        #[command(flatten)]
        params: PropertyParams,
        /// Girth lower bound for the girth property.
        #[arg(long)]
        g: Option<u32>,
        /// Size lower bound for the size property.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0 / 128.0)]
        resolution: f64,
        #[arg(long, default_value_t = 0.5)]
        target: f64,
        /// Evaluate these probabilities instead of bisecting.
        #[arg(long)]
        grid: Option<String>,
        /// Maximum search nodes per trial.
        #[arg(long)]
        budget: Option<u64>,
        /// Stop each probe early, checking after every batch of this many trials.
        #[arg(long)]
        early_stop: Option<u64>,
    },
    /// Can-k-vdW thresholds across n, normalized by n^(1/(k-1)).
    Scaling {
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Comma-separated increasing list of n.
        #[arg(long)]
        ns: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0 / 128.0)]
        resolution: f64,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        early_stop: Option<u64>,
    },
    /// Sample `[n]_p` looking for a can-k-vdW set of large girth.
    Search {
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100)]
        attempts: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Degree statistics of the rainbow hypergraph on `[r] x [n]`.
    Rainbow {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long)]
        r: u32,
        /// Also write the hypergraph as `adjacency.json`.
        #[arg(long)]
        adjacency: bool,
    },
    /// Re-run a recorded invocation and compare its outputs.
    Replay {
        /// A `manifest.json` or the run directory holding it.
        manifest: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Decide { .. } => "decide",
            Command::Count { .. } => "count",
            Command::Girth { .. } => "girth",
            Command::Threshold { .. } => "threshold",
            Command::Scaling { .. } => "scaling",
            Command::Search { .. } => "search",
            Command::Rainbow { .. } => "rainbow",
            Command::Replay { .. } => "replay",
        }
    }
}

/// Result of a command before anything is written.
pub struct Outcome {
    pub exit: u8,
    pub stdout: String,
    pub artifacts: Vec<(String, Vec<u8>)>,
    pub details: serde_json::Value,
}

fn parse(args: &[String]) -> Result<Cli, ExitCode> {
    let argv = std::iter::once("canvdw".to_string()).chain(args.iter().cloned());
    Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        if e.use_stderr() {
            ExitCode::from(EXIT_USAGE)
        } else {
            ExitCode::SUCCESS
        }
    })
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match parse(&args) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    let started_at = chrono::Utc::now();
    let start = Instant::now();
    let command = cli.command.name();
    let result = match &cli.command {
        Command::Replay { manifest } => commands::replay(manifest),
        other => commands::execute(other),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return ExitCode::from(e.code);
        }
    };
    print!("{}", outcome.stdout);
    if !cli.no_record && command != "replay" {
        let manifest = record::Manifest {
            tool: "canvdw".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            args: record::replayable_args(&args),
            started_at: started_at.format("%Y-%m-%dT%H:%M:%S%.6fZ").to_string(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            exit_code: i32::from(outcome.exit),
            stdout_sha256: record::sha256_hex(outcome.stdout.as_bytes()),
            artifacts: outcome
                .artifacts
                .iter()
                .map(|(name, bytes)| record::ArtifactDigest {
                    name: name.clone(),
                    sha256: record::sha256_hex(bytes),
                })
                .collect(),
            details: outcome.details,
        };
        match record::write_run(&cli.runs_dir, &manifest, &outcome.artifacts) {
            Ok(dir) => eprintln!("run recorded in {}", dir.display()),
            Err(e) => {
                eprintln!("error: {}", e.message);
                return ExitCode::from(e.code);
            }
        }
    }
    ExitCode::from(outcome.exit)
}

/// Parses and executes recorded arguments without recording.
pub fn run_recorded(args: &[String]) -> Result<Outcome, CliError> {
    let argv = std::iter::once("canvdw".to_string()).chain(args.iter().cloned());
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| CliError::ingest(format!("recorded arguments do not parse: {e}")))?;
    match &cli.command {
        Command::Replay { .. } => Err(CliError::ingest(
            "a replay manifest cannot point at another replay",
        )),
        other => commands::execute(other),
    }
}
