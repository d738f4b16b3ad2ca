//! The `ncsim` command line: argument parsing, run logs and replay.
//!
//! Every run writes `run.jsonl` (a header with the full [`RunConfig`], then one
//! JSON record per line), `summary.json` and `timings.json` into the output
//! directory. All randomness derives from `--seed`.
//!
//! Exit codes: 0 success, 1 domain error or replay divergence, 2 usage error.

mod commands;
mod config;
mod log;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub use commands::{execute, load_catalogue_source, load_model, load_state, load_targets, Artifact, RunOutput};
pub use config::{CatalogueSource, Command, EngineKind, InteriorKind, RunConfig, DEFAULT_SEED, DEFAULT_SHOTS};
pub use log::{
    read_header, replay, write_run, Divergence, LogHeader, ReplayReport, Summary, Timings, FORMAT_VERSION, LOG_FILE,
    SUMMARY_FILE, TIMINGS_FILE,
};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default output directory when neither `--out` nor `NCSIM_OUT_DIR` is set.
pub const DEFAULT_OUT_DIR: &str = "ncsim-out";

#[derive(Debug, Parser)]
#[command(name = "ncsim", version, about = "Finite-precision non-contextual hidden-variable simulator")]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Args)]
pub struct Globals {
    /// Root seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Shots (or runs) for sampling commands.
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    /// Numeric tolerance for operator identities and input validation.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, env = "NCSIM_OUT_DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Kochen-Specker colourings of vector catalogues.
    #[command(subcommand)]
    Ks(KsCmd),
    /// Parity colouring of rational unit vectors.
    #[command(subcommand)]
    Gz(GzCmd),
    /// Finite sub-models.
    #[command(subcommand)]
    Ck(CkCmd),
    /// Black-box contextuality test.
    #[command(subcommand)]
    Sbz(SbzCmd),
    /// Scripted experiments.
    #[command(subcommand)]
    Exp(ExpCmd),
    /// Re-execute a run log and compare record streams.
    Replay { log: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum KsCmd {
    /// Validate a 0/1 colouring (JSON array) against a catalogue.
    Check { catalogue: String, colouring: PathBuf },
    /// Search for a colouring; reports uncolourable with a certificate.
    Search { catalogue: String },
}

#[derive(Debug, Subcommand)]
pub enum GzCmd {
    /// Colour one rational direction, given as three rationals like `3/5`.
    Colour {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    /// Check every rational orthogonal triad with bounded components.
    Verify {
        #[arg(long)]
        max_component: i64,
    },
}

#[derive(Debug, Subcommand)]
pub enum CkCmd {
    /// Build a sub-model from a targets file and write `model.json`.
    Build {
        #[arg(long)]
        targets: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Measure targets on fresh hidden states, one record per measurement.
    Run {
        #[arg(long)]
        targets: PathBuf,
        #[arg(long)]
        state: PathBuf,
        /// Use a saved model instead of building one from the targets.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Measure the targets in sequence with collapse, per shot.
        #[arg(long)]
        sequential: bool,
    },
    /// Construct and sample a beyond-precision witness.
    Breakdown {
        #[arg(long)]
        model: Option<PathBuf>,
        /// Precision of the default single-qubit model.
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum SbzCmd {
    Run {
        #[arg(long, value_enum)]
        interior: InteriorKind,
        /// Shipped catalogue name or path to a catalogue file.
        #[arg(long, default_value = "ceg-18-d4")]
        catalogue: String,
        #[arg(long, default_value_t = 10_000)]
        rounds: u64,
        /// Direction jitter in radians.
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        /// Precision of the sub-model inside a `ck` box.
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.999)]
        confidence: f64,
        /// Probability per round of classical cross-talk overriding the bits.
        #[arg(long, default_value_t = 0.0)]
        crosstalk: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExpCmd {
    Phiplus {
        #[arg(long, value_enum, default_value = "oracle")]
        engine: EngineKind,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        /// Precision of the sub-model for `--engine ck`.
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long)]
        hlzpg_reduced: bool,
    },
}

fn catalogue_source(arg: &str) -> std::io::Result<CatalogueSource> {
    let path = Path::new(arg);
    if path.exists() {
        Ok(CatalogueSource::File(path.canonicalize()?))
    } else {
        Ok(CatalogueSource::Builtin(arg.to_string()))
    }
}

fn absolute(p: &Path) -> std::io::Result<PathBuf> {
    p.canonicalize().or_else(|_| std::env::current_dir().map(|d| d.join(p)))
}

/// Builds the persisted configuration for a non-replay command.
pub fn to_config(globals: &Globals, cmd: Cmd) -> std::io::Result<RunConfig> {
    let command = match cmd {
        Cmd::Ks(KsCmd::Check { catalogue, colouring }) => {
            Command::KsCheck { catalogue: catalogue_source(&catalogue)?, colouring: absolute(&colouring)? }
        }
        Cmd::Ks(KsCmd::Search { catalogue }) => Command::KsSearch { catalogue: catalogue_source(&catalogue)? },
        Cmd::Gz(GzCmd::Colour { x, y, z }) => Command::GzColour { components: [x, y, z] },
        Cmd::Gz(GzCmd::Verify { max_component }) => Command::GzVerify { max_component },
        Cmd::Ck(CkCmd::Build { targets, epsilon, copies }) => {
            Command::CkBuild { targets: absolute(&targets)?, epsilon, copies }
        }
        Cmd::Ck(CkCmd::Run { targets, state, model, epsilon, sequential }) => Command::CkRun {
            targets: absolute(&targets)?,
            state: absolute(&state)?,
            model: model.as_deref().map(absolute).transpose()?,
            epsilon,
            sequential,
        },
        Cmd::Ck(CkCmd::Breakdown { model, epsilon }) => {
            Command::CkBreakdown { model: model.as_deref().map(absolute).transpose()?, epsilon }
        }
        Cmd::Sbz(SbzCmd::Run { interior, catalogue, rounds, jitter, epsilon, confidence, crosstalk }) => {
            Command::SbzRun {
                interior,
                catalogue: catalogue_source(&catalogue)?,
                rounds,
                jitter,
                epsilon,
                confidence,
                crosstalk,
            }
        }
        Cmd::Exp(ExpCmd::Phiplus { engine, jitter, epsilon, hlzpg_reduced }) => {
            Command::ExpPhiplus { engine, jitter, epsilon, hlzpg_reduced }
        }
        Cmd::Replay { .. } => unreachable!("replay has no run config"),
    };
    Ok(RunConfig {
        seed: globals.seed.unwrap_or(DEFAULT_SEED),
        shots: globals.shots.unwrap_or(DEFAULT_SHOTS),
        tol: globals.tol.unwrap_or(crate::DEFAULT_TOL),
        command,
    })
}

fn emit<T: serde::Serialize>(value: &T) {
    let mut out = std::io::stdout().lock();
    // A closed pipe is not an error for a command whose files are already written.
    if serde_json::to_writer_pretty(&mut out, value).is_ok() {
        let _ = writeln!(out);
    }
}

fn report_error(e: &Error) -> i32 {
    eprintln!("error: {e}");
    if e.is_domain() {
        EXIT_DOMAIN
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let Cli { globals, command } = cli;
    if let Cmd::Replay { log } = &command {
        if globals.seed.is_some() || globals.shots.is_some() || globals.tol.is_some() {
            eprintln!("error: replay re-executes the configuration embedded in the log; --seed, --shots and --tol overrides are refused");
            return EXIT_USAGE;
        }
        return match replay(log) {
            Ok(r) => {
                emit(&r);
                if r.identical() {
                    EXIT_OK
                } else {
                    let d = r.first_divergence.as_ref().expect("divergent");
                    eprintln!("replay diverged at line {} of {}", d.line, log.display());
                    EXIT_DOMAIN
                }
            }
            Err(e) => report_error(&e),
        };
    }
    if globals.tol.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
        eprintln!("error: --tol must be a positive number");
        return EXIT_USAGE;
    }
    let out_dir = globals.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let config = match to_config(&globals, command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_DOMAIN;
        }
    };
    let start = Instant::now();
    let output = match execute(&config) {
        Ok(o) => o,
        Err(e) => return report_error(&e),
    };
    if let Err(e) = write_run(&out_dir, &config, &output, start.elapsed()) {
        return report_error(&e);
    }
    emit(&output.summary);
    EXIT_OK
}
