use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::DEFAULT_TOL;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SHOTS: u64 = 10_000;

/// Everything needed to re-execute a run bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub shots: u64,
    pub tol: f64,
    pub command: Command,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self { seed: DEFAULT_SEED, shots: DEFAULT_SHOTS, tol: DEFAULT_TOL, command }
    }
}

/// A catalogue given either as a shipped entry name or an absolute file path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CatalogueSource {
    Builtin(String),
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InteriorKind {
    Ck,
    Oracle,
    Toy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Oracle,
    Ck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    KsCheck {
        catalogue: CatalogueSource,
        colouring: PathBuf,
    },
    KsSearch {
        catalogue: CatalogueSource,
    },
    GzColour {
        components: [String; 3],
    },
    GzVerify {
        max_component: i64,
    },
    CkBuild {
        targets: PathBuf,
        epsilon: f64,
        copies: usize,
    },
    CkRun {
        targets: PathBuf,
        state: PathBuf,
        model: Option<PathBuf>,
        epsilon: f64,
        sequential: bool,
    },
    CkBreakdown {
        model: Option<PathBuf>,
        epsilon: f64,
    },
    SbzRun {
        interior: InteriorKind,
        catalogue: CatalogueSource,
        rounds: u64,
        jitter: f64,
        epsilon: f64,
        confidence: f64,
        crosstalk: f64,
    },
    ExpPhiplus {
        engine: EngineKind,
        jitter: f64,
        epsilon: f64,
        hlzpg_reduced: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::KsCheck { .. } => "ks-check",
            Command::KsSearch { .. } => "ks-search",
            Command::GzColour { .. } => "gz-colour",
            Command::GzVerify { .. } => "gz-verify",
            Command::CkBuild { .. } => "ck-build",
            Command::CkRun { .. } => "ck-run",
            Command::CkBreakdown { .. } => "ck-breakdown",
            Command::SbzRun { .. } => "sbz-run",
            Command::ExpPhiplus { .. } => "exp-phiplus",
        }
    }
}
