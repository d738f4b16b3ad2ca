use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("outcome {outcome} has probability {probability:e}; cannot condition on it")]
    ZeroProbability { outcome: usize, probability: f64 },

    #[error("outcome index {index} out of range for {len} outcomes")]
    OutcomeOutOfRange { index: usize, len: usize },

    #[error("operator {index} is not Hermitian")]
    NotHermitian { index: usize },

    #[error("value {value} assigned to operator {index} is not in its spectrum")]
    ValueOutsideSpectrum { index: usize, value: f64 },

    #[error("colouring is partial: vector {missing} has no value")]
    PartialColouring { missing: usize },

    #[error("invalid vector set: {0}")]
    InvalidVectorSet(String),

    #[error("not normalizable to a rational unit vector: {0}")]
    NotUnitNormalizable(String),

    #[error("invalid rational unit vector: {0}")]
    InvalidRationalVector(String),

    #[error("no decomposition in the sub-model lies within epsilon {epsilon} of the target (closest: {closest:e})")]
    NoMatch { epsilon: f64, closest: f64 },

    #[error("invalid sub-model: {0}")]
    InvalidSubModel(String),

    #[error("could not make perturbed decompositions projector-disjoint after {retries} retries")]
    DisjointnessFailure { retries: usize },

    #[error("degenerate knob setting: direction {0} requested more than once")]
    DegenerateSetting(usize),

    #[error("knob setting {0:?} is not a basis of the box's family")]
    SettingNotInFamily(Vec<usize>),

    #[error("triad family is KS-colourable; an SBZ verdict on it would be vacuous")]
    VacuousFamily,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{what} too large for exhaustive enumeration ({size} > {limit})")]
    TooLarge { what: &'static str, size: usize, limit: usize },

    #[error("invalid run log: {0}")]
    InvalidRunLog(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, err: serde_json::Error) -> Self {
        Error::Parse { path: path.into(), line: err.line(), column: err.column(), message: err.to_string() }
    }

    /// Domain errors map to exit code 1, everything else is reported as-is by the caller.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_))
    }
}
