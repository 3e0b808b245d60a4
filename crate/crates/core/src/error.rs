use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("chart mismatch: {0}")]
    Chart(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular inverse at `{expr}` (reciprocal condition {rcond:e})")]
    Singularity { expr: String, rcond: f64 },

    #[error("bad assignment: {0}")]
    Assignment(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("spectrum outside the branch domain: {0}")]
    SpectrumOutsideDomain(String),

    #[error("ill-conditioned interpolation: {0}")]
    IllConditionedInterpolation(String),

    #[error("spectrum cannot be covered by a quarter-isolated simple set: {0}")]
    Clustering(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("matrix has no square root in the algebra it generates")]
    NoSquareRoot,

    #[error("polynomial is not symmetric under x <-> y (odd part has {0} terms)")]
    NotSymmetric(usize),

    #[error("random generation failed after {attempts} attempts: {what}")]
    Generation { what: String, attempts: usize },

    #[error("no admissible sample: {0}")]
    Domain(String),

    #[error("contradictory decompositions: {0}")]
    Contradiction(String),

    #[error("evaluator failed on sample {sample}: {msg}")]
    Evaluator { sample: usize, msg: String },

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("x/y and u/v letters cannot be mixed in one polynomial")]
    MixedChart,

    #[error("expression is not a Laurent polynomial: {0}")]
    NotLaurent(String),

    #[error("I/O: {0}")]
    Io(String),

    #[error("malformed JSON: {0}")]
    Json(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::MixedChart | Error::Json(_) => 3,
            Error::Dimension(_)
            | Error::Chart(_)
            | Error::Precondition(_)
            | Error::Assignment(_)
            | Error::SpectrumOutsideDomain(_)
            | Error::Clustering(_)
            | Error::Unsupported(_)
            | Error::NoSquareRoot
            | Error::NotSymmetric(_)
            | Error::NotLaurent(_)
            | Error::Io(_) => 2,
            Error::Singularity { .. }
            | Error::Inconclusive(_)
            | Error::Numerical(_)
            | Error::IllConditionedInterpolation(_)
            | Error::Generation { .. }
            | Error::Domain(_)
            | Error::Contradiction(_)
            | Error::Evaluator { .. } => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
