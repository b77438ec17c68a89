use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("networks disagree: {0}")]
    Mismatch(String),

    #[error("node {node} out of range 1..={n}")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0},{1})")]
    DuplicateEdge(usize, usize),

    #[error("containment violated: {0}")]
    Containment(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("covariate `{0}` not found")]
    MissingCovariate(String),

    #[error("invalid covariate `{name}`: {reason}")]
    InvalidCovariate { name: String, reason: String },

    #[error("invalid term `{term}`: {reason}")]
    InvalidTerm { term: String, reason: String },

    #[error("illegal toggle of ({0},{1}) for the {2} phase")]
    IllegalToggle(usize, usize, &'static str),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("model file line {line}: {reason}")]
    ModelSyntax { line: usize, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("constraint infeasible: {0}")]
    Infeasible(String),

    #[error("state space too large to enumerate: {free} free dyads (limit {limit})")]
    SpaceTooLarge { free: usize, limit: usize },

    #[error("degenerate statistic `{label}`: observed value {observed} is on the boundary of its achievable range")]
    Degenerate { label: String, observed: f64 },

    #[error("estimation did not converge within {0} iterations")]
    NotConverged(usize),

    #[error("information matrix is singular: {0}")]
    SingularInformation(String),

    #[error("not supported: {0}")]
    Unsupported(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            reason: reason.into(),
        }
    }

    /// True for errors caused by user input (files, model, flags) rather than
    /// by a failure of the numerical procedures.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Degenerate { .. }
                | Error::NotConverged(_)
                | Error::SingularInformation(_)
                | Error::Infeasible(_)
        )
    }
}
