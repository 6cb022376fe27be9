use thiserror::Error;

/// Errors raised by the auction model, the learners and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of an operation (value not in [0,1], η ≤ 0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A vector that should lie in 𝒫 or 𝒱 violates the polytope by more than the tolerance.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// A chain polytope with no feasible point.
    #[error("infeasible polytope: {0}")]
    Infeasible(String),

    /// A bid index that is not on the grid.
    #[error("bid index {index} is outside the grid 0..={k}")]
    BidIndex { index: usize, k: usize },

    /// A fixed competing-bid sequence ran out before the horizon.
    #[error("fixed sequence exhausted at round {round} (length {len})")]
    SequenceExhausted { round: u64, len: usize },

    /// A request that the chosen component does not support.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Mini-grammar or configuration problems, all of them at once.
    #[error("{}", format_config_errors(.0))]
    Config(Vec<ConfigError>),

    /// A per-step potential inequality failed during a run.
    #[error("inequality violated: {0}")]
    Violation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One configuration problem, located by field path and (when known) line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: `{}`: {}", self.field, self.message),
            None => write!(f, "`{}`: {}", self.field, self.message),
        }
    }
}

fn format_config_errors(errors: &[ConfigError]) -> String {
    let mut out = format!("{} configuration error(s)", errors.len());
    for e in errors {
        out.push_str("\n  ");
        out.push_str(&e.to_string());
    }
    out
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invariant(msg: impl Into<String>) -> Error {
    Error::Invariant(msg.into())
}
