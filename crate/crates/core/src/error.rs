//! Error type shared by all modules.

use thiserror::Error;

/// Everything that can go wrong while building instances or computing norms.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument is out of its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An index points outside the declared ground sets.
    #[error("index out of range: {0}")]
    Index(String),

    /// A type invariant does not hold (weights, metric axioms, shapes).
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// The domination LP is infeasible: the summing norm is infinite.
    #[error("instance is not summable at this exponent: {0}")]
    NotSummable(String),

    /// The mixing constant is infinite on this instance.
    #[error("instance is not mixing: {0}")]
    NotMixing(String),

    /// Every sampled family was degenerate (zero denominator).
    #[error("degenerate instance: {0}")]
    Degenerate(String),

    /// A dual vector with no positive entry cannot produce a witness family.
    #[error("empty dual witness")]
    EmptyWitness,

    /// The simplex method hit its iteration cap.
    #[error("lp solver failure after {iterations} iterations: {detail}")]
    SolverFailure { iterations: usize, detail: String },

    /// An iterative optimizer stopped above its gap target.
    #[error("optimization did not converge: best value {best}, remaining gap {gap}")]
    Convergence { best: f64, gap: f64 },

    /// A two-layer precondition fails; carries the worst offending entry.
    #[error("condition `{condition}` violated by {violation:.6e} at index {index:?}")]
    ConditionViolated {
        condition: &'static str,
        violation: f64,
        index: Vec<usize>,
    },

    /// Instance data does not match a declared side model.
    #[error("model mismatch: {0}")]
    Model(String),

    /// A file field has the wrong shape or is missing.
    #[error("schema error in field `{field}`: {message}")]
    Schema { field: String, message: String },

    /// The input is not valid JSON at all.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI. 0 is success, 1 is reserved for
    /// property failures reported by the verify suite.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Parameter(_) => 2,
            Error::Schema { .. } => 3,
            Error::Invariant(_)
            | Error::Index(_)
            | Error::Model(_)
            | Error::ConditionViolated { .. } => 4,
            Error::SolverFailure { .. }
            | Error::Convergence { .. }
            | Error::NotSummable(_)
            | Error::NotMixing(_)
            | Error::Degenerate(_)
            | Error::EmptyWitness => 5,
            Error::Io(_) => 2,
        }
    }
}
