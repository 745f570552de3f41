use thiserror::Error;

/// Errors produced by belief, bound, and simulation computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The continued-fraction evaluation hit its iteration cap. Never
    /// silently truncated; callers must handle or propagate.
    #[error("continued fraction did not converge within {max_iterations} iterations")]
    Convergence { max_iterations: usize },

    /// A structurally invalid argument (bad scenario size, empty population,
    /// zero runs, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A convergence-rate premise failed verification; `premise` names
    /// which one (`delta_p` or `q_min`).
    #[error("premise `{premise}` violated: {detail}")]
    PremiseViolated {
        premise: &'static str,
        detail: String,
    },

    /// The operation needs at least one agent with reliability >= 0.5.
    #[error("population has no competent agents (p >= 0.5)")]
    NoCompetentAgents,
}

pub type Result<T> = std::result::Result<T, Error>;
