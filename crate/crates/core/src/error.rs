use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("unsupported spatial dimension {0}; only 2 and 3 are handled")]
    UnsupportedDimension(usize),

    #[error("ambiguity blocks have mixed spatial dimensions")]
    MixedDimensions,

    #[error("ambiguity set is empty")]
    EmptyAmbiguity,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("configuration is degenerate: {0}")]
    DegenerateConfiguration(String),

    #[error(
        "no positive-semidefinite stress of rank {required_rank} found \
         (best candidate achieved rank {achieved_rank})"
    )]
    StressInfeasible {
        required_rank: usize,
        achieved_rank: usize,
    },

    #[error("agent index {index} out of range for {agents} agents")]
    AgentOutOfRange { index: usize, agents: usize },

    #[error("pinning requires at least one leader")]
    NoLeaders,

    #[error("all agents are leaders; nothing left to integrate")]
    DegenerateSystem,

    #[error("invalid integration parameters: {0}")]
    InvalidIntegration(String),

    #[error("decay fit requires a converged trace")]
    FitRequiresConverged,

    #[error("decay fit window contains non-positive errors")]
    FitNonPositiveError,

    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit-code class: numerical/synthesis failures are distinguished
    /// from usage and config errors.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveSemidefinite { .. }
                | Error::NonFinite
                | Error::StressInfeasible { .. }
                | Error::DegenerateConfiguration(_)
                | Error::FitRequiresConverged
                | Error::FitNonPositiveError
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
