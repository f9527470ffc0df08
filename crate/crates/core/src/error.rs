use thiserror::Error;

/// Errors produced by games, oracles and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller handed a game something outside its contract: an index out
    /// of range, a response of the wrong kind, a non-permutation, ...
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A game instance failed its constructor invariants.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// Every row of the oracle's column pays zero.
    #[error("degenerate all-zero payoff column at iteration {iteration}")]
    DegenerateColumn { iteration: u64 },

    /// The plug-in oracle returned something no α-approximate oracle could.
    #[error("oracle contract violation: {0}")]
    OracleContract(String),

    #[error("numerical instability at iteration {iteration}: {detail}")]
    NumericalInstability { iteration: u64, detail: String },

    /// Enumeration would exceed the configured cap.
    #[error("{family} too large to enumerate: {detail}")]
    TooLarge {
        family: &'static str,
        detail: String,
        count: Option<u128>,
    },

    /// A computed strategy failed its approximation guarantee.
    #[error("guarantee violated: {detail}")]
    GuaranteeViolation { detail: String },

    /// Something that the algorithm's own analysis rules out.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
