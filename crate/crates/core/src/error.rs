use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected} players, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unknown action label `{0}`")]
    UnknownAction(String),

    #[error("monitor queried with an empty history")]
    EmptyHistory,

    #[error("round {round}: player {player} chose out-of-range action {action}")]
    ActionOutOfRange { round: u32, player: usize, action: u32 },

    #[error("invalid window function: {0}")]
    InvalidWindow(String),

    #[error("invalid failure schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("deviation family has {size} members, budget is {budget}")]
    BudgetExceeded { size: u64, budget: u64 },

    #[error("invalid horizon {0}")]
    InvalidHorizon(u32),
}
