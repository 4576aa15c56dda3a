use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("continuous distribution: {0} has no finite support")]
    ContinuousDistribution(&'static str),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("enumeration budget exceeded: {needed} points needed, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("coordinate {value} at index {index} outside 0..={max}")]
    CoordinateOutOfRange { index: usize, value: u32, max: u32 },

    #[error("codebook separation {separation:e} does not exceed 2*eps = {twice_eps:e}")]
    SeparationViolated { separation: f64, twice_eps: f64 },

    #[error("not a uniform group distribution: {0}")]
    NotAGroup(String),

    #[error("transcript parse error at line {line}: {msg}")]
    Transcript { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
