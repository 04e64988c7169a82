use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("budget exhausted: {spent} observations spent, cap {cap}, {requested} more requested")]
    BudgetExhausted { spent: u64, cap: u64, requested: u64 },

    #[error("index ({item}, {feature}) out of range for a {n}x{d} instance")]
    IndexOutOfRange {
        item: usize,
        feature: usize,
        n: usize,
        d: usize,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("labels must contain both groups")]
    DegenerateLabels,

    #[error("invalid budget: T = {budget} is below L*2^(L+1) = {required} for L = {halving_steps}")]
    InvalidBudget {
        budget: u64,
        halving_steps: u32,
        required: u64,
    },

    #[error("item set is empty")]
    EmptyItemSet,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("gap vector is identically zero")]
    ZeroGap,

    #[error("insufficient budget: T = {budget} gives zero samples per cell for n*d = {cells}")]
    InsufficientBudget { budget: u64, cells: u64 },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub fn is_budget_exhausted(&self) -> bool {
        matches!(self, Error::BudgetExhausted { .. })
    }
}
