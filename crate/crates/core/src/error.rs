use thiserror::Error;

pub type Result<T> = std::result::Result<T, SandpileError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SandpileError {
    #[error("unsupported cycle size {0}: at least 3 vertices are required")]
    UnsupportedCycleSize(usize),

    #[error("negative chip count {value} at vertex {vertex}")]
    NegativeCount { vertex: usize, value: i64 },

    #[error("chip count {value} at vertex {vertex} does not fit in 32 bits")]
    CountOverflow { vertex: usize, value: i64 },

    #[error("vertex {vertex} is out of range for a cycle of size {n} (vertices are 1-based)")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("stable vertex {vertex}: it holds {count} chip(s), firing needs at least 2")]
    StableVertex { vertex: usize, count: u32 },

    #[error("reverse move would go negative: vertex {vertex} has an empty neighbour")]
    ReverseWouldGoNegative { vertex: usize },

    #[error("nothing to fire: configuration {0} is stable")]
    NothingToFire(String),

    #[error("state budget of {budget} distinct states exhausted while stabilizing {config}")]
    BudgetExhausted { budget: usize, config: String },

    #[error("state budget must be at least 1")]
    ZeroBudget,

    #[error("k \u{2260} N: configuration {config} holds {chips} chips on {n} vertices")]
    ChipsNotEqualToSize {
        config: String,
        chips: u64,
        n: usize,
    },

    #[error("mixed cycle sizes: expected {expected}, found {found}")]
    MixedCycleSizes { expected: usize, found: usize },

    #[error("cannot parse configuration {input:?}: {reason}")]
    Parse { input: String, reason: String },
}
