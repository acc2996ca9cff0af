use crate::rational::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("probability error: {0}")]
    Probability(String),

    #[error("state {state}: self-loop probability {total} leaves no way back to the rest state")]
    DegenerateState { state: usize, total: Box<Rational> },

    #[error("state {state}: platform cost {cost} must be positive")]
    NonpositiveCost { state: usize, cost: Box<Rational> },

    #[error("subset error: {0}")]
    Subset(String),

    #[error("chain restricted to reachable states is not irreducible")]
    ReducibleChain,

    #[error("state {state}: z = {z} is not positive")]
    Sign { state: usize, z: Box<Rational> },

    #[error("{what}: size {size} exceeds the limit {limit}")]
    TooLarge { what: &'static str, size: u128, limit: u128 },

    #[error("feasibility error: {0}")]
    Feasibility(String),

    #[error("quantization error: {0}")]
    Quantization(String),

    #[error("no state survives preprocessing")]
    EmptyInstance,

    #[error("cost ratio {ratio} exceeds the ceiling {ceiling}")]
    CostBound { ratio: Box<Rational>, ceiling: Box<Rational> },

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("shape mismatch: {0}")]
    Shape(String),
}
