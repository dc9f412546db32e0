use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("p = {0} is not prime")]
    NonPrime(u64),
    #[error("invalid tower parameters: {0}")]
    InvalidParams(String),
    #[error("field size {size} exceeds the guard {guard}")]
    SizeGuard { size: u128, guard: u128 },
    #[error("automorphism index {0} denotes the identity; a non-identity automorphism is required")]
    IdentityAutomorphism(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element does not belong to this tower")]
    TowerMismatch,
    #[error("form is not alternating")]
    NotAlternating,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("exhaustive budget exceeded: need {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
