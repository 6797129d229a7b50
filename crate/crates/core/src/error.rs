use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("malformed scalar {0:?}")]
    Malformed(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("values from different quadratic fields: sqrt({0}) and sqrt({1})")]
    FieldMismatch(u64, u64),
    #[error("integer overflow while normalizing a radicand")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid lengths: {0}")]
    InvalidLengths(String),
    #[error("{what} = {value} lies outside {domain}")]
    OutOfDomain {
        what: &'static str,
        value: Scalar,
        domain: String,
    },
    #[error("step cap of {cap} exceeded{}", unfinished_note(.unfinished))]
    StepCapExceeded {
        cap: u64,
        unfinished: Option<Scalar>,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("induction failed: {0}")]
    Induction(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn unfinished_note(unfinished: &Option<Scalar>) -> String {
    match unfinished {
        Some(m) => format!("; unfinished measure {m}"),
        None => String::new(),
    }
}
