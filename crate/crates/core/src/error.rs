use thiserror::Error;

use crate::Complex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {0} lies outside the {1} domain")]
    OutsideDomain(Complex, &'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {0} is not in the image of the map (round-trip residual {1:.3e})")]
    NotInImage(Complex, f64),

    #[error("domain mismatch: expected {expected}, found {found}")]
    DomainMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("separated family violates {property}: {detail}")]
    SeparationViolated {
        property: &'static str,
        detail: String,
    },

    #[error("target regions {0} and {1} are not certified disjoint")]
    RegionsNotDisjoint(usize, usize),

    #[error("ill-conditioned fit at degree {degree}: {detail}")]
    IllConditioned { degree: usize, detail: String },

    #[error("horizon exhausted: {0}")]
    HorizonExhausted(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
