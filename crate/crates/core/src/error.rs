use thiserror::Error;

use crate::rational::{ParseRationalError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("space must have at least one point")]
    EmptySpace,
    #[error("weight of point {index} is negative ({weight})")]
    NegativeWeight { index: usize, weight: Rational },
    #[error("set is bound to a space of size {found}, expected {expected}")]
    SpaceMismatch { expected: usize, found: usize },
    #[error("point {index} is out of range for a space of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("map has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("map is not a bijection: {reason}")]
    NotBijective { reason: String },
    #[error(
        "map is not measure preserving: point {index} has weight {weight} but its image {image} has weight {image_weight}"
    )]
    NotMeasurePreserving {
        index: usize,
        image: usize,
        weight: Rational,
        image_weight: Rational,
    },
    #[error("point {index} is not a member of the set")]
    NotInSet { index: usize },
    #[error("set must be nonempty")]
    EmptySet,
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("permutation is not a bijection of 0..{size}")]
    BadPermutation { size: usize },
    #[error("length of interval {index} is not positive ({length})")]
    NonpositiveLength { index: usize, length: Rational },
    #[error("{x} is outside the domain [0, {total})")]
    OutOfDomain { x: Rational, total: Rational },
    #[error("bad interval [{start}, {end}): {reason}")]
    BadInterval {
        start: Rational,
        end: Rational,
        reason: &'static str,
    },
    #[error(transparent)]
    Parse(#[from] ParseRationalError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
