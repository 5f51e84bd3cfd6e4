use thiserror::Error;

use crate::point::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point has a non-finite coordinate at index {index}")]
    NonFinitePoint { index: usize },

    #[error("invalid convex body: {0}")]
    InvalidBody(String),

    #[error("projection did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        best: Point,
        residual: f64,
        iterations: usize,
    },

    #[error("point is not in the body (distance {distance:e})")]
    NotInBody { distance: f64 },

    #[error("point lies in the body; it has no partition cell")]
    InsideBody,

    #[error("non-finite value {value} from `{label}` at u={u:?}, v={v:?}")]
    NonFiniteValue {
        label: String,
        u: Point,
        v: Option<Point>,
        value: f64,
    },

    #[error("reduction unsound without declared property: {0}")]
    UnsoundReduction(String),

    #[error("reports were computed over different candidate lists")]
    CandidateMismatch,

    #[error("grid error: {0}")]
    Grid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
