use thiserror::Error;

use crate::foundation::{render, Rational};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid rational literal {0:?}")]
    ParseRational(String),

    #[error("point {} lies outside [0, 1]", render(.0))]
    OutOfUnitInterval(Rational),

    #[error("operation requires a nonempty set")]
    EmptySet,

    #[error("point {} belongs to the set, so it has no complementary gap", render(.0))]
    InSet(Rational),

    #[error("set does not contain both endpoints 0 and 1")]
    MissingEndpoints,

    #[error("point {} is outside the open gap ({}, {})", render(.x), render(.a), render(.b))]
    OutsideGap { x: Box<Rational>, a: Box<Rational>, b: Box<Rational> },

    #[error("point {} is outside the cell [{}, {}]", render(.x), render(.lo), render(.hi))]
    OutsideCell { x: Box<Rational>, lo: Box<Rational>, hi: Box<Rational> },

    #[error("no clear subinterval found within scan depth {0}")]
    ScanDepthExceeded(u32),

    #[error("point {} is not in M (not found in any of the {levels} available levels)", render(.point))]
    NotInM { point: Rational, levels: u32 },

    #[error("point {} not found in the first {cap} stream levels (level cap exhausted)", render(.point))]
    LevelCapExhausted { point: Rational, cap: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("spec error at {field}: {message}")]
    Spec { field: String, message: String },
}
