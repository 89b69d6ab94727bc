//! Complementary Beatty sequences in exact arithmetic.
//!
//! * [`exact`]: the quadratic field `Q(√d)` and the exact floor `[n·x]`.
//! * [`sequences`]: Beatty and Sturmian sequences, complementarity and
//!   repetition profiles, the sortjoin merge.
//! * [`mesalg`]: the MEX algorithm and MES (minimum excluded with skipping).
//! * [`decomposition`]: derived slopes and verification of the decomposition
//!   `b_n − a_n = c_n + r_n + 1` together with its companion floor identities.

pub mod decomposition;
pub mod exact;
pub mod mesalg;
pub mod sequences;

use thiserror::Error;

pub use exact::{floor_mul, isqrt, ExactError, FloorKernel, QuadExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("slope {0} is not irrational")]
    NotIrrational(QuadExpr),
    #[error("slope {slope} out of range: expected {expected}")]
    SlopeOutOfRange { slope: QuadExpr, expected: &'static str },
    #[error("{} and {} are not complementary (1/x + 1/y != 1)", .0.0, .0.1)]
    NotComplementary(Box<(QuadExpr, QuadExpr)>),
    #[error("gap h_{n} = {h} is below 1")]
    GapTooSmall { n: usize, h: i64 },
    #[error("step {n}: value {value} is already assigned")]
    Collision { n: usize, value: u64 },
    #[error("step {n}: negative skip count {value}")]
    NegativeSkip { n: usize, value: i64 },
    #[error("input sequence has {available} terms, {needed} required")]
    SequenceTooShort { needed: usize, available: usize },
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error("battery config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range<T>(slope: &QuadExpr, expected: &'static str) -> Result<T> {
    Err(Error::SlopeOutOfRange {
        slope: slope.clone(),
        expected,
    })
}
