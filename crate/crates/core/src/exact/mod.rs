//! Exact arithmetic kernel: big rationals, rational functions in
//! `v = y^(1/2)`, and truncated Puiseux series in `q` over them.

mod poly;
mod puiseux;
mod ratfun;
pub mod reconstruct;

use num_bigint::BigInt;
use num_rational::Ratio;
use thiserror::Error;

pub use poly::Poly;
pub use puiseux::{PuiseuxSeries, SeriesRecord};
pub use ratfun::RationalFunction;

/// Arbitrary-precision rational number.
pub type Rational = Ratio<BigInt>;

/// Exponent of `q`: an exact small fraction.
pub type Exponent = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("denominator vanishes at the evaluation point")]
    PoleAtValue,
    #[error("division by zero")]
    ZeroDivisor,
    #[error("series must start with constant term 1")]
    BadLeadingTerm,
    #[error("supplied root does not square to the leading coefficient")]
    BranchMismatch,
    #[error("leading exponent {0} has no square root on the exponent grid")]
    OddValuation(Exponent),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("rational reconstruction did not stabilize within {0} samples")]
    ReconstructionFailed(usize),
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Ramification bound used for series of rank `r`: exponent denominators
/// divide `lcm(2r, 6)`.
pub fn ramification_for_rank(rank: u32) -> i64 {
    num_integer::lcm(2 * rank as i64, 6)
}
