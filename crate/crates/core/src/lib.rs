//! Exact torus localization on Hilbert schemes of points of toric
//! surfaces, extraction of universal series, and comparison with
//! closed-form modular predictions.

#![allow(clippy::needless_range_loop)]

pub mod cache;
pub mod exact;
pub mod hilb;
pub mod ktheory;
pub mod linalg;
pub mod localization;
pub mod modular;
pub mod toric;
pub mod universal;

pub use cache::Cache;
pub use exact::{ExactError, Exponent, PuiseuxSeries, Rational, RationalFunction};
pub use localization::{Engine, LocalizationError, Mode, QResult};
pub use modular::{OracleError, Predicted, VerificationReport};
pub use toric::{AbstractSurface, BasisPair, BundleTuple, ChernSymbol, DivisorClass, SurfaceKind, ToricSurface};
pub use universal::{AssembledSeries, Extraction, UniversalError, UniversalSeriesSet};
