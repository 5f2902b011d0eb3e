//! Truncated power-series engine and CR-geometry kernel.
//!
//! Classifies real-analytic generic CR germs `M ⊂ ℂ^{n+c}` with `2n + c ≤ 5`
//! into six general classes and computes their elementary normal forms. All
//! conditions are verified on truncated series at a fixed order.

pub mod classify;
pub mod frames;
pub mod linalg;
pub mod manifold;
pub mod normalize;
pub mod scalar;
pub mod series;

pub use scalar::{Mode, Scalar};
pub use series::{MultiIndex, SeriesError, Signature, Substitution, TruncatedSeries};
pub use manifold::{Biholomorphism, DefiningEquations};
pub use normalize::{ClassTag, NormalizationTrace, NormalizeError};
pub use classify::{classify, classify_with, ClassReport, ClassifyOptions};
