//! Exact tabular language models for studying parallel masked drafting,
//! lossless speculative verification and confidence-weighted drafter
//! training.
//!
//! Everything numeric is generic over [`Scalar`]; [`Model`] and [`Dist`] use
//! `f64`, while [`ExactModel`] and [`ExactDist`] use arbitrary-precision
//! rationals.

pub mod drafting;
pub mod error;
pub mod harness;
pub mod model;
pub mod scalar;
pub mod training;
pub mod verification;

pub use error::{Error, Result};
pub use scalar::{exact, Real, Scalar};

use num_rational::BigRational;

pub type Model = model::TabularModel<f64>;
pub type Dist = model::Distribution<f64>;
pub type ExactModel = model::TabularModel<BigRational>;
pub type ExactDist = model::Distribution<BigRational>;
