//! Dimension-k Krivine rounding schemes for bilinear sign maximization.
//!
//! The pipeline: solve the vector relaxation of max Σ a_ij ε_i δ_j
//! ([`problems`]), transform the resulting Gram matrix with the scheme's
//! preprocessing kernels ([`embedding`]), then project through a random
//! Gaussian matrix and read signs off a partition of R^k ([`rounding`]).
//! [`series`] computes the constants involved and [`validator`] checks the
//! identities they are supposed to satisfy by Monte Carlo.

// `!(x <= tol)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod embedding;
pub mod error;
pub mod problems;
pub mod rng;
pub mod rounding;
pub mod series;
pub mod validator;

pub use error::{Error, Result};
