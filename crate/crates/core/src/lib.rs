//! Multivariate Edgeworth expansions for standardized sums of independent
//! vectors, weak Cramér certificates for analytic and empirical laws, and
//! Monte Carlo studies of the approximation error.
//!
//! Modules follow the data flow: [`cumulant`] turns moments into
//! standardized cumulants, [`edgeworth`] builds and evaluates the signed
//! measure, [`cramer`] checks the characteristic-function condition,
//! [`bootstrap`] covers the resampling side, and [`study`] drives the rate
//! experiments.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bootstrap;
pub mod cramer;
pub mod cumulant;
pub mod dataset;
pub mod edgeworth;
pub mod error;
pub mod linalg;
pub mod normal;
pub mod rng;
pub mod study;

pub use dataset::Dataset;
pub use error::{Error, Result};
