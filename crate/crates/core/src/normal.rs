//! Standard normal density and distribution function.

use std::f64::consts::{PI, SQRT_2};

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Product density on `R^d`.
pub fn pdf_nd(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (-0.5 * r2).exp() / (2.0 * PI).powf(x.len() as f64 / 2.0)
}
