//! Test-function functionals: the growth seminorm `M_s(f)` and the Gaussian
//! oscillation of a set indicator.

use super::measure::importance_mc;
use super::sets::SetSpec;
use crate::error::{Error, Result};
use crate::rng::Streams;

/// Tensor probe grid on `[-radius, radius]^d` with spacing `step`, plus the
/// origin.
#[derive(Clone, Copy, Debug)]
pub struct ProbeGrid {
    pub radius: f64,
    pub step: f64,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        ProbeGrid {
            radius: 12.0,
            step: 0.05,
        }
    }
}

/// Grid lower bound for `sup_x |f(x)| / (1 + ‖x‖^s)`.
pub fn m_s_norm(f: impl Fn(&[f64]) -> f64, dim: usize, s: f64, grid: ProbeGrid) -> Result<f64> {
    if dim == 0 || !(grid.step > 0.0) || !(grid.radius >= 0.0) {
        return Err(Error::invalid("probe grid needs d ≥ 1, step > 0, radius ≥ 0"));
    }
    let per_axis = (2.0 * grid.radius / grid.step).round() as usize + 1;
    let coord = |i: usize| -grid.radius + i as f64 * grid.step;
    let ratio = |x: &[f64]| {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        f(x).abs() / (1.0 + norm.powf(s))
    };
    let mut best = ratio(&vec![0.0; dim]);
    let total = per_axis.pow(dim as u32);
    let mut x = vec![0.0; dim];
    for code in 0..total {
        let mut c = code;
        for xi in x.iter_mut() {
            *xi = coord(c % per_axis);
            c /= per_axis;
        }
        best = best.max(ratio(&x));
    }
    Ok(best)
}

/// Monte Carlo estimate of `Φ(A^ε \ A^{−ε})`, the standard-Gaussian mass of
/// points within `ε` of the boundary of `A`. Returns `(value, std_error)`.
pub fn gaussian_oscillation(
    set: &SetSpec,
    eps: f64,
    samples: u64,
    streams: &Streams,
) -> Result<(f64, f64)> {
    if !(eps > 0.0) {
        return Err(Error::invalid("ε must be positive"));
    }
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    set.validate()?;
    let dim = set.dim().expect("validated");
    Ok(importance_mc(dim, samples, streams, |x| {
        if set.boundary_distance(x) < eps {
            1.0
        } else {
            0.0
        }
    }))
}
