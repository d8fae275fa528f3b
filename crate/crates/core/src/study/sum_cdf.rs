use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::FamilySpec;
use crate::edgeworth::MC_CHUNK;
use crate::error::{Error, Result};
use crate::rng::Streams;

/// 99% Dvoretzky–Kiefer–Wolfowitz half-width `√(ln(2/0.01)/(2M))`.
pub fn dkw_half_width(m: u64) -> f64 {
    ((2.0f64 / 0.01).ln() / (2.0 * m as f64)).sqrt()
}

/// Empirical CDF of the standardized sum on a fixed grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumCdf {
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
    pub m: u64,
    pub half_width: f64,
}

impl SumCdf {
    /// Worst-case binomial standard error `1/(2√M)` of a grid value.
    pub fn mc_se(&self) -> f64 {
        0.5 / (self.m as f64).sqrt()
    }

    pub fn band_contains(&self, i: usize, value: f64) -> bool {
        (self.cdf[i] - value).abs() <= self.half_width
    }
}

/// `M` realizations of `ζ_n = n^{−1/2} V^{−1/2} Σ_i (X_i − μ)` for a
/// one-dimensional family, tallied on an ascending grid. Uses the family's
/// exact sum sampler when it has one and `n` summed draws otherwise.
pub fn exact_sum_cdf_mc(
    family: &FamilySpec,
    n: u64,
    m: u64,
    grid: &[f64],
    streams: &Streams,
) -> Result<SumCdf> {
    if family.dim() != 1 {
        return Err(Error::Dimension("exact-sum CDFs need a one-dimensional family".into()));
    }
    if n == 0 || m == 0 {
        return Err(Error::invalid("need n ≥ 1 and M ≥ 1"));
    }
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("grid must be nonempty and strictly increasing"));
    }
    let (mean, cov) = family.mean_covariance()?;
    let var = cov[(0, 0)];
    if !(var > 0.0) {
        return Err(Error::Standardization(format!(
            "{} has variance {var}",
            family.name
        )));
    }
    let shift = n as f64 * mean[0];
    let scale = 1.0 / (n as f64 * var).sqrt();
    let sampler = family.sum_sampler(n);
    let k = grid.len();
    // integer tallies, so the reduction order does not matter
    let counts = (0..m.div_ceil(MC_CHUNK))
        .into_par_iter()
        .fold(
            || vec![0u64; k + 1],
            |mut acc, c| {
                let mut rng = streams.stream(c);
                let mut x = [0.0];
                for _ in 0..MC_CHUNK.min(m - c * MC_CHUNK) {
                    let sum = match &sampler {
                        Some(s) => s.sample(&mut rng),
                        None => (0..n)
                            .map(|_| {
                                family.sample_into(&mut rng, &mut x);
                                x[0]
                            })
                            .sum(),
                    };
                    let z = (sum - shift) * scale;
                    acc[grid.partition_point(|t| *t < z)] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; k + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mut running = 0u64;
    let cdf = counts[..k]
        .iter()
        .map(|c| {
            running += c;
            running as f64 / m as f64
        })
        .collect();
    Ok(SumCdf {
        grid: grid.to_vec(),
        cdf,
        m,
        half_width: dkw_half_width(m),
    })
}
