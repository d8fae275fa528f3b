use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::deviation::Estimate;
use super::jet::g_value;
use super::stats::SampleStats;
use crate::dataset::Dataset;
use crate::edgeworth::{EdgeworthExpansion, MC_CHUNK};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::Streams;

/// The points `(W_i, W_i²)`.
pub fn tstat_dataset(w: &[f64]) -> Result<Dataset> {
    Dataset::new(2, w.iter().flat_map(|x| [*x, x * x]).collect())
}

/// Bootstrap t-statistics; resamples with `s* = 0` are counted, not kept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TstatDraws {
    /// Non-degenerate draws in replication order.
    pub values: Vec<f64>,
    pub degenerate: u64,
}

impl TstatDraws {
    /// The t-statistic CDF over non-degenerate draws, evaluated on an
    /// ascending grid.
    pub fn cdf_grid(&self, grid: &[f64]) -> Vec<Estimate> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        let m = v.len() as u64;
        grid.iter()
            .map(|t| Estimate::proportion(v.partition_point(|x| x <= t) as u64, m))
            .collect()
    }
}

/// `T*_b = √n(W̄*_b − W̄)/s*_b`, `s*² = (1/n)Σ(W* − W̄*)²`, one stream per
/// replication.
pub fn tstat_bootstrap(w: &[f64], b: u64, streams: &Streams) -> Result<TstatDraws> {
    if b == 0 {
        return Err(Error::invalid("need at least one bootstrap draw"));
    }
    let n = w.len();
    if n < 2 || w.iter().all(|x| *x == w[0]) {
        return Err(Error::invalid("W needs at least two distinct values"));
    }
    let w_bar = w.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = w.iter().map(|x| x - w_bar).collect();
    let sqrt_n = (n as f64).sqrt();
    let draws: Vec<Option<f64>> = (0..b)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.stream(i);
            // Welford on deviations from W̄
            let (mut mean, mut m2) = (0.0, 0.0);
            let first = rng.random_range(0..n);
            let mut distinct = false;
            for k in 0..n {
                let j = if k == 0 { first } else { rng.random_range(0..n) };
                distinct |= w[j] != w[first];
                let x = dev[j];
                let delta = x - mean;
                mean += delta / (k + 1) as f64;
                m2 += delta * (x - mean);
            }
            let s = (m2 / n as f64).sqrt();
            (distinct && s > 0.0).then(|| sqrt_n * mean / s)
        })
        .collect();
    let degenerate = draws.iter().filter(|d| d.is_none()).count() as u64;
    Ok(TstatDraws {
        values: draws.into_iter().flatten().collect(),
        degenerate,
    })
}

/// `f̂_t(x) = 1{√n g(X̄ + V̂^{1/2}x/√n) ≤ t}` with its singular-point counter.
#[derive(Debug)]
pub struct TstatFunctional {
    xbar: [f64; 2],
    root: [[f64; 2]; 2],
    w_bar: f64,
    sqrt_n: f64,
    singular: AtomicU64,
}

impl TstatFunctional {
    pub fn new(stats: &SampleStats, w_bar: f64, n: u64) -> Result<Self> {
        if stats.dim() != 2 {
            return Err(Error::Dimension("the t-functional lives in d = 2".into()));
        }
        if n == 0 {
            return Err(Error::invalid("sample size must be ≥ 1"));
        }
        let r = linalg::sym_sqrt(&stats.covariance_matrix())?;
        Ok(TstatFunctional {
            xbar: [stats.mean[0], stats.mean[1]],
            root: [[r[(0, 0)], r[(0, 1)]], [r[(1, 0)], r[(1, 1)]]],
            w_bar,
            sqrt_n: (n as f64).sqrt(),
            singular: AtomicU64::new(0),
        })
    }

    /// `√n g(X̄ + V̂^{1/2}x/√n)`, or `None` where `x₂ ≤ x₁²`.
    pub fn statistic(&self, x: &[f64]) -> Option<f64> {
        let y = [
            self.xbar[0] + (self.root[0][0] * x[0] + self.root[0][1] * x[1]) / self.sqrt_n,
            self.xbar[1] + (self.root[1][0] * x[0] + self.root[1][1] * x[1]) / self.sqrt_n,
        ];
        g_value(&y, self.w_bar).map(|g| self.sqrt_n * g)
    }

    /// The indicator; singular points give 0 and bump the counter.
    pub fn indicator(&self, t: f64, x: &[f64]) -> u8 {
        match self.statistic(x) {
            Some(v) => u8::from(v <= t),
            None => {
                self.singular.fetch_add(1, Ordering::Relaxed);
                0
            }
        }
    }

    pub fn singular_count(&self) -> u64 {
        self.singular.load(Ordering::Relaxed)
    }
}

/// One-off evaluation of `f̂_t(x)`; prefer [`TstatFunctional`] in loops.
pub fn fhat_indicator(
    t: f64,
    x: &[f64],
    stats: &SampleStats,
    w_bar: f64,
    n: u64,
    counter: &AtomicU64,
) -> Result<u8> {
    let f = TstatFunctional::new(stats, w_bar, n)?;
    let v = f.indicator(t, x);
    counter.fetch_add(f.singular_count(), Ordering::Relaxed);
    Ok(v)
}

/// `Q̃(f̂_t)` on an ascending t-grid by Gaussian importance sampling: each
/// draw's statistic is computed once and binned against the grid.
pub fn edgeworth_tstat_cdf(
    grid: &[f64],
    e: &EdgeworthExpansion,
    f: &TstatFunctional,
    samples: u64,
    streams: &Streams,
) -> Result<Vec<Estimate>> {
    if samples < 2 {
        return Err(Error::invalid("Monte Carlo budget must be ≥ 2 samples"));
    }
    if e.dim() != 2 {
        return Err(Error::Dimension("expansion must live in d = 2".into()));
    }
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("t-grid must be nonempty and strictly increasing"));
    }
    let k = grid.len();
    let chunks = samples.div_ceil(MC_CHUNK);
    let partial: Vec<(Vec<f64>, Vec<f64>, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = streams.stream(c);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let (mut s1, mut s2) = (vec![0.0; k + 1], vec![0.0; k + 1]);
            let mut singular = 0;
            for _ in 0..count {
                let x = [StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)];
                match f.statistic(&x) {
                    Some(v) => {
                        let w = e.weight(&x);
                        let bin = grid.partition_point(|t| *t < v);
                        s1[bin] += w;
                        s2[bin] += w * w;
                    }
                    None => singular += 1,
                }
            }
            (s1, s2, singular)
        })
        .collect();
    let (mut s1, mut s2) = (vec![0.0; k + 1], vec![0.0; k + 1]);
    for (a, b, singular) in &partial {
        for i in 0..=k {
            s1[i] += a[i];
            s2[i] += b[i];
        }
        f.singular.fetch_add(*singular, Ordering::Relaxed);
    }
    let m = samples as f64;
    let (mut c1, mut c2) = (0.0, 0.0);
    Ok((0..k)
        .map(|i| {
            c1 += s1[i];
            c2 += s2[i];
            let mean = c1 / m;
            let var = ((c2 / m - mean * mean) * m / (m - 1.0)).max(0.0);
            Estimate {
                value: mean,
                se: (var / m).sqrt(),
            }
        })
        .collect())
}

/// `Q̃(f̂_t)` at a single `t`.
pub fn edgeworth_tstat_measure(
    t: f64,
    e: &EdgeworthExpansion,
    f: &TstatFunctional,
    samples: u64,
    streams: &Streams,
) -> Result<Estimate> {
    Ok(edgeworth_tstat_cdf(&[t], e, f, samples, streams)?[0])
}
