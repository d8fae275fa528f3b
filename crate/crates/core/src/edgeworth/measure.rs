use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expansion::EdgeworthExpansion;
use super::hermite::hermite_all;
use super::quadrature::{composite_legendre, gauss_hermite_normal};
use super::sets::SetSpec;
use crate::error::{Error, Result};
use crate::normal;
use crate::rng::Streams;

/// Radius beyond which the standard Gaussian tail is ignored (< 1e-30).
pub const TRUNCATION_RADIUS: f64 = 12.0;

/// Draws per random stream in the Monte Carlo evaluators.
pub(crate) const MC_CHUNK: u64 = 4096;

#[derive(Clone, Debug)]
pub enum MeasureMethod {
    /// Exact Hermite antiderivatives for half-lines and boxes; tensor
    /// Gauss rules with successive refinement for balls and half-spaces.
    Quadrature { target_error: f64, max_refinements: u32 },
    /// Gaussian importance sampling with the Hermite factor as weight.
    MonteCarlo { samples: u64, streams: Streams },
}

impl MeasureMethod {
    pub fn quadrature() -> Self {
        MeasureMethod::Quadrature {
            target_error: 1e-10,
            max_refinements: 4,
        }
    }

    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        MeasureMethod::MonteCarlo {
            samples,
            streams: Streams::new(seed),
        }
    }
}

/// A signed-measure value with its numerical error estimate. For Monte
/// Carlo the error is the sample standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// `Q̃(A)` for the expansion `e`.
pub fn set_measure(
    e: &EdgeworthExpansion,
    set: &SetSpec,
    method: &MeasureMethod,
) -> Result<MeasureEstimate> {
    set.validate()?;
    if set.dim() != Some(e.dim()) {
        return Err(Error::Dimension(format!(
            "set has dimension {:?}, expansion {}",
            set.dim(),
            e.dim()
        )));
    }
    match method {
        MeasureMethod::Quadrature {
            target_error,
            max_refinements,
        } => quadrature_measure(e, set, *target_error, *max_refinements),
        MeasureMethod::MonteCarlo { samples, streams } => {
            if *samples < 2 {
                return Err(Error::invalid("Monte Carlo budget must be ≥ 2 samples"));
            }
            let (mean, se) = importance_mc(e.dim(), *samples, streams, |x| {
                if set.contains(x) {
                    e.weight(x)
                } else {
                    0.0
                }
            });
            Ok(MeasureEstimate {
                value: mean,
                error: se,
                converged: true,
            })
        }
    }
}

/// Mean and standard error of `g(X)`, `X ~ N(0, I_d)`, over `samples` draws
/// split into fixed chunks with one stream each; the reduction runs in chunk
/// order so the result does not depend on the worker count.
pub(crate) fn importance_mc(
    dim: usize,
    samples: u64,
    streams: &Streams,
    g: impl Fn(&[f64]) -> f64 + Sync,
) -> (f64, f64) {
    let chunks = samples.div_ceil(MC_CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = streams.stream(c);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut x = vec![0.0; dim];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                for xi in x.iter_mut() {
                    *xi = StandardNormal.sample(&mut rng);
                }
                let v = g(&x);
                s1 += v;
                s2 += v * v;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let n = samples as f64;
    let mean = s1 / n;
    let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

/// `∫_l^u He_k φ`, with infinite limits allowed.
fn hermite_interval(k: usize, l: f64, u: f64, he_l: &[f64], he_u: &[f64]) -> f64 {
    if k == 0 {
        return normal::cdf(u) - normal::cdf(l);
    }
    let end = |t: f64, he: &[f64]| {
        if t.is_finite() {
            he[k - 1] * normal::pdf(t)
        } else {
            0.0
        }
    };
    end(l, he_l) - end(u, he_u)
}

fn box_measure(e: &EdgeworthExpansion, lower: &[f64], upper: &[f64]) -> f64 {
    let deg = e.max_degree();
    let tables: Vec<(Vec<f64>, Vec<f64>)> = lower
        .iter()
        .zip(upper)
        .map(|(&l, &u)| {
            let h = |t: f64| {
                if t.is_finite() {
                    hermite_all(deg, t)
                } else {
                    vec![0.0; deg + 1]
                }
            };
            (h(l), h(u))
        })
        .collect();
    e.weight_terms()
        .iter()
        .map(|(exps, c)| {
            c * exps
                .iter()
                .enumerate()
                .map(|(k, &m)| {
                    hermite_interval(m as usize, lower[k], upper[k], &tables[k].0, &tables[k].1)
                })
                .product::<f64>()
        })
        .sum()
}

fn quadrature_measure(
    e: &EdgeworthExpansion,
    set: &SetSpec,
    target: f64,
    max_refinements: u32,
) -> Result<MeasureEstimate> {
    let exact = |value: f64| MeasureEstimate {
        value,
        error: 1e-15 * value.abs().max(1.0),
        converged: true,
    };
    let d = e.dim();
    match set {
        SetSpec::HalfLine { upper } => return Ok(exact(e.cdf_1d(*upper)?)),
        SetSpec::Box { lower, upper } => return Ok(exact(box_measure(e, lower, upper))),
        SetSpec::Ball { center, radius } if d == 1 => {
            return Ok(exact(box_measure(
                e,
                &[center[0] - radius],
                &[center[0] + radius],
            )))
        }
        SetSpec::HalfSpace { normal, offset } if d == 1 => {
            let b = offset / normal[0];
            let (lo, hi) = if normal[0] > 0.0 {
                (f64::NEG_INFINITY, b)
            } else {
                (b, f64::INFINITY)
            };
            return Ok(exact(box_measure(e, &[lo], &[hi])));
        }
        SetSpec::Ball { .. } if d > 3 => {
            return Err(Error::Dimension(
                "ball quadrature supports d ≤ 3; use Monte Carlo".into(),
            ))
        }
        _ => {}
    }
    let rule = |level: u32| -> f64 {
        match set {
            SetSpec::Ball { center, radius } => ball_rule(e, center, *radius, level),
            SetSpec::HalfSpace { normal, offset } => half_space_rule(e, normal, *offset, level),
            _ => unreachable!(),
        }
    };
    let mut prev = rule(1);
    let mut level = 1;
    loop {
        let next = rule(level * 2);
        let err = (next - prev).abs();
        if err <= target || level >= 1 << max_refinements {
            return Ok(MeasureEstimate {
                value: next,
                error: err,
                converged: err <= target,
            });
        }
        prev = next;
        level *= 2;
    }
}

fn ball_rule(e: &EdgeworthExpansion, center: &[f64], radius: f64, level: u32) -> f64 {
    let dist = center.iter().map(|c| c * c).sum::<f64>().sqrt();
    let rmax = radius.min(dist + TRUNCATION_RADIUS);
    if rmax <= 0.0 {
        return 0.0;
    }
    let level = level as usize;
    let panels = ((rmax / 0.5).ceil() as usize).max(1) * level;
    let radial = composite_legendre(0.0, rmax, panels, 12);
    let density = |x: &[f64]| e.weight(x) * normal::pdf_nd(x);
    let two_pi = 2.0 * std::f64::consts::PI;
    match center.len() {
        2 => {
            let nt = 48 * level;
            let mut sum = 0.0;
            for &(r, wr) in &radial {
                let mut ring = 0.0;
                for i in 0..nt {
                    let th = two_pi * i as f64 / nt as f64;
                    ring += density(&[center[0] + r * th.cos(), center[1] + r * th.sin()]);
                }
                sum += wr * r * ring * two_pi / nt as f64;
            }
            sum
        }
        3 => {
            let polar = composite_legendre(-1.0, 1.0, 2 * level, 12);
            let np = 32 * level;
            let mut sum = 0.0;
            for &(r, wr) in &radial {
                let mut shell = 0.0;
                for &(ct, wc) in &polar {
                    let st = (1.0 - ct * ct).sqrt();
                    let mut ring = 0.0;
                    for i in 0..np {
                        let ph = two_pi * i as f64 / np as f64;
                        ring += density(&[
                            center[0] + r * st * ph.cos(),
                            center[1] + r * st * ph.sin(),
                            center[2] + r * ct,
                        ]);
                    }
                    shell += wc * ring * two_pi / np as f64;
                }
                sum += wr * r * r * shell;
            }
            sum
        }
        _ => unreachable!("checked by caller"),
    }
}

/// Orthonormal basis whose first column is `u`.
fn completed_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let d = u.len();
    let mut basis = vec![u.to_vec()];
    for k in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

fn half_space_rule(e: &EdgeworthExpansion, normal_vec: &[f64], offset: f64, level: u32) -> f64 {
    let d = normal_vec.len();
    let norm = normal_vec.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u: Vec<f64> = normal_vec.iter().map(|v| v / norm).collect();
    let b = (offset / norm).min(TRUNCATION_RADIUS);
    let lo = (-TRUNCATION_RADIUS).min(b - 1.0);
    let basis = completed_basis(&u);
    let along = composite_legendre(lo, b, ((b - lo).ceil() as usize).max(1) * level as usize, 16);
    let (gh_x, gh_w) = gauss_hermite_normal(16);
    let others = d - 1;
    let combos = gh_x.len().pow(others as u32);
    let mut y = vec![0.0; d];
    let mut x = vec![0.0; d];
    let mut sum = 0.0;
    for &(y1, w1) in &along {
        y[0] = y1;
        let phi1 = normal::pdf(y1);
        for code in 0..combos {
            let mut c = code;
            let mut w = w1 * phi1;
            for k in 1..d {
                let idx = c % gh_x.len();
                c /= gh_x.len();
                y[k] = gh_x[idx];
                w *= gh_w[idx];
            }
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = (0..d).map(|k| basis[k][i] * y[k]).sum();
            }
            sum += w * e.weight(&x);
        }
    }
    sum
}
