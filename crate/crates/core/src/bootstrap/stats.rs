use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::jet::g_value_and_jet;
use crate::cumulant::enumerate_multi_indices;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;

/// Mean, covariance (denominator `n`) and moment diagnostics of a sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n: usize,
    pub mean: Vec<f64>,
    /// Row-major `d×d`.
    pub covariance: Vec<Vec<f64>>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub s: u32,
    /// `(1/n) Σ ‖X_i‖^s`.
    pub norm_moment: f64,
    /// `max_{1≤|v|≤s} (1/n) Σ_i Π_k |X_ik|^{v_k}`.
    pub max_mixed_moment: f64,
}

impl SampleStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn covariance_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.covariance[i][j])
    }
}

pub fn sample_stats(data: &Dataset, s: u32) -> Result<SampleStats> {
    if data.n() < 2 {
        return Err(Error::invalid("sample statistics need n ≥ 2"));
    }
    let d = data.dim();
    let n = data.n() as f64;
    let mean = data.mean();
    let mut cov = vec![vec![0.0; d]; d];
    for p in data.points() {
        for i in 0..d {
            let di = p[i] - mean[i];
            for j in 0..=i {
                cov[i][j] += di * (p[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in 0..=i {
            cov[i][j] /= n;
            cov[j][i] = cov[i][j];
        }
    }
    let ev = linalg::sym_eigenvalues(&DMatrix::from_fn(d, d, |i, j| cov[i][j]))?;
    let norm_moment = data
        .points()
        .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt().powi(s as i32))
        .sum::<f64>()
        / n;
    let mut max_mixed: f64 = 0.0;
    for v in enumerate_multi_indices(d, i64::from(s))?.iter().filter(|v| !v.is_zero()) {
        let m = data
            .points()
            .map(|p| {
                p.iter()
                    .zip(v.entries())
                    .map(|(x, &e)| x.abs().powi(e as i32))
                    .product::<f64>()
            })
            .sum::<f64>()
            / n;
        max_mixed = max_mixed.max(m);
    }
    Ok(SampleStats {
        n: data.n(),
        mean,
        covariance: cov,
        lambda_min: ev[0].max(0.0),
        lambda_max: ev[d - 1].max(0.0),
        s,
        norm_moment,
        max_mixed_moment: max_mixed,
    })
}

/// Thresholds for the good-sample events.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventThresholds {
    pub rho_bar: f64,
    pub c1: f64,
    pub c2: f64,
    /// Derivative and top-eigenvalue cap; the derivative check needs `d = 2`
    /// data of the form `(W, W²)`.
    pub c3: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub holds: bool,
    pub statistic: f64,
    pub threshold: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetFlag {
    pub holds: bool,
    /// `max_{|α|≤s+3} |D^α g_n(X̄)|`.
    pub max_derivative: f64,
    pub lambda_max: f64,
    pub threshold: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventFlags {
    /// Norm moment at most `ρ̄`.
    pub e0: Flag,
    /// Smallest covariance eigenvalue at least `c₁`.
    pub e1: Flag,
    /// Mixed absolute moments at most `c₂`.
    pub e2: Flag,
    pub e3: Option<JetFlag>,
}

impl EventFlags {
    pub fn all_hold(&self) -> bool {
        self.e0.holds && self.e1.holds && self.e2.holds && self.e3.is_none_or(|f| f.holds)
    }
}

pub fn event_checks(data: &Dataset, s: u32, th: &EventThresholds) -> Result<EventFlags> {
    let positive = [th.rho_bar, th.c1, th.c2, th.c3.unwrap_or(1.0)];
    if positive.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("event thresholds must be positive"));
    }
    let st = sample_stats(data, s)?;
    let e3 = match th.c3 {
        None => None,
        Some(c3) => {
            if data.dim() != 2 {
                return Err(Error::Dimension("the derivative event needs d = 2".into()));
            }
            let jet = g_value_and_jet(&st.mean, st.mean[0], s + 3)?;
            let max_derivative = jet.max_abs();
            Some(JetFlag {
                holds: max_derivative <= c3 && st.lambda_max <= c3,
                max_derivative,
                lambda_max: st.lambda_max,
                threshold: c3,
            })
        }
    };
    Ok(EventFlags {
        e0: Flag {
            holds: st.norm_moment <= th.rho_bar,
            statistic: st.norm_moment,
            threshold: th.rho_bar,
        },
        e1: Flag {
            holds: st.lambda_min >= th.c1,
            statistic: st.lambda_min,
            threshold: th.c1,
        },
        e2: Flag {
            holds: st.max_mixed_moment <= th.c2,
            statistic: st.max_mixed_moment,
            threshold: th.c2,
        },
        e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let st = sample_stats(&Dataset::from_values(&[0.0, 2.0]).unwrap(), 3).unwrap();
        assert_eq!(st.mean, vec![1.0]);
        assert_eq!(st.covariance, vec![vec![1.0]]);
        assert_eq!(st.norm_moment, 4.0);
        assert_eq!(st.max_mixed_moment, 4.0);
    }

    #[test]
    fn constant_sample_has_zero_covariance() {
        let st = sample_stats(&Dataset::from_values(&[3.0; 5]).unwrap(), 2).unwrap();
        assert_eq!((st.lambda_min, st.lambda_max), (0.0, 0.0));
        assert!(sample_stats(&Dataset::from_values(&[1.0]).unwrap(), 2).is_err());
    }

    #[test]
    fn line_data_fails_e1() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let data = Dataset::from_rows(&rows).unwrap();
        let th = EventThresholds {
            rho_bar: 1e9,
            c1: 1e-8,
            c2: 1e9,
            c3: None,
        };
        let f = event_checks(&data, 3, &th).unwrap();
        assert!(f.e0.holds && f.e2.holds && !f.e1.holds);
        assert!(!f.all_hold());
    }

    #[test]
    fn e3_needs_positive_variance_at_mean() {
        // (W, W²) with W constant: x̄₂ = x̄₁²
        let rows = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let th = EventThresholds {
            rho_bar: 10.0,
            c1: 0.1,
            c2: 10.0,
            c3: Some(10.0),
        };
        let err = event_checks(&Dataset::from_rows(&rows).unwrap(), 3, &th).unwrap_err();
        assert!(matches!(err, Error::Singularity(_)));
    }
}
