//! Pairwise U-statistics behind the empirical weak Cramér certificate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::cf::CharFunctionHandle;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// `inf_q (t·(u_i − u_j) − 2πq)²`: the phase difference wrapped to
/// `(−π, π]`, squared. The nearest `q` comes from rounding; an exact tie at
/// `±π` resolves to `+π`.
pub fn xi_wrap(ui: &[f64], uj: &[f64], t: &[f64]) -> f64 {
    let phase: f64 = ui
        .iter()
        .zip(uj)
        .zip(t)
        .map(|((a, b), s)| s * (a - b))
        .sum();
    wrapped_square(phase)
}

pub(crate) fn wrapped_square(phase: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = phase - two_pi * (phase / two_pi).round();
    if r <= -PI {
        r += two_pi;
    }
    r * r
}

fn check_pairs(data: &Dataset) -> Result<()> {
    if data.n() < 2 {
        return Err(Error::invalid("pairwise statistics need n ≥ 2"));
    }
    Ok(())
}

/// `(1/(n(n−1))) Σ_{i≠j} ξ(u_i, u_j; t)`.
fn mean_xi(data: &Dataset, t: &[f64]) -> f64 {
    // project once, then pairs are scalar differences
    let proj: Vec<f64> = data
        .points()
        .map(|p| p.iter().zip(t).map(|(x, s)| x * s).sum())
        .collect();
    let n = proj.len();
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += wrapped_square(proj[i] - proj[j]);
        }
    }
    2.0 * sum / (n * (n - 1)) as f64
}

/// One evaluation of the certificate inequality `1 − |φ_emp(t)| ≥ S(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UstatRecord {
    pub t: Vec<f64>,
    pub norm: f64,
    /// `S(t) = (1/(π² n(n−1))) Σ_{i≠j} ξ_ij(t)`.
    pub s_value: f64,
    pub one_minus_abs_cf: f64,
    /// `S(t)·‖t‖^b`.
    pub scaled: f64,
    pub holds: bool,
}

/// The U-statistic lower bound on `1 − |φ_emp(t)|`.
pub fn ustat_certificate(data: &Dataset, t: &[f64], b: f64) -> Result<UstatRecord> {
    check_pairs(data)?;
    if t.len() != data.dim() {
        return Err(Error::Dimension("t does not match dataset dimension".into()));
    }
    let s_value = mean_xi(data, t) / (PI * PI);
    let cf = CharFunctionHandle::empirical(data.clone()).eval_unchecked(t);
    let one_minus_abs_cf = 1.0 - cf.norm();
    let norm = t.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(UstatRecord {
        t: t.to_vec(),
        norm,
        s_value,
        one_minus_abs_cf,
        scaled: s_value * norm.powf(b),
        holds: one_minus_abs_cf >= s_value - 1e-12,
    })
}

/// U-statistic estimate with its standard error from the Hoeffding
/// projection, `2·sd(h₁)/√n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UstatEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Estimates `c_P(k; r)` on coordinate `coord` over ordered pairs:
/// `E[(Δ − rk)² 1{Δ ∈ (rk, r(k+1))}]` for even `k` and
/// `E[(Δ − r(k+1))² 1{Δ ∈ (rk, r(k+1)]}]` for odd `k`, `Δ = X_{1j} − X_{2j}`.
pub fn c_kr_estimate(data: &Dataset, k: i64, r: f64, coord: usize) -> Result<UstatEstimate> {
    check_pairs(data)?;
    if !(r > 0.0) {
        return Err(Error::invalid("r must be positive"));
    }
    if coord >= data.dim() {
        return Err(Error::Dimension(format!("coordinate {coord} out of range")));
    }
    let lo = r * k as f64;
    let hi = r * (k + 1) as f64;
    let kernel = |delta: f64| -> f64 {
        if k.rem_euclid(2) == 0 {
            if delta > lo && delta < hi {
                (delta - lo).powi(2)
            } else {
                0.0
            }
        } else if delta > lo && delta <= hi {
            (delta - hi).powi(2)
        } else {
            0.0
        }
    };
    let x = data.column(coord);
    let n = x.len();
    let mut row = vec![0.0; n];
    for i in 0..n {
        for j in i + 1..n {
            let h = 0.5 * (kernel(x[i] - x[j]) + kernel(x[j] - x[i]));
            row[i] += h;
            row[j] += h;
        }
    }
    let proj: Vec<f64> = row.iter().map(|s| s / (n - 1) as f64).collect();
    let estimate = proj.iter().sum::<f64>() / n as f64;
    let var = if n > 2 {
        proj.iter().map(|h| (h - estimate).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    Ok(UstatEstimate {
        estimate,
        std_error: 2.0 * (var / n as f64).sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrBound {
    pub value: f64,
    pub argmax: Vec<f64>,
}

/// Grid lower bound for `sup_{‖t‖>R} (1/(2π²)) E[ξ(X₁, X₂; t)]`, with the
/// maximizing grid point.
pub fn c_r_lower_bound(data: &Dataset, r_inner: f64, t_grid: &[Vec<f64>]) -> Result<CrBound> {
    check_pairs(data)?;
    if t_grid.is_empty() {
        return Err(Error::invalid("empty t grid"));
    }
    let mut best = CrBound {
        value: f64::NEG_INFINITY,
        argmax: vec![],
    };
    for t in t_grid {
        if t.len() != data.dim() {
            return Err(Error::Dimension("grid point does not match dataset".into()));
        }
        let norm = t.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > r_inner) {
            return Err(Error::invalid(format!(
                "grid point with ‖t‖ = {norm} is not beyond R = {r_inner}"
            )));
        }
        let v = mean_xi(data, t) / (2.0 * PI * PI);
        if v > best.value {
            best = CrBound {
                value: v,
                argmax: t.clone(),
            };
        }
    }
    Ok(best)
}

/// `exp(−c_R² n / 2)`.
pub fn failure_prob_bound(c_r: f64, n: u64) -> Result<f64> {
    if !(c_r > 0.0) || n == 0 {
        return Err(Error::invalid("need c_R > 0 and n ≥ 1"));
    }
    Ok((-c_r * c_r * n as f64 / 2.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_examples() {
        assert!(xi_wrap(&[2.0 * PI], &[0.0], &[1.0]) < 1e-30);
        assert_eq!(xi_wrap(&[PI], &[0.0], &[1.0]), PI * PI);
        assert_eq!(xi_wrap(&[-PI], &[0.0], &[1.0]), PI * PI);
        assert!((xi_wrap(&[0.5], &[0.0], &[1.0]) - 0.25).abs() < 1e-15);
        assert!((xi_wrap(&[0.5 + 2.0 * PI], &[0.0], &[1.0]) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn two_point_certificate_is_tight() {
        let d = Dataset::from_values(&[0.0, PI]).unwrap();
        let rec = ustat_certificate(&d, &[1.0], 1.0).unwrap();
        assert!((rec.s_value - 1.0).abs() < 1e-15);
        assert!((rec.one_minus_abs_cf - 1.0).abs() < 1e-15);
        assert!(rec.holds);
        let cr = c_r_lower_bound(&d, 0.5, &[vec![1.0]]).unwrap();
        assert!((cr.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_data() {
        let d = Dataset::from_values(&[1.3; 5]).unwrap();
        let rec = ustat_certificate(&d, &[2.0], 1.0).unwrap();
        assert_eq!(rec.s_value, 0.0);
        assert!(rec.holds);
        assert_eq!(c_r_lower_bound(&d, 1.0, &[vec![2.0]]).unwrap().value, 0.0);
        let one = Dataset::from_values(&[1.0]).unwrap();
        assert!(ustat_certificate(&one, &[1.0], 1.0).is_err());
        assert!(c_kr_estimate(&one, 0, 1.0, 0).is_err());
        assert!(c_r_lower_bound(&d, 1.0, &[]).is_err());
        assert!(c_r_lower_bound(&d, 3.0, &[vec![2.0]]).is_err());
    }

    #[test]
    fn c_kr_two_points() {
        // rk = 0.5 < a = 0.7 < r(k+1) = 1.0 with r = 0.5, k = 1 (odd) and k' = 0 (even, r = 1)
        let a = 0.7;
        let d = Dataset::from_values(&[0.0, a]).unwrap();
        let even = c_kr_estimate(&d, 0, 1.0, 0).unwrap();
        assert!((even.estimate - a * a / 2.0).abs() < 1e-15);
        let even2 = c_kr_estimate(&d, 2, 0.3, 0).unwrap();
        assert!((even2.estimate - (a - 0.6f64).powi(2) / 2.0).abs() < 1e-15);
        let odd = c_kr_estimate(&d, 1, 0.5, 0).unwrap();
        assert!((odd.estimate - (a - 1.0f64).powi(2) / 2.0).abs() < 1e-15);
        assert_eq!(c_kr_estimate(&d, 5, 1.0, 0).unwrap().estimate, 0.0);
    }

    #[test]
    fn failure_bound() {
        assert!((failure_prob_bound(0.1, 1000).unwrap() / (-5f64).exp() - 1.0).abs() < 1e-14);
        assert!((failure_prob_bound(0.1, 1000).unwrap() - 6.7379e-3).abs() < 1e-7);
        assert!(failure_prob_bound(0.2, 1000).unwrap() < failure_prob_bound(0.1, 1000).unwrap());
        assert!(failure_prob_bound(0.1, 2000).unwrap() < failure_prob_bound(0.1, 1000).unwrap());
        assert!(failure_prob_bound(0.0, 10).is_err());
        assert!(failure_prob_bound(0.1, 0).is_err());
    }
}
