use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

type CfFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

/// A characteristic function: closed form or the empirical sum
/// `(1/n) Σ_j exp(i t·u_j)`.
#[derive(Clone)]
pub enum CharFunctionHandle {
    Empirical(Dataset),
    Analytic {
        name: String,
        dim: usize,
        cf: Arc<CfFn>,
    },
}

impl fmt::Debug for CharFunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharFunctionHandle::Empirical(d) => write!(f, "Empirical(n={}, d={})", d.n(), d.dim()),
            CharFunctionHandle::Analytic { name, dim, .. } => {
                write!(f, "Analytic({name}, d={dim})")
            }
        }
    }
}

impl CharFunctionHandle {
    pub fn empirical(data: Dataset) -> Self {
        CharFunctionHandle::Empirical(data)
    }

    pub fn analytic(
        name: impl Into<String>,
        dim: usize,
        cf: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        CharFunctionHandle::Analytic {
            name: name.into(),
            dim,
            cf: Arc::new(cf),
        }
    }

    /// Standard normal on `R^d`: `exp(−‖t‖²/2)`.
    pub fn standard_normal(dim: usize) -> Self {
        Self::analytic(format!("normal({dim})"), dim, |t| {
            Complex64::new((-0.5 * t.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            CharFunctionHandle::Empirical(d) => d.dim(),
            CharFunctionHandle::Analytic { dim, .. } => *dim,
        }
    }

    pub fn dataset(&self) -> Option<&Dataset> {
        match self {
            CharFunctionHandle::Empirical(d) => Some(d),
            CharFunctionHandle::Analytic { .. } => None,
        }
    }

    pub fn eval(&self, t: &[f64]) -> Result<Complex64> {
        if t.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "argument has {} coordinates, cf has {}",
                t.len(),
                self.dim()
            )));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: &[f64]) -> Complex64 {
        match self {
            CharFunctionHandle::Empirical(data) => {
                let (mut re, mut im) = (0.0, 0.0);
                for p in data.points() {
                    let phase: f64 = p.iter().zip(t).map(|(x, s)| x * s).sum();
                    let (sin, cos) = phase.sin_cos();
                    re += cos;
                    im += sin;
                }
                let n = data.n() as f64;
                Complex64::new(re / n, im / n)
            }
            CharFunctionHandle::Analytic { cf, .. } => cf(t),
        }
    }
}

/// `φ(t)` for the handle.
pub fn eval_cf(h: &CharFunctionHandle, t: &[f64]) -> Result<Complex64> {
    h.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let point = CharFunctionHandle::empirical(Dataset::from_values(&[0.0]).unwrap());
        assert_eq!(eval_cf(&point, &[3.7]).unwrap(), Complex64::new(1.0, 0.0));
        let two = CharFunctionHandle::empirical(Dataset::from_values(&[-1.0, 1.0]).unwrap());
        for &t in &[0.0, 0.4, 2.0, 9.1] {
            let v = eval_cf(&two, &[t]).unwrap();
            assert!((v.re - t.cos()).abs() < 1e-15 && v.im.abs() < 1e-15);
        }
        let g = CharFunctionHandle::standard_normal(1);
        assert_eq!(eval_cf(&g, &[1.5]).unwrap().re, (-1.125f64).exp());
        assert!(eval_cf(&g, &[1.0, 2.0]).is_err());
    }
}
