use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Convex test sets on which signed and empirical measures are compared.
///
/// In JSON, an unbounded box side is written as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SetSpec {
    /// `(−∞, upper]` in one dimension.
    HalfLine { upper: f64 },
    /// `Π_k [lower_k, upper_k]`; infinite sides allowed.
    Box {
        #[serde(with = "lower_bounds")]
        lower: Vec<f64>,
        #[serde(with = "upper_bounds")]
        upper: Vec<f64>,
    },
    /// Closed Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// `{x : normal·x ≤ offset}`.
    HalfSpace { normal: Vec<f64>, offset: f64 },
}

macro_rules! bound_serde {
    ($name:ident, $missing:expr) => {
        mod $name {
            use serde::{Deserialize, Deserializer, Serialize, Serializer};

            pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
                v.iter()
                    .map(|x| x.is_finite().then_some(*x))
                    .collect::<Vec<_>>()
                    .serialize(s)
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
                let v: Vec<Option<f64>> = Vec::deserialize(d)?;
                Ok(v.into_iter().map(|x| x.unwrap_or($missing)).collect())
            }
        }
    };
}

bound_serde!(lower_bounds, f64::NEG_INFINITY);
bound_serde!(upper_bounds, f64::INFINITY);

impl SetSpec {
    pub fn whole_space(dim: usize) -> Self {
        SetSpec::Box {
            lower: vec![f64::NEG_INFINITY; dim],
            upper: vec![f64::INFINITY; dim],
        }
    }

    /// Axis-aligned box `[lo, hi]^d`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        SetSpec::Box {
            lower: vec![lo; dim],
            upper: vec![hi; dim],
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            SetSpec::HalfLine { .. } => Some(1),
            SetSpec::Box { lower, .. } => Some(lower.len()),
            SetSpec::Ball { center, .. } => Some(center.len()),
            SetSpec::HalfSpace { normal, .. } => Some(normal.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SetSpec::HalfLine { upper } if upper.is_nan() => {
                Err(Error::invalid("half-line endpoint is NaN"))
            }
            SetSpec::Box { lower, upper } => {
                if lower.len() != upper.len() || lower.is_empty() {
                    return Err(Error::Dimension("box bounds differ in length".into()));
                }
                if lower.iter().zip(upper).any(|(l, u)| !(l <= u)) {
                    return Err(Error::invalid("box bounds must satisfy low ≤ high"));
                }
                Ok(())
            }
            SetSpec::Ball { center, radius } => {
                if center.is_empty() || !(*radius >= 0.0) || center.iter().any(|c| !c.is_finite())
                {
                    return Err(Error::invalid("ball needs a finite center and radius ≥ 0"));
                }
                Ok(())
            }
            SetSpec::HalfSpace { normal, offset } => {
                let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
                if normal.is_empty() || !(norm > 0.0) || offset.is_nan() {
                    return Err(Error::invalid("half-space needs a nonzero normal"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            SetSpec::HalfLine { upper } => x[0] <= *upper,
            SetSpec::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (l, u))| l <= v && v <= u),
            SetSpec::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>() <= radius * radius
            }
            SetSpec::HalfSpace { normal, offset } => {
                x.iter().zip(normal).map(|(a, b)| a * b).sum::<f64>() <= *offset
            }
        }
    }

    /// Euclidean distance from `x` to the boundary of the set.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match self {
            SetSpec::HalfLine { upper } => (x[0] - upper).abs(),
            SetSpec::Box { lower, upper } => {
                if self.contains(x) {
                    x.iter()
                        .zip(lower.iter().zip(upper))
                        .map(|(v, (l, u))| (v - l).min(u - v))
                        .fold(f64::INFINITY, f64::min)
                } else {
                    x.iter()
                        .zip(lower.iter().zip(upper))
                        .map(|(v, (l, u))| (l - v).max(v - u).max(0.0).powi(2))
                        .sum::<f64>()
                        .sqrt()
                }
            }
            SetSpec::Ball { center, radius } => {
                let r = x
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                (r - radius).abs()
            }
            SetSpec::HalfSpace { normal, offset } => {
                let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
                let proj = x.iter().zip(normal).map(|(a, b)| a * b).sum::<f64>();
                (proj - offset).abs() / norm
            }
        }
    }

    /// Moves every face outward by `eta`: half-line endpoints, box bounds,
    /// ball radii and half-space offsets.
    pub fn enlarge(&self, eta: f64) -> Result<SetSpec> {
        if !(eta >= 0.0) {
            return Err(Error::invalid(format!("enlargement η = {eta} must be ≥ 0")));
        }
        Ok(match self {
            SetSpec::HalfLine { upper } => SetSpec::HalfLine { upper: upper + eta },
            SetSpec::Box { lower, upper } => SetSpec::Box {
                lower: lower.iter().map(|l| l - eta).collect(),
                upper: upper.iter().map(|u| u + eta).collect(),
            },
            SetSpec::Ball { center, radius } => SetSpec::Ball {
                center: center.clone(),
                radius: radius + eta,
            },
            SetSpec::HalfSpace { normal, offset } => {
                let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
                SetSpec::HalfSpace {
                    normal: normal.clone(),
                    offset: offset + eta * norm,
                }
            }
        })
    }
}
