use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Exp, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cramer::CharFunctionHandle;
use crate::cumulant::{
    cumulants_to_moments, enumerate_multi_indices, moments_to_cumulants, CumulantSet,
    MomentSet, MomentSource, MultiIndex,
};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::StreamRng;

/// Location of the second mixture component.
const MIXTURE_SHIFT: f64 = 2.0;

/// The distribution behind a family; parameters are the θ vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `N(0, 1)`.
    Gaussian,
    /// `E − 1/λ`, `E ~ Exp(λ)`.
    CenteredExponential { rate: f64 },
    /// `G − k`, `G ~ Gamma(k, 1)`.
    Gamma { shape: f64 },
    Bernoulli { p: f64 },
    /// Uniform on `{0, 1, √2}`.
    ThreePointIrrational,
    /// `w·N(0, 1) + (1 − w)·N(2, 1)`.
    GaussianMixture { weight: f64 },
    /// `(W, W²)` for a one-dimensional base law `W`.
    SquarePushforward { base: Box<FamilyKind> },
}

impl FamilyKind {
    fn theta(&self) -> Vec<f64> {
        match self {
            FamilyKind::Gaussian | FamilyKind::ThreePointIrrational => vec![],
            FamilyKind::CenteredExponential { rate } => vec![*rate],
            FamilyKind::Gamma { shape } => vec![*shape],
            FamilyKind::Bernoulli { p } => vec![*p],
            FamilyKind::GaussianMixture { weight } => vec![*weight],
            FamilyKind::SquarePushforward { base } => base.theta(),
        }
    }

    fn with_theta(&self, theta: &[f64]) -> Result<FamilyKind> {
        let want = self.theta().len();
        if theta.len() != want {
            return Err(Error::invalid(format!(
                "family takes {want} parameters, got {}",
                theta.len()
            )));
        }
        let k = match self {
            FamilyKind::Gaussian | FamilyKind::ThreePointIrrational => self.clone(),
            FamilyKind::CenteredExponential { .. } => FamilyKind::CenteredExponential { rate: theta[0] },
            FamilyKind::Gamma { .. } => FamilyKind::Gamma { shape: theta[0] },
            FamilyKind::Bernoulli { .. } => FamilyKind::Bernoulli { p: theta[0] },
            FamilyKind::GaussianMixture { .. } => FamilyKind::GaussianMixture { weight: theta[0] },
            FamilyKind::SquarePushforward { base } => FamilyKind::SquarePushforward {
                base: Box::new(base.with_theta(theta)?),
            },
        };
        k.validate()?;
        Ok(k)
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            FamilyKind::Gaussian | FamilyKind::ThreePointIrrational => true,
            FamilyKind::CenteredExponential { rate } => *rate > 0.0 && rate.is_finite(),
            FamilyKind::Gamma { shape } => *shape > 0.0 && shape.is_finite(),
            FamilyKind::Bernoulli { p } => *p > 0.0 && *p < 1.0,
            FamilyKind::GaussianMixture { weight } => (0.0..=1.0).contains(weight),
            FamilyKind::SquarePushforward { base } => {
                !matches!(**base, FamilyKind::SquarePushforward { .. }) && base.validate().is_ok()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("parameters out of range: {self:?}")))
        }
    }

    fn dim(&self) -> usize {
        match self {
            FamilyKind::SquarePushforward { .. } => 2,
            _ => 1,
        }
    }

    fn lattice(&self) -> bool {
        matches!(self, FamilyKind::Bernoulli { .. })
    }

    /// `E W^k`, `k = 0..=max`, for one-dimensional kinds.
    fn moments_1d(&self, max: u32) -> Result<Vec<f64>> {
        let from_cumulants = |kappa: &dyn Fn(u32) -> f64| -> Result<Vec<f64>> {
            let c = CumulantSet::from_fn(1, max, |nu| kappa(nu.order()))?;
            let m = cumulants_to_moments(&c);
            Ok((0..=max).map(|k| m.get(&MultiIndex::new(vec![k])).copied().unwrap_or(1.0)).collect())
        };
        let gaussian = |k: u32| -> f64 {
            if k % 2 == 1 {
                0.0
            } else {
                (1..k).step_by(2).map(f64::from).product()
            }
        };
        Ok(match self {
            FamilyKind::Gaussian => (0..=max).map(gaussian).collect(),
            FamilyKind::CenteredExponential { rate } => {
                let rate = *rate;
                from_cumulants(&|r| {
                    if r == 1 {
                        0.0
                    } else {
                        (1..r).map(f64::from).product::<f64>() / rate.powi(r as i32)
                    }
                })?
            }
            FamilyKind::Gamma { shape } => {
                let shape = *shape;
                from_cumulants(&|r| {
                    if r == 1 {
                        0.0
                    } else {
                        shape * (1..r).map(f64::from).product::<f64>()
                    }
                })?
            }
            FamilyKind::Bernoulli { p } => (0..=max).map(|k| if k == 0 { 1.0 } else { *p }).collect(),
            FamilyKind::ThreePointIrrational => (0..=max)
                .map(|k| {
                    if k == 0 {
                        1.0
                    } else {
                        (1.0 + SQRT_2.powi(k as i32)) / 3.0
                    }
                })
                .collect(),
            FamilyKind::GaussianMixture { weight } => (0..=max)
                .map(|k| {
                    let shifted: f64 = (0..=k)
                        .map(|j| binom(k, j) * MIXTURE_SHIFT.powi((k - j) as i32) * gaussian(j))
                        .sum();
                    weight * gaussian(k) + (1.0 - weight) * shifted
                })
                .collect(),
            FamilyKind::SquarePushforward { .. } => {
                return Err(Error::Dimension("pushforward is two-dimensional".into()))
            }
        })
    }

    fn sample_1d(&self, rng: &mut StreamRng) -> f64 {
        match self {
            FamilyKind::Gaussian => StandardNormal.sample(rng),
            FamilyKind::CenteredExponential { rate } => {
                Exp::new(*rate).expect("validated").sample(rng) - 1.0 / rate
            }
            FamilyKind::Gamma { shape } => {
                Gamma::new(*shape, 1.0).expect("validated").sample(rng) - shape
            }
            FamilyKind::Bernoulli { p } => f64::from(u8::from(rng.random_bool(*p))),
            FamilyKind::ThreePointIrrational => [0.0, 1.0, SQRT_2][rng.random_range(0..3)],
            FamilyKind::GaussianMixture { weight } => {
                let z: f64 = StandardNormal.sample(rng);
                if rng.random_bool(*weight) {
                    z
                } else {
                    MIXTURE_SHIFT + z
                }
            }
            FamilyKind::SquarePushforward { .. } => unreachable!("two-dimensional"),
        }
    }

    fn cf_1d(&self, t: f64) -> Complex64 {
        let i = Complex64::i();
        match self {
            FamilyKind::Gaussian => Complex64::new((-0.5 * t * t).exp(), 0.0),
            FamilyKind::CenteredExponential { rate } => (-i * t / rate).exp() / (1.0 - i * t / rate),
            FamilyKind::Gamma { shape } => (-i * t * shape).exp() * (1.0 - i * t).powf(-shape),
            FamilyKind::Bernoulli { p } => 1.0 - p + p * (i * t).exp(),
            FamilyKind::ThreePointIrrational => (1.0 + (i * t).exp() + (i * t * SQRT_2).exp()) / 3.0,
            FamilyKind::GaussianMixture { weight } => {
                (-0.5 * t * t).exp() * (weight + (1.0 - weight) * (i * t * MIXTURE_SHIFT).exp())
            }
            FamilyKind::SquarePushforward { .. } => unreachable!("two-dimensional"),
        }
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// A named member of the registry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    pub kind: FamilyKind,
}

/// Exact sampler for `Σ_{i≤n} X_i`, available for one-dimensional families
/// with closed-form convolution.
#[derive(Clone, Debug)]
pub enum SumSampler {
    Normal { scale: f64 },
    Gamma { dist: Gamma<f64>, shift: f64 },
    Binomial { dist: Binomial },
    Mixture { n: u64, count: Binomial },
    ThreePoint { n: u64 },
}

impl SumSampler {
    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        match self {
            SumSampler::Normal { scale } => {
                let z: f64 = StandardNormal.sample(rng);
                scale * z
            },
            SumSampler::Gamma { dist, shift } => dist.sample(rng) - shift,
            SumSampler::Binomial { dist } => dist.sample(rng) as f64,
            SumSampler::Mixture { n, count } => {
                let k = count.sample(rng) as f64;
                let z: f64 = StandardNormal.sample(rng);
                MIXTURE_SHIFT * k + (*n as f64).sqrt() * z
            }
            SumSampler::ThreePoint { n } => {
                let ones = Binomial::new(*n, 1.0 / 3.0).expect("valid").sample(rng);
                let roots = Binomial::new(n - ones, 0.5).expect("valid").sample(rng);
                ones as f64 + SQRT_2 * roots as f64
            }
        }
    }
}

impl FamilySpec {
    pub fn new(name: impl Into<String>, kind: FamilyKind) -> Result<Self> {
        kind.validate()?;
        Ok(FamilySpec {
            name: name.into(),
            kind,
        })
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn theta(&self) -> Vec<f64> {
        self.kind.theta()
    }

    /// The same family at another parameter vector; the name is kept.
    pub fn with_theta(&self, theta: &[f64]) -> Result<FamilySpec> {
        Ok(FamilySpec {
            name: self.name.clone(),
            kind: self.kind.with_theta(theta)?,
        })
    }

    /// Expected weak-Cramér status: lattice laws fail it.
    pub fn lattice(&self) -> bool {
        match &self.kind {
            FamilyKind::SquarePushforward { base } => base.lattice(),
            k => k.lattice(),
        }
    }

    /// Draws one point into `out` (length `d`).
    pub fn sample_into(&self, rng: &mut StreamRng, out: &mut [f64]) {
        match &self.kind {
            FamilyKind::SquarePushforward { base } => {
                let w = base.sample_1d(rng);
                out[0] = w;
                out[1] = w * w;
            }
            k => out[0] = k.sample_1d(rng),
        }
    }

    pub fn sum_sampler(&self, n: u64) -> Option<SumSampler> {
        Some(match &self.kind {
            FamilyKind::Gaussian => SumSampler::Normal {
                scale: (n as f64).sqrt(),
            },
            FamilyKind::CenteredExponential { rate } => SumSampler::Gamma {
                dist: Gamma::new(n as f64, 1.0 / rate).ok()?,
                shift: n as f64 / rate,
            },
            FamilyKind::Gamma { shape } => SumSampler::Gamma {
                dist: Gamma::new(n as f64 * shape, 1.0).ok()?,
                shift: n as f64 * shape,
            },
            FamilyKind::Bernoulli { p } => SumSampler::Binomial {
                dist: Binomial::new(n, *p).ok()?,
            },
            FamilyKind::GaussianMixture { weight } => SumSampler::Mixture {
                n,
                count: Binomial::new(n, 1.0 - weight).ok()?,
            },
            FamilyKind::ThreePointIrrational => SumSampler::ThreePoint { n },
            FamilyKind::SquarePushforward { .. } => return None,
        })
    }

    /// `n` independent draws as a dataset.
    pub fn sample_dataset(&self, n: usize, rng: &mut StreamRng) -> Result<Dataset> {
        let d = self.dim();
        let mut x = vec![0.0; d];
        let mut pts = Vec::with_capacity(n * d);
        for _ in 0..n {
            self.sample_into(rng, &mut x);
            pts.extend_from_slice(&x);
        }
        Dataset::new(d, pts)
    }

    /// Closed-form characteristic function, where one exists.
    pub fn cf(&self) -> Option<CharFunctionHandle> {
        if self.dim() != 1 {
            return None;
        }
        let kind = self.kind.clone();
        Some(CharFunctionHandle::analytic(self.name.clone(), 1, move |t| kind.cf_1d(t[0])))
    }

    /// Mean vector and covariance matrix from the analytic moments.
    pub fn mean_covariance(&self) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let d = self.dim();
        let m = self.raw_moments(2)?;
        let mean: Vec<f64> = (0..d).map(|k| m.get(&MultiIndex::unit(d, k)).copied().unwrap()).collect();
        let cov = DMatrix::from_fn(d, d, |i, j| {
            let nu = MultiIndex::unit(d, i).add(&MultiIndex::unit(d, j));
            m.get(&nu).copied().unwrap() - mean[i] * mean[j]
        });
        Ok((mean, cov))
    }

    /// Cumulants of `V^{−1/2}(X − μ)` up to order `s`.
    pub fn standardized_cumulants(&self, s: u32) -> Result<CumulantSet> {
        let d = self.dim();
        let raw = moments_to_cumulants(&self.raw_moments(s)?);
        let centered = CumulantSet::from_fn(d, s, |nu| {
            if nu.order() == 1 {
                0.0
            } else {
                *raw.get(nu).unwrap()
            }
        })?;
        let (_, cov) = self.mean_covariance()?;
        let a = linalg::sym_inv_sqrt(&cov)?;
        let rows: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| a[(i, j)]).collect()).collect();
        let mut c = centered.linear_transform(&rows)?;
        if !c.mark_standardized(1e-9) {
            return Err(Error::Standardization(format!(
                "{} did not standardize",
                self.name
            )));
        }
        Ok(c)
    }

    /// Moment-cap proxy for `E‖Z‖^s`, `Z` standardized: the Lyapunov bound
    /// `(E‖Z‖^{2k})^{s/2k}` with `2k` the smallest even integer `≥ s`.
    pub fn moment_proxy(&self, s: u32) -> Result<f64> {
        let k = s.div_ceil(2);
        let d = self.dim();
        let m = cumulants_to_moments(&self.standardized_cumulants(2 * k)?);
        let mut total = 0.0;
        for v in enumerate_multi_indices(d, i64::from(k))?.into_iter().filter(|v| v.order() == k) {
            let multinomial = (1..=k).map(f64::from).product::<f64>() / v.factorial();
            let doubled = MultiIndex::new(v.entries().iter().map(|e| 2 * e).collect());
            total += multinomial * m.get(&doubled).copied().unwrap();
        }
        Ok(total.powf(f64::from(s) / f64::from(2 * k)))
    }
}

impl MomentSource for FamilySpec {
    fn dim(&self) -> usize {
        self.kind.dim()
    }

    fn raw_moments(&self, max_order: u32) -> Result<MomentSet> {
        match &self.kind {
            FamilyKind::SquarePushforward { base } => {
                let w = base.moments_1d(2 * max_order)?;
                MomentSet::from_fn(2, max_order, |nu| {
                    let e = nu.entries();
                    Ok(w[(e[0] + 2 * e[1]) as usize])
                })
            }
            k => {
                let w = k.moments_1d(max_order)?;
                MomentSet::from_fn(1, max_order, |nu| Ok(w[nu.order() as usize]))
            }
        }
    }
}

/// Families available to the study drivers, keyed by name.
#[derive(Clone, Debug, Default)]
pub struct FamilyRegistry {
    families: BTreeMap<String, FamilySpec>,
}

impl FamilyRegistry {
    pub fn insert(&mut self, spec: FamilySpec) {
        self.families.insert(spec.name.clone(), spec);
    }

    pub fn get(&self, name: &str) -> Result<&FamilySpec> {
        self.families.get(name).ok_or_else(|| {
            Error::invalid(format!(
                "unknown family {name:?}; known: {}",
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.families.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FamilySpec> {
        self.families.values()
    }
}

pub fn register_builtin_families() -> FamilyRegistry {
    let exp = FamilyKind::CenteredExponential { rate: 1.0 };
    let builtin = [
        ("gaussian", FamilyKind::Gaussian),
        ("centered-exponential", exp.clone()),
        ("gamma(2)", FamilyKind::Gamma { shape: 2.0 }),
        ("bernoulli(1/2)", FamilyKind::Bernoulli { p: 0.5 }),
        ("three-point-irrational", FamilyKind::ThreePointIrrational),
        ("gaussian-mixture", FamilyKind::GaussianMixture { weight: 0.5 }),
        (
            "square-pushforward(centered-exponential)",
            FamilyKind::SquarePushforward { base: Box::new(exp) },
        ),
        (
            "square-pushforward(gaussian)",
            FamilyKind::SquarePushforward {
                base: Box::new(FamilyKind::Gaussian),
            },
        ),
    ];
    let mut reg = FamilyRegistry::default();
    for (name, kind) in builtin {
        reg.insert(FamilySpec::new(name, kind).expect("builtin parameters are valid"));
    }
    reg
}
