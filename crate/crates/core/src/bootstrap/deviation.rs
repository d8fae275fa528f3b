use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::edgeworth::SetSpec;
use crate::error::{Error, Result};

/// A probability estimate with its standard error (0 for exact values).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, se: 0.0 }
    }

    /// A sample proportion `k/m` with its binomial standard error.
    pub fn proportion(k: u64, m: u64) -> Self {
        let p = k as f64 / m as f64;
        Estimate {
            value: p,
            se: (p * (1.0 - p) / m as f64).sqrt(),
        }
    }
}

/// The empirical law of a set of draws. One-dimensional draws are kept
/// sorted so half-lines and intervals cost a binary search.
#[derive(Clone, Debug)]
pub struct EmpiricalMeasure {
    draws: Dataset,
    sorted: Option<Vec<f64>>,
}

impl EmpiricalMeasure {
    pub fn new(draws: Dataset) -> Self {
        let sorted = (draws.dim() == 1).then(|| {
            let mut v = draws.as_flat().to_vec();
            v.sort_by(f64::total_cmp);
            v
        });
        EmpiricalMeasure { draws, sorted }
    }

    pub fn len(&self) -> u64 {
        self.draws.n() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.draws.n() == 0
    }

    pub fn dim(&self) -> usize {
        self.draws.dim()
    }

    pub fn draws(&self) -> &Dataset {
        &self.draws
    }

    fn count_le(&self, t: f64) -> u64 {
        let v = self.sorted.as_ref().expect("one-dimensional");
        v.partition_point(|x| *x <= t) as u64
    }

    fn count_lt(&self, t: f64) -> u64 {
        let v = self.sorted.as_ref().expect("one-dimensional");
        v.partition_point(|x| *x < t) as u64
    }

    /// Fraction of draws `≤ t` (one dimension).
    pub fn cdf(&self, t: f64) -> Result<Estimate> {
        if self.sorted.is_none() {
            return Err(Error::Dimension("cdf needs one-dimensional draws".into()));
        }
        Ok(Estimate::proportion(self.count_le(t), self.len()))
    }

    pub fn measure(&self, set: &SetSpec) -> Result<Estimate> {
        set.validate()?;
        if set.dim() != Some(self.dim()) {
            return Err(Error::Dimension("set and draws differ in dimension".into()));
        }
        let k = match (set, self.sorted.is_some()) {
            (SetSpec::HalfLine { upper }, true) => self.count_le(*upper),
            (SetSpec::Box { lower, upper }, true) => {
                if lower[0] > upper[0] {
                    0
                } else {
                    self.count_le(upper[0]) - self.count_lt(lower[0])
                }
            }
            _ => self.draws.points().filter(|p| set.contains(p)).count() as u64,
        };
        Ok(Estimate::proportion(k, self.len()))
    }
}

/// One member of a class in a sup-deviation scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationRecord {
    pub member: usize,
    pub q_emp: f64,
    pub q_tilde: f64,
    pub abs_dev: f64,
    /// `√(se_emp² + se_tilde²)`.
    pub mc_se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupDeviation {
    pub sup: f64,
    pub argmax: usize,
    pub records: Vec<DeviationRecord>,
}

/// `max_A |Q_emp(A) − Q̃(A)|` over the class, with per-member records.
pub fn sup_deviation<M>(
    class: &[M],
    q_emp: impl Fn(&M) -> Result<Estimate>,
    q_tilde: impl Fn(&M) -> Result<Estimate>,
) -> Result<SupDeviation> {
    if class.is_empty() {
        return Err(Error::invalid("empty set class"));
    }
    let mut records = Vec::with_capacity(class.len());
    for (member, a) in class.iter().enumerate() {
        let (e, t) = (q_emp(a)?, q_tilde(a)?);
        records.push(DeviationRecord {
            member,
            q_emp: e.value,
            q_tilde: t.value,
            abs_dev: (e.value - t.value).abs(),
            mc_se: e.se.hypot(t.se),
        });
    }
    let best = records
        .iter()
        .max_by(|a, b| a.abs_dev.total_cmp(&b.abs_dev).then(b.member.cmp(&a.member)))
        .expect("nonempty");
    Ok(SupDeviation {
        sup: best.abs_dev,
        argmax: best.member,
        records,
    })
}

/// `Q_emp(A^η) − Q_emp(A)`. The standard error is that of the shell
/// proportion.
pub fn enlargement_deviation(set: &SetSpec, eta: f64, q_emp: &EmpiricalMeasure) -> Result<Estimate> {
    let big = set.enlarge(eta)?;
    let inner = q_emp.measure(set)?;
    let outer = q_emp.measure(&big)?;
    let m = q_emp.len() as f64;
    let p = outer.value - inner.value;
    Ok(Estimate {
        value: p,
        se: (p * (1.0 - p) / m).max(0.0).sqrt(),
    })
}
