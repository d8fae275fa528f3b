use serde::{Deserialize, Serialize};

use super::hermite::{hermite_all, HermiteTable};
use super::pj::pj_polynomial;
use crate::cumulant::{CumulantSet, MultiIndex, Polynomial};
use crate::error::{Error, Result};
use crate::normal;

/// The signed measure `Σ_{j=0}^{s−2} n^{−j/2} P̃_j(−D) φ` in Hermite form.
///
/// Since `(−D)^ν φ = He_ν φ`, the coefficient of `z^ν` in `P̃_j` is also the
/// coefficient of `He_ν(x) φ(x)` in the density.
#[derive(Clone, Debug)]
pub struct EdgeworthExpansion {
    dim: usize,
    s: u32,
    n: u64,
    cumulants: CumulantSet,
    hermite: Vec<Polynomial>,
    /// Flattened `(exponents, n^{−j/2}·coeff)` over all `j`, including the
    /// constant Gaussian term.
    weights: Vec<(Vec<u32>, f64)>,
    max_degree: usize,
}

/// Builds the expansion of order `s` at sample size `n`.
pub fn build_expansion(c: &CumulantSet, n: u64, s: u32) -> Result<EdgeworthExpansion> {
    if !c.is_standardized() {
        return Err(Error::Standardization(
            "expansion needs centered, identity-covariance cumulants".into(),
        ));
    }
    if s < 2 || s > c.max_order() {
        return Err(Error::UnsupportedOrder(format!(
            "order s = {s} outside 2..={}",
            c.max_order()
        )));
    }
    if n == 0 {
        return Err(Error::invalid("sample size must be ≥ 1"));
    }
    let hermite = (0..=s - 2)
        .map(|j| pj_polynomial(j, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(EdgeworthExpansion::assemble(c.truncate(s), n, s, hermite))
}

impl EdgeworthExpansion {
    fn assemble(cumulants: CumulantSet, n: u64, s: u32, hermite: Vec<Polynomial>) -> Self {
        let dim = cumulants.dim();
        let mut weights = vec![];
        let mut max_degree = 0;
        for (j, p) in hermite.iter().enumerate() {
            let scale = (n as f64).powf(-(j as f64) / 2.0);
            for (nu, c) in p.terms() {
                max_degree = max_degree.max(nu.order() as usize);
                weights.push((nu.entries().to_vec(), scale * c));
            }
        }
        EdgeworthExpansion {
            dim,
            s,
            n,
            cumulants,
            hermite,
            weights,
            max_degree,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.s
    }

    pub fn sample_size(&self) -> u64 {
        self.n
    }

    pub fn cumulants(&self) -> &CumulantSet {
        &self.cumulants
    }

    /// `P̃_j` for `j = 0..=s−2`.
    pub fn term(&self, j: usize) -> Option<&Polynomial> {
        self.hermite.get(j)
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub(crate) fn weight_terms(&self) -> &[(Vec<u32>, f64)] {
        &self.weights
    }

    /// The polynomial factor `Σ_j n^{−j/2} Σ_ν a_{j,ν} He_ν(x)`; the density
    /// is this times `φ(x)`.
    pub fn weight(&self, x: &[f64]) -> f64 {
        let table = HermiteTable::new(self.max_degree, x);
        self.weights
            .iter()
            .map(|(e, c)| c * table.tensor(e))
            .sum()
    }

    /// Signed density; may be negative.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, expansion has {}",
                x.len(),
                self.dim
            )));
        }
        let w = self.weight(x);
        let phi = normal::pdf_nd(x);
        Ok(if phi == 0.0 { 0.0 } else { w * phi })
    }

    /// `Q̃((−∞, t])` in one dimension from the antiderivative
    /// `∫_{−∞}^t He_k φ = −He_{k−1}(t) φ(t)`, `k ≥ 1`.
    pub fn cdf_1d(&self, t: f64) -> Result<f64> {
        if self.dim != 1 {
            return Err(Error::Dimension(format!(
                "cdf_1d needs d = 1, expansion has d = {}",
                self.dim
            )));
        }
        if t == f64::INFINITY {
            return Ok(1.0);
        }
        if t == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        Ok(normal::cdf(t) + self.hermite_tail_1d(t))
    }

    /// `Σ_{k≥1} a_k ∫_{−∞}^t He_k φ`, the non-Gaussian part of the CDF.
    pub(crate) fn hermite_tail_1d(&self, t: f64) -> f64 {
        if !t.is_finite() {
            return 0.0;
        }
        let he = hermite_all(self.max_degree, t);
        let phi = normal::pdf(t);
        let sum: f64 = self
            .weights
            .iter()
            .filter(|(e, _)| e[0] >= 1)
            .map(|(e, c)| c * he[e[0] as usize - 1])
            .sum();
        -phi * sum
    }

    pub fn to_json(&self) -> ExpansionJson {
        ExpansionJson {
            d: self.dim,
            s: self.s,
            n: self.n,
            cumulants: self
                .cumulants
                .iter()
                .map(|(nu, v)| (nu.clone(), *v))
                .collect(),
            hermite: self
                .hermite
                .iter()
                .enumerate()
                .map(|(j, p)| HermiteTerm {
                    j: j as u32,
                    terms: p.terms().map(|(nu, v)| (nu.clone(), *v)).collect(),
                })
                .collect(),
        }
    }

    /// Rebuilds an expansion from its serialized coefficient table. The
    /// cumulants are kept as recorded; the Hermite terms are taken verbatim.
    pub fn from_json(doc: &ExpansionJson) -> Result<Self> {
        if doc.hermite.len() != doc.s.saturating_sub(1) as usize {
            return Err(Error::Parse(format!(
                "expected {} Hermite terms for s = {}",
                doc.s.saturating_sub(1),
                doc.s
            )));
        }
        let mut cumulants =
            CumulantSet::new(doc.d, doc.s, doc.cumulants.iter().cloned().collect())?;
        cumulants.mark_standardized(1e-9);
        let mut hermite = vec![];
        for (j, term) in doc.hermite.iter().enumerate() {
            if term.j as usize != j || term.terms.iter().any(|(nu, _)| nu.dim() != doc.d) {
                return Err(Error::Parse(format!("malformed Hermite term {j}")));
            }
            hermite.push(Polynomial::from_terms(doc.d, term.terms.iter().cloned()));
        }
        Ok(Self::assemble(cumulants, doc.n, doc.s, hermite))
    }
}

/// Serialized coefficient table:
/// `{d, s, n, cumulants: [[ν, value]…], hermite: [{j, terms: [[ν, coeff]…]}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionJson {
    pub d: usize,
    pub s: u32,
    pub n: u64,
    pub cumulants: Vec<(MultiIndex, f64)>,
    pub hermite: Vec<HermiteTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteTerm {
    pub j: u32,
    pub terms: Vec<(MultiIndex, f64)>,
}
