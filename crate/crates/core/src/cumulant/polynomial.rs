use std::collections::BTreeMap;

use super::multi_index::MultiIndex;
use super::scalar::Scalar;

/// A polynomial in `z ∈ R^d`, stored as a sparse map from exponent to
/// coefficient. Exact zeros are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T = f64> {
    dim: usize,
    terms: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zero(dim), c);
        p
    }

    /// The linear form `Σ_l a_l z_l`.
    pub fn linear(coeffs: &[T]) -> Self {
        let dim = coeffs.len();
        let mut p = Self::zero(dim);
        for (l, a) in coeffs.iter().enumerate() {
            p.add_term(MultiIndex::unit(dim, l), a.clone());
        }
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, T)>) -> Self {
        let mut p = Self::zero(dim);
        for (nu, c) in terms {
            p.add_term(nu, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·z^ν`, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, nu: MultiIndex, c: T) {
        debug_assert_eq!(nu.dim(), self.dim);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(nu.clone()).or_insert_with(T::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.remove(&nu);
        }
    }

    pub fn coeff(&self, nu: &MultiIndex) -> T {
        self.terms.get(nu).cloned().unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.terms.iter()
    }

    /// Orders of all stored monomials, ascending and deduplicated.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(MultiIndex::order).collect();
        d.dedup();
        d
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_terms(
            self.dim,
            self.terms.iter().map(|(k, v)| (k.clone(), v.clone() * c.clone())),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                out.add_term(ka.add(kb), va.clone() * vb.clone());
            }
        }
        out
    }

    /// Evaluates with a caller-supplied basis, `Σ c_ν · basis(ν)`.
    pub fn eval_with(&self, mut basis: impl FnMut(&MultiIndex) -> T) -> T {
        self.terms
            .iter()
            .fold(T::zero(), |acc, (k, v)| acc + v.clone() * basis(k))
    }
}

impl Polynomial<f64> {
    pub fn eval(&self, z: &[f64]) -> f64 {
        self.eval_with(|nu| nu.monomial(z))
    }

    /// Drops coefficients below `tol` in absolute value.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, v| v.abs() > tol);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_linear_forms() {
        // (z1 + z2)(z1 - z2) = z1² - z2²
        let a = Polynomial::linear(&[1.0, 1.0]);
        let b = Polynomial::linear(&[1.0, -1.0]);
        let p = a.mul(&b);
        assert_eq!(p.coeff(&MultiIndex::new(vec![2, 0])), 1.0);
        assert_eq!(p.coeff(&MultiIndex::new(vec![0, 2])), -1.0);
        assert_eq!(p.terms().count(), 2, "cross term cancels and is not stored");
        assert_eq!(p.degrees(), vec![2]);
        assert_eq!(p.eval(&[3.0, 2.0]), 5.0);
    }
}
