use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::multi_index::{enumerate_multi_indices, indices_of_order, MultiIndex};
use super::polynomial::Polynomial;
use super::scalar::Scalar;
use crate::error::{Error, Result};
use crate::linalg;

/// Raw moments `E[X^ν]` for every `|ν| ≤ max_order`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet<T = f64> {
    dim: usize,
    max_order: u32,
    table: BTreeMap<MultiIndex, T>,
}

/// Cumulants `χ_ν` for `1 ≤ |ν| ≤ max_order`.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantSet<T = f64> {
    dim: usize,
    max_order: u32,
    table: BTreeMap<MultiIndex, T>,
    standardized: bool,
}

/// Anything with computable raw moments: analytic families and datasets.
pub trait MomentSource {
    fn dim(&self) -> usize;
    fn raw_moments(&self, max_order: u32) -> Result<MomentSet>;
}

fn check_complete<T>(
    dim: usize,
    max_order: u32,
    table: &BTreeMap<MultiIndex, T>,
    min_order: u32,
) -> Result<()> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let expected: Vec<MultiIndex> = enumerate_multi_indices(dim, i64::from(max_order))?
        .into_iter()
        .filter(|nu| nu.order() >= min_order)
        .collect();
    if table.len() != expected.len() || expected.iter().any(|nu| !table.contains_key(nu)) {
        return Err(Error::invalid(format!(
            "table must hold exactly the {} indices with {min_order} ≤ |ν| ≤ {max_order} in d={dim}",
            expected.len()
        )));
    }
    Ok(())
}

impl<T: Scalar> MomentSet<T> {
    pub fn new(dim: usize, max_order: u32, table: BTreeMap<MultiIndex, T>) -> Result<Self> {
        check_complete(dim, max_order, &table, 0)?;
        if table[&MultiIndex::zero(dim)] != T::one() {
            return Err(Error::invalid("moment of order 0 must equal 1"));
        }
        Ok(MomentSet {
            dim,
            max_order,
            table,
        })
    }

    /// Builds the table from a moment function evaluated on every index.
    pub fn from_fn(
        dim: usize,
        max_order: u32,
        mut f: impl FnMut(&MultiIndex) -> Result<T>,
    ) -> Result<Self> {
        let mut table = BTreeMap::new();
        for nu in enumerate_multi_indices(dim, i64::from(max_order))? {
            let v = if nu.is_zero() { T::one() } else { f(&nu)? };
            table.insert(nu, v);
        }
        Self::new(dim, max_order, table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn get(&self, nu: &MultiIndex) -> Option<&T> {
        self.table.get(nu)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.table.iter()
    }

    /// Keeps only orders up to `max_order`.
    pub fn truncate(&self, max_order: u32) -> Self {
        MomentSet {
            dim: self.dim,
            max_order: max_order.min(self.max_order),
            table: self
                .table
                .iter()
                .filter(|(k, _)| k.order() <= max_order)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

impl<T: Scalar> CumulantSet<T> {
    pub fn new(dim: usize, max_order: u32, table: BTreeMap<MultiIndex, T>) -> Result<Self> {
        check_complete(dim, max_order, &table, 1)?;
        Ok(CumulantSet {
            dim,
            max_order,
            table,
            standardized: false,
        })
    }

    pub fn from_fn(dim: usize, max_order: u32, mut f: impl FnMut(&MultiIndex) -> T) -> Result<Self> {
        let table = enumerate_multi_indices(dim, i64::from(max_order))?
            .into_iter()
            .filter(|nu| !nu.is_zero())
            .map(|nu| {
                let v = f(&nu);
                (nu, v)
            })
            .collect();
        Self::new(dim, max_order, table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn get(&self, nu: &MultiIndex) -> Option<&T> {
        self.table.get(nu)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.table.iter()
    }

    pub fn truncate(&self, max_order: u32) -> Self {
        CumulantSet {
            dim: self.dim,
            max_order: max_order.min(self.max_order),
            table: self
                .table
                .iter()
                .filter(|(k, _)| k.order() <= max_order)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            standardized: self.standardized,
        }
    }

    /// Entrywise `a·self + b·other`.
    pub fn combine(&self, a: &T, other: &Self, b: &T) -> Result<Self> {
        if self.dim != other.dim || self.max_order != other.max_order {
            return Err(Error::Dimension("cumulant tables differ in shape".into()));
        }
        let table = self
            .table
            .iter()
            .map(|(k, v)| (k.clone(), a.clone() * v.clone() + b.clone() * other.table[k].clone()))
            .collect();
        Self::new(self.dim, self.max_order, table)
    }

    /// Cumulants of `A·X` given those of `X`. Cumulants are multilinear, so
    /// `χ_ν(AX)` is the coefficient sum `Σ_μ χ_μ(X)·[y^μ] Π_k (A y)_{i_k}`
    /// over the coordinate tuple `(i_1,…,i_r)` of `ν`.
    pub fn linear_transform(&self, a: &[Vec<T>]) -> Result<Self> {
        let d = self.dim;
        if a.len() != d || a.iter().any(|row| row.len() != d) {
            return Err(Error::Dimension(format!("transform must be {d}x{d}")));
        }
        let rows: Vec<Polynomial<T>> = a.iter().map(|row| Polynomial::linear(row)).collect();
        let mut table = BTreeMap::new();
        for order in 1..=self.max_order {
            for nu in indices_of_order(d, order) {
                let prod = nu
                    .to_tuple()
                    .iter()
                    .fold(Polynomial::constant(d, T::one()), |acc, &i| acc.mul(&rows[i]));
                let v = prod
                    .terms()
                    .fold(T::zero(), |acc, (mu, c)| acc + c.clone() * self.table[mu].clone());
                table.insert(nu, v);
            }
        }
        Self::new(d, self.max_order, table)
    }
}

impl CumulantSet<f64> {
    /// Sets the standardized flag when order-1 entries vanish and order-2
    /// entries form the identity, each within `tol`.
    pub fn mark_standardized(&mut self, tol: f64) -> bool {
        let d = self.dim;
        let mut ok = self.max_order >= 2;
        if ok {
            for k in 0..d {
                ok &= self.table[&MultiIndex::unit(d, k)].abs() <= tol;
                for l in 0..d {
                    let nu = MultiIndex::unit(d, k).add(&MultiIndex::unit(d, l));
                    let target = if k == l { 1.0 } else { 0.0 };
                    ok &= (self.table[&nu] - target).abs() <= tol;
                }
            }
        }
        self.standardized = ok;
        ok
    }
}

/// First coordinate with a positive entry.
fn pivot(nu: &MultiIndex) -> usize {
    nu.entries()
        .iter()
        .position(|&v| v > 0)
        .expect("nonzero multi-index")
}

/// Coefficient `C(ν−e_k, μ−e_k)` of the recursion `∂_k M = M·∂_k K`.
fn recursion_weight<T: Scalar>(nu: &MultiIndex, mu: &MultiIndex, k: usize) -> T {
    nu.entries()
        .iter()
        .zip(mu.entries())
        .enumerate()
        .fold(T::one(), |acc, (l, (&n, &m))| {
            let (n, m) = if l == k { (n - 1, m - 1) } else { (n, m) };
            acc * T::binomial(n, m)
        })
}

/// Converts raw moments to cumulants with the recursion
/// `m_ν = Σ_{μ≤ν, μ_k≥1} C(ν−e_k, μ−e_k) χ_μ m_{ν−μ}`, solved for `χ_ν`.
pub fn moments_to_cumulants<T: Scalar>(m: &MomentSet<T>) -> CumulantSet<T> {
    let mut kappa: BTreeMap<MultiIndex, T> = BTreeMap::new();
    for (nu, m_nu) in m.table.iter().filter(|(k, _)| !k.is_zero()) {
        let k = pivot(nu);
        let mut acc = m_nu.clone();
        for mu in nu.sub_indices() {
            if mu.entries()[k] == 0 || &mu == nu {
                continue;
            }
            let w: T = recursion_weight(nu, &mu, k);
            acc = acc - w * kappa[&mu].clone() * m.table[&nu.sub(&mu)].clone();
        }
        kappa.insert(nu.clone(), acc);
    }
    CumulantSet {
        dim: m.dim,
        max_order: m.max_order,
        table: kappa,
        standardized: false,
    }
}

/// Inverse of [`moments_to_cumulants`].
pub fn cumulants_to_moments<T: Scalar>(c: &CumulantSet<T>) -> MomentSet<T> {
    let mut m: BTreeMap<MultiIndex, T> = BTreeMap::new();
    m.insert(MultiIndex::zero(c.dim), T::one());
    for nu in enumerate_multi_indices(c.dim, i64::from(c.max_order))
        .expect("valid shape")
        .into_iter()
        .filter(|nu| !nu.is_zero())
    {
        let k = pivot(&nu);
        let mut acc = T::zero();
        for mu in nu.sub_indices() {
            if mu.entries()[k] == 0 {
                continue;
            }
            let w: T = recursion_weight(&nu, &mu, k);
            acc = acc + w * c.table[&mu].clone() * m[&nu.sub(&mu)].clone();
        }
        m.insert(nu, acc);
    }
    MomentSet {
        dim: c.dim,
        max_order: c.max_order,
        table: m,
    }
}

/// `χ_j(z) = j! Σ_{|ν|=j} χ_ν/ν! z^ν`.
pub fn chi_poly<T: Scalar>(j: u32, c: &CumulantSet<T>) -> Result<Polynomial<T>> {
    if j == 0 || j > c.max_order {
        return Err(Error::UnsupportedOrder(format!(
            "chi polynomial of order {j} needs cumulants up to {j}, have {}",
            c.max_order
        )));
    }
    let jf = T::factorial(j);
    Ok(Polynomial::from_terms(
        c.dim,
        indices_of_order(c.dim, j).into_iter().map(|nu| {
            let v = jf.clone() * c.table[&nu].clone() / T::multi_factorial(nu.entries());
            (nu, v)
        }),
    ))
}

/// Averages the cumulants of `V^{-1/2} X_i` over the given units.
///
/// `V^{-1/2}` is the inverse of the symmetric positive-definite square root.
/// The result is flagged standardized when its first two orders match a
/// centered, identity-covariance law to within `1e-9`.
pub fn averaged_standardized_cumulants(
    sources: &[&dyn MomentSource],
    s: u32,
    v: &DMatrix<f64>,
) -> Result<CumulantSet> {
    if sources.is_empty() {
        return Err(Error::invalid("no sources"));
    }
    if s < 2 {
        return Err(Error::UnsupportedOrder(format!("s = {s} < 2")));
    }
    let d = sources[0].dim();
    if sources.iter().any(|src| src.dim() != d) || v.nrows() != d || v.ncols() != d {
        return Err(Error::Dimension("sources and covariance differ in dimension".into()));
    }
    let inv_sqrt = linalg::sym_inv_sqrt(v)?;
    let a: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| inv_sqrt[(i, j)]).collect())
        .collect();
    let mut acc: Option<CumulantSet> = None;
    for src in sources {
        let c = moments_to_cumulants(&src.raw_moments(s)?).linear_transform(&a)?;
        acc = Some(match acc {
            None => c,
            Some(prev) => prev.combine(&1.0, &c, &1.0)?,
        });
    }
    let sum = acc.expect("nonempty");
    let inv_n = 1.0 / sources.len() as f64;
    let mut avg = sum.combine(&inv_n, &sum, &0.0)?;
    avg.mark_standardized(1e-9);
    Ok(avg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn moments_1d(vals: &[f64]) -> MomentSet {
        MomentSet::from_fn(1, vals.len() as u32, |nu| Ok(vals[nu.order() as usize - 1])).unwrap()
    }

    #[test]
    fn gaussian_cumulants_vanish_beyond_two() {
        let c = moments_to_cumulants(&moments_1d(&[0.0, 1.0, 0.0, 3.0]));
        assert_eq!(c.get(&mi(&[2])), Some(&1.0));
        assert_eq!(c.get(&mi(&[3])), Some(&0.0));
        assert_eq!(c.get(&mi(&[4])), Some(&0.0));
    }

    #[test]
    fn third_and_fourth_cumulants() {
        let c = moments_to_cumulants(&moments_1d(&[0.0, 1.0, 0.5]));
        assert!((c.get(&mi(&[3])).unwrap() - 0.5).abs() < 1e-15);
        let c = moments_to_cumulants(&moments_1d(&[0.0, 1.0, 0.0, 3.7]));
        assert!((c.get(&mi(&[4])).unwrap() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn moment_table_must_be_complete() {
        let mut t = BTreeMap::new();
        t.insert(mi(&[0]), 1.0);
        t.insert(mi(&[2]), 1.0);
        assert!(MomentSet::new(1, 2, t).is_err());
    }

    #[test]
    fn chi_poly_examples() {
        let kappa: f64 = 0.7;
        let c = CumulantSet::from_fn(1, 3, |nu| match nu.order() {
            2 => 1.0,
            3 => kappa,
            _ => 0.0,
        })
        .unwrap();
        let p = chi_poly(3, &c).unwrap();
        assert_eq!(p.terms().count(), 1);
        assert!((p.coeff(&mi(&[3])) - kappa).abs() < 1e-15);

        let std2 = CumulantSet::from_fn(2, 3, |nu| {
            if nu == &mi(&[2, 0]) || nu == &mi(&[0, 2]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let p = chi_poly(2, &std2).unwrap();
        assert_eq!(p.coeff(&mi(&[2, 0])), 1.0);
        assert_eq!(p.coeff(&mi(&[0, 2])), 1.0);
        assert_eq!(p.terms().count(), 2);
        assert!(chi_poly(3, &std2).unwrap().is_zero());
        assert!(matches!(chi_poly(4, &std2), Err(Error::UnsupportedOrder(_))));
    }

    #[test]
    fn transform_scales_by_power_of_order() {
        let c = CumulantSet::from_fn(1, 5, |nu| 1.0 + f64::from(nu.order())).unwrap();
        let t = c.linear_transform(&[vec![2.0]]).unwrap();
        for (nu, v) in t.iter() {
            let expect = c.get(nu).unwrap() * 2f64.powi(nu.order() as i32);
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_covariance_is_rejected() {
        struct Point;
        impl MomentSource for Point {
            fn dim(&self) -> usize {
                2
            }
            fn raw_moments(&self, s: u32) -> Result<MomentSet> {
                MomentSet::from_fn(2, s, |_| Ok(0.0))
            }
        }
        let v = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            averaged_standardized_cumulants(&[&Point], 3, &v),
            Err(Error::Standardization(_))
        ));
        let v = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(
            averaged_standardized_cumulants(&[&Point], 3, &v),
            Err(Error::Standardization(_))
        ));
    }
}
