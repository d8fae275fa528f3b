use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multi-index `(ν₁, …, ν_d)` of nonnegative integers.
///
/// Ordering is graded lexicographic: lower order first, then lexicographically
/// descending entries, so `(1,0)` precedes `(0,1)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The unit index `e_k`.
    pub fn unit(dim: usize, k: usize) -> Self {
        let mut v = vec![0; dim];
        v[k] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference; caller guarantees `other ≤ self`.
    pub fn sub(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `ν! = ν₁!⋯ν_d!` as a float.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&v| factorial(v)).product()
    }

    /// `x^ν = Π x_k^{ν_k}`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&v, &xi)| xi.powi(v as i32))
            .product()
    }

    /// Expands the index into a sorted coordinate tuple, e.g. `(2,1)` → `[0,0,1]`.
    pub fn to_tuple(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(k, &v)| std::iter::repeat_n(k, v as usize))
            .collect()
    }

    /// All `μ ≤ self` componentwise, in graded lexicographic order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![];
        let mut cur = vec![0u32; self.dim()];
        fn rec(bound: &[u32], k: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if k == bound.len() {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for v in 0..=bound[k] {
                cur[k] = v;
                rec(bound, k + 1, cur, out);
            }
        }
        rec(&self.0, 0, &mut cur, &mut out);
        out.sort();
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

pub(crate) fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

#[cfg(test)]
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    acc.round()
}

/// Indices of exactly `order`, descending lexicographically.
pub fn indices_of_order(dim: usize, order: u32) -> Vec<MultiIndex> {
    fn rec(dim: usize, k: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if k + 1 == dim {
            cur[k] = remaining;
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for v in (0..=remaining).rev() {
            cur[k] = v;
            rec(dim, k + 1, remaining - v, cur, out);
        }
    }
    let mut out = vec![];
    if dim == 0 {
        return out;
    }
    rec(dim, 0, order, &mut vec![0; dim], &mut out);
    out
}

/// Every multi-index with `|ν| ≤ max_order`, in graded lexicographic order.
/// The count is `C(d + max_order, d)`.
pub fn enumerate_multi_indices(dim: usize, max_order: i64) -> Result<Vec<MultiIndex>> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if max_order < 0 {
        return Err(Error::invalid(format!("negative max_order {max_order}")));
    }
    Ok((0..=max_order as u32)
        .flat_map(|r| indices_of_order(dim, r))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(
            enumerate_multi_indices(1, 2).unwrap(),
            vec![mi(&[0]), mi(&[1]), mi(&[2])]
        );
        assert_eq!(
            enumerate_multi_indices(2, 1).unwrap(),
            vec![mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1])]
        );
    }

    #[test]
    fn counts_match_brute_force() {
        for d in 1..=3usize {
            for s in 0..=6u32 {
                let got = enumerate_multi_indices(d, s as i64).unwrap();
                // brute force over the cube [0, s]^d
                let mut brute = 0;
                let total = (s as usize + 1).pow(d as u32);
                for code in 0..total {
                    let mut c = code;
                    let mut sum = 0;
                    for _ in 0..d {
                        sum += c % (s as usize + 1);
                        c /= s as usize + 1;
                    }
                    if sum <= s as usize {
                        brute += 1;
                    }
                }
                assert_eq!(got.len(), brute);
                assert_eq!(got.len() as f64, binomial(d as u32 + s, d as u32));
                let mut sorted = got.clone();
                sorted.sort();
                assert_eq!(sorted, got, "enumeration is in canonical order");
            }
        }
        assert_eq!(enumerate_multi_indices(2, 3).unwrap().len(), 10);
    }

    #[test]
    fn invalid_arguments() {
        assert!(matches!(
            enumerate_multi_indices(0, 2),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            enumerate_multi_indices(2, -1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn tuple_and_sub_indices() {
        assert_eq!(mi(&[2, 1]).to_tuple(), vec![0, 0, 1]);
        let subs = mi(&[1, 1]).sub_indices();
        assert_eq!(subs, vec![mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1]), mi(&[1, 1])]);
    }
}
