//! Truncated bivariate Taylor arithmetic for the studentizing map
//! `g(x) = (x₁ − w̄)(x₂ − x₁²)^{−1/2}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cumulant::MultiIndex;
use crate::error::{Error, Result};

/// Highest derivative order the jet supports.
pub const MAX_JET_ORDER: u32 = 12;

/// Taylor coefficients in `(h₁, h₂)` up to total degree `order`.
#[derive(Clone, Debug)]
struct Taylor2 {
    order: usize,
    /// `c[a][b]` multiplies `h₁^a h₂^b`, `a + b ≤ order`.
    c: Vec<Vec<f64>>,
}

impl Taylor2 {
    fn zero(order: usize) -> Self {
        Taylor2 {
            order,
            c: (0..=order).map(|a| vec![0.0; order + 1 - a]).collect(),
        }
    }

    fn constant(order: usize, v: f64) -> Self {
        let mut t = Self::zero(order);
        t.c[0][0] = v;
        t
    }

    /// The coordinate `x_k = base + h_k`.
    fn variable(order: usize, k: usize, base: f64) -> Self {
        let mut t = Self::constant(order, base);
        if order >= 1 {
            if k == 0 {
                t.c[1][0] = 1.0;
            } else {
                t.c[0][1] = 1.0;
            }
        }
        t
    }

    fn add(&self, other: &Self, scale: f64) -> Self {
        let mut t = self.clone();
        for (row, orow) in t.c.iter_mut().zip(&other.c) {
            for (x, y) in row.iter_mut().zip(orow) {
                *x += scale * y;
            }
        }
        t
    }

    fn mul(&self, other: &Self) -> Self {
        let k = self.order;
        let mut t = Self::zero(k);
        for a1 in 0..=k {
            for b1 in 0..=k - a1 {
                let x = self.c[a1][b1];
                if x == 0.0 {
                    continue;
                }
                for a2 in 0..=k - a1 - b1 {
                    for b2 in 0..=k - a1 - b1 - a2 {
                        t.c[a1 + a2][b1 + b2] += x * other.c[a2][b2];
                    }
                }
            }
        }
        t
    }

    /// `self^p` for a positive constant term, via the binomial series in
    /// `u = self/c₀ − 1`, which has no constant term.
    fn powf(&self, p: f64) -> Self {
        let c0 = self.c[0][0];
        let mut u = self.clone();
        u.c.iter_mut().flatten().for_each(|x| *x /= c0);
        u.c[0][0] = 0.0;
        let mut out = Self::constant(self.order, 1.0);
        let mut term = Self::constant(self.order, 1.0);
        let mut coef = 1.0;
        for k in 1..=self.order {
            term = term.mul(&u);
            coef *= (p - (k as f64 - 1.0)) / k as f64;
            out = out.add(&term, coef);
        }
        out.c.iter_mut().flatten().for_each(|x| *x *= c0.powf(p));
        out
    }
}

/// Partial derivatives `D^α g` at a base point for `|α| ≤ order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeJet {
    pub base: Vec<f64>,
    pub order: u32,
    pub table: BTreeMap<MultiIndex, f64>,
}

impl DerivativeJet {
    pub fn value(&self) -> f64 {
        self.table[&MultiIndex::zero(self.base.len())]
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<f64> {
        self.table.get(alpha).copied()
    }

    /// Largest `|D^α g|` over the table, including order 0.
    pub fn max_abs(&self) -> f64 {
        self.table.values().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `g(x) = (x₁ − w̄)/√(x₂ − x₁²)`, or `None` off its domain.
pub fn g_value(x: &[f64], w_bar: f64) -> Option<f64> {
    let v = x[1] - x[0] * x[0];
    (v > 0.0).then(|| (x[0] - w_bar) / v.sqrt())
}

/// Value and all partials of `g` at `x̄` up to `order`.
pub fn g_value_and_jet(xbar: &[f64], w_bar: f64, order: u32) -> Result<DerivativeJet> {
    if xbar.len() != 2 {
        return Err(Error::Dimension("the t-functional lives in d = 2".into()));
    }
    if order > MAX_JET_ORDER {
        return Err(Error::UnsupportedOrder(format!(
            "jet order {order} exceeds {MAX_JET_ORDER}"
        )));
    }
    let var = xbar[1] - xbar[0] * xbar[0];
    if !(var > 0.0) {
        return Err(Error::Singularity(format!(
            "x₂ − x₁² = {var} is not positive at the base point"
        )));
    }
    let k = order as usize;
    let x1 = Taylor2::variable(k, 0, xbar[0]);
    let x2 = Taylor2::variable(k, 1, xbar[1]);
    let num = x1.add(&Taylor2::constant(k, w_bar), -1.0);
    let den = x2.add(&x1.mul(&x1), -1.0).powf(-0.5);
    let g = num.mul(&den);
    let mut table = BTreeMap::new();
    let mut fact = vec![1.0; k + 1];
    for i in 1..=k {
        fact[i] = fact[i - 1] * i as f64;
    }
    for a in 0..=k {
        for b in 0..=k - a {
            table.insert(
                MultiIndex::new(vec![a as u32, b as u32]),
                g.c[a][b] * fact[a] * fact[b],
            );
        }
    }
    Ok(DerivativeJet {
        base: xbar.to_vec(),
        order,
        table,
    })
}
