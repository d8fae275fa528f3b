#![allow(dead_code)]

use std::collections::BTreeMap;

use edgeworth_core::cumulant::{CumulantSet, MultiIndex};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;
pub type Poly = BTreeMap<Vec<u32>, Q>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

fn fact(k: u32) -> Q {
    (1..=k).fold(Q::one(), |a, i| a * q(i64::from(i), 1))
}

/// All exponent vectors of total degree `r` in `d` variables.
pub fn exponents(d: usize, r: u32) -> Vec<Vec<u32>> {
    if d == 1 {
        return vec![vec![r]];
    }
    (0..=r)
        .flat_map(|a| {
            exponents(d - 1, r - a).into_iter().map(move |mut rest| {
                rest.insert(0, a);
                rest
            })
        })
        .collect()
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(Q::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn add_scaled(acc: &mut Poly, p: &Poly, c: &Q) {
    for (e, v) in p {
        *acc.entry(e.clone()).or_insert_with(Q::zero) += v * c;
    }
    acc.retain(|_, c| !c.is_zero());
}

/// `P̃_j` as the `u^j` coefficient of `exp(Σ_{k≥1} u^k Σ_{|ν|=k+2} κ_ν z^ν/ν!)`,
/// through the power-series exponential recurrence
/// `g_j = (1/j) Σ_{k=1}^{j} k a_k g_{j−k}`.
pub fn pj_oracle(d: usize, kappa: &BTreeMap<Vec<u32>, Q>, j: u32) -> Poly {
    let a: Vec<Poly> = (0..=j)
        .map(|k| {
            if k == 0 {
                return Poly::new();
            }
            exponents(d, k + 2)
                .into_iter()
                .filter_map(|e| {
                    let c = kappa[&e].clone() / e.iter().fold(Q::one(), |p, &v| p * fact(v));
                    (!c.is_zero()).then_some((e, c))
                })
                .collect()
        })
        .collect();
    let mut g: Vec<Poly> = vec![Poly::from([(vec![0; d], Q::one())])];
    for m in 1..=j {
        let mut gm = Poly::new();
        for k in 1..=m {
            let term = mul(&a[k as usize], &g[(m - k) as usize]);
            add_scaled(&mut gm, &term, &q(i64::from(k), i64::from(m)));
        }
        g.push(gm);
    }
    g.pop().unwrap()
}

/// Random small-denominator rational cumulants up to `order`, standardized
/// in the first two orders.
pub fn random_rational_cumulants(d: usize, order: u32, r: &mut impl Rng) -> BTreeMap<Vec<u32>, Q> {
    let mut out = BTreeMap::new();
    for k in 1..=order {
        for e in exponents(d, k) {
            let v = match k {
                1 => Q::zero(),
                2 => {
                    if e.contains(&2) {
                        Q::one()
                    } else {
                        Q::zero()
                    }
                }
                _ => q(r.random_range(-9..=9), r.random_range(1..=7)),
            };
            out.insert(e, v);
        }
    }
    out
}

pub fn cumulant_set(d: usize, order: u32, table: &BTreeMap<Vec<u32>, Q>) -> CumulantSet<Q> {
    CumulantSet::new(
        d,
        order,
        table
            .iter()
            .map(|(e, v)| (MultiIndex::new(e.clone()), v.clone()))
            .collect(),
    )
    .unwrap()
}

/// A random standardized `f64` cumulant set with higher cumulants in `[−a, a]`.
pub fn random_standardized(d: usize, order: u32, a: f64, r: &mut impl Rng) -> CumulantSet {
    let mut c = CumulantSet::from_fn(d, order, |nu| match nu.order() {
        1 => 0.0,
        2 => {
            if nu.entries().contains(&2) {
                1.0
            } else {
                0.0
            }
        }
        _ => r.random_range(-a..=a),
    })
    .unwrap();
    assert!(c.mark_standardized(1e-12));
    c
}
