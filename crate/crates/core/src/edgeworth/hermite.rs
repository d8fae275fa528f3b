use crate::cumulant::MultiIndex;

/// `[He_0(t), …, He_max(t)]` by `He_{k+1}(t) = t·He_k(t) − k·He_{k−1}(t)`.
pub fn hermite_all(max: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(1.0);
    if max >= 1 {
        out.push(t);
    }
    for k in 1..max {
        let next = t * out[k] - k as f64 * out[k - 1];
        out.push(next);
    }
    out
}

/// Probabilists' Hermite polynomial `He_k(t)`.
pub fn hermite(k: usize, t: f64) -> f64 {
    hermite_all(k, t)[k]
}

/// `He_ν(x) = Π_k He_{ν_k}(x_k)`, so that `(−D)^ν φ(x) = He_ν(x) φ(x)`.
pub fn hermite_tensor(nu: &MultiIndex, x: &[f64]) -> f64 {
    nu.entries()
        .iter()
        .zip(x)
        .map(|(&k, &xi)| hermite(k as usize, xi))
        .product()
}

/// Per-coordinate Hermite tables, reused across the terms of an expansion.
pub(crate) struct HermiteTable {
    rows: Vec<Vec<f64>>,
}

impl HermiteTable {
    pub(crate) fn new(max: usize, x: &[f64]) -> Self {
        HermiteTable {
            rows: x.iter().map(|&xi| hermite_all(max, xi)).collect(),
        }
    }

    pub(crate) fn tensor(&self, exps: &[u32]) -> f64 {
        exps.iter()
            .zip(&self.rows)
            .map(|(&k, row)| row[k as usize])
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal;

    #[test]
    fn closed_forms() {
        assert_eq!(hermite_tensor(&MultiIndex::zero(3), &[0.3, -2.0, 5.0]), 1.0);
        assert_eq!(hermite(2, 1.0), 0.0);
        assert_eq!(hermite(3, 0.0), 0.0);
        for &t in &[-1.7, 0.4, 2.2] {
            assert!((hermite(3, t) - (t * t * t - 3.0 * t)).abs() < 1e-12);
            assert!((hermite(4, t) - (t.powi(4) - 6.0 * t * t + 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_finite_difference_derivatives_of_phi() {
        // (−d/dt)^2 φ = He_2 φ; central second difference
        let h = 1e-4;
        for &t in &[-1.3, 0.0, 1.0, 2.5] {
            let d2 = (normal::pdf(t + h) - 2.0 * normal::pdf(t) + normal::pdf(t - h)) / (h * h);
            assert!((d2 - hermite(2, t) * normal::pdf(t)).abs() < 1e-7);
            let d1 = (normal::pdf(t + h) - normal::pdf(t - h)) / (2.0 * h);
            assert!((-d1 - hermite(1, t) * normal::pdf(t)).abs() < 1e-9);
        }
    }
}
