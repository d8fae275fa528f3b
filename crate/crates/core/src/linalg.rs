//! Symmetric square roots via eigendecomposition.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

fn check_symmetric(v: &DMatrix<f64>) -> Result<()> {
    if v.nrows() != v.ncols() || v.nrows() == 0 {
        return Err(Error::Standardization("covariance must be square".into()));
    }
    let scale = v.amax().max(1.0);
    for i in 0..v.nrows() {
        for j in 0..i {
            if (v[(i, j)] - v[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::Standardization("covariance is not symmetric".into()));
            }
        }
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Standardization("covariance has non-finite entries".into()));
    }
    Ok(())
}

/// Eigenvalues in ascending order.
pub fn sym_eigenvalues(v: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_symmetric(v)?;
    let mut ev: Vec<f64> = SymmetricEigen::new(v.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

fn spectral_map(v: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
    check_symmetric(v)?;
    let eig = SymmetricEigen::new(v.clone());
    let max = eig.eigenvalues.amax();
    // relative floor: anything this small is numerically singular
    if eig.eigenvalues.iter().any(|&l| l <= 1e-13 * max.max(f64::MIN_POSITIVE)) {
        return Err(Error::Standardization(
            "covariance is not positive definite".into(),
        ));
    }
    let q = &eig.eigenvectors;
    let diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    let out = q * diag * q.transpose();
    // symmetrize away rounding
    Ok((&out + out.transpose()) * 0.5)
}

/// `V^{1/2}`, the symmetric positive-definite root.
pub fn sym_sqrt(v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spectral_map(v, f64::sqrt)
}

/// `V^{-1/2}`, the inverse of the symmetric positive-definite root.
pub fn sym_inv_sqrt(v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spectral_map(v, |l| 1.0 / l.sqrt())
}
