use rand::Rng;
use rayon::prelude::*;

use super::stats::sample_stats;
use crate::cumulant::{averaged_standardized_cumulants, MomentSource};
use crate::dataset::Dataset;
use crate::edgeworth::{build_expansion, EdgeworthExpansion};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::Streams;

/// `√n V̂^{−1/2}(X̄*_b − X̄)` for `b = 0..B`, one stream per replication.
/// Returned as a dataset of `B` points in `R^d`.
pub fn bootstrap_draws(data: &Dataset, b: u64, streams: &Streams) -> Result<Dataset> {
    if b == 0 {
        return Err(Error::invalid("need at least one bootstrap draw"));
    }
    if data.n() < 2 {
        return Err(Error::Standardization(
            "a single point has zero covariance".into(),
        ));
    }
    let st = sample_stats(data, 2)?;
    let z = data
        .centered()
        .transformed(&linalg::sym_inv_sqrt(&st.covariance_matrix())?)?;
    let (n, d) = (z.n(), z.dim());
    let scale = 1.0 / (n as f64).sqrt();
    let flat: Vec<f64> = (0..b)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut rng = streams.stream(i);
            let mut acc = vec![0.0; d];
            for _ in 0..n {
                let p = z.point(rng.random_range(0..n));
                for (a, x) in acc.iter_mut().zip(p) {
                    *a += x;
                }
            }
            acc.into_iter().map(move |a| a * scale)
        })
        .collect();
    Dataset::new(d, flat)
}

/// The order-`s` expansion built from the cumulants of the standardized
/// empirical law `V̂^{−1/2}(X − X̄)`, `X` uniform on the sample.
pub fn empirical_edgeworth(data: &Dataset, s: u32) -> Result<EdgeworthExpansion> {
    let st = sample_stats(data, 2)?;
    let centered = data.centered();
    let sources: [&dyn MomentSource; 1] = [&centered];
    let mut c = averaged_standardized_cumulants(&sources, s, &st.covariance_matrix())?;
    if !c.mark_standardized(1e-8) {
        return Err(Error::Standardization(
            "empirical cumulants failed to standardize".into(),
        ));
    }
    build_expansion(&c, data.n() as u64, s)
}
