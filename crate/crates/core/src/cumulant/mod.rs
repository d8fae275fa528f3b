//! Multi-index bookkeeping, moment and cumulant tables, and the conversion
//! between them.

mod multi_index;
mod polynomial;
mod scalar;
mod tables;

pub use multi_index::{enumerate_multi_indices, indices_of_order, MultiIndex};
pub use polynomial::Polynomial;
pub use scalar::Scalar;
pub use tables::{
    averaged_standardized_cumulants, chi_poly, cumulants_to_moments, moments_to_cumulants,
    CumulantSet, MomentSet, MomentSource,
};
