//! Edgeworth expansions of standardized sums: correction polynomials, the
//! signed density and its measures of convex sets.

mod expansion;
mod functional;
mod hermite;
mod measure;
mod pj;
pub mod quadrature;
mod sets;

pub use expansion::{build_expansion, EdgeworthExpansion, ExpansionJson, HermiteTerm};
pub use functional::{gaussian_oscillation, m_s_norm, ProbeGrid};
pub use hermite::{hermite, hermite_all, hermite_tensor};
pub use measure::{set_measure, MeasureEstimate, MeasureMethod, TRUNCATION_RADIUS};
pub(crate) use measure::MC_CHUNK;
pub use pj::pj_polynomial;
pub use sets::SetSpec;
