//! Characteristic functions, weak and mean weak Cramér scans, and the
//! pairwise U-statistic certificate for empirical measures.

mod cf;
mod scan;
mod ustat;

pub use cf::{eval_cf, CharFunctionHandle};
pub use scan::{
    lattice_span, mean_weak_cramer_scan, scan_grid, ustat_scan, weak_cramer_scan,
    CertificateStatus, CramerCertificate, EvidenceRecord, GridSpec, PointSource, ScanParams,
};
pub use ustat::{
    c_kr_estimate, c_r_lower_bound, failure_prob_bound, ustat_certificate, xi_wrap, CrBound,
    UstatEstimate, UstatRecord,
};
