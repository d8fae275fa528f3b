//! The resampling side: sample statistics and good-sample events, bootstrap
//! draws of the standardized mean, the empirical-cumulant expansion, the
//! studentized t-functional and the deviation diagnostics.

mod deviation;
mod draws;
mod jet;
mod stats;
mod tstat;

pub use deviation::{
    enlargement_deviation, sup_deviation, DeviationRecord, EmpiricalMeasure, Estimate,
    SupDeviation,
};
pub use draws::{bootstrap_draws, empirical_edgeworth};
pub use jet::{g_value, g_value_and_jet, DerivativeJet, MAX_JET_ORDER};
pub use stats::{event_checks, sample_stats, EventFlags, EventThresholds, Flag, JetFlag, SampleStats};
pub use tstat::{
    edgeworth_tstat_cdf, edgeworth_tstat_measure, fhat_indicator, tstat_bootstrap, tstat_dataset,
    TstatDraws, TstatFunctional,
};
