//! Experiment plumbing: the family registry, exact-sum Monte Carlo CDFs,
//! rate studies and uniform sweeps, bootstrap comparisons, and reports.

mod compare;
mod family;
mod rate;
mod report;
mod sum_cdf;

pub use compare::{
    bootstrap_compare, half_lines, rows_csv, tstat_study, CompareReport, CompareRow,
    TstatStudyConfig, TstatStudyReport, DEFAULT_THRESHOLDS,
};
pub use family::{register_builtin_families, FamilyKind, FamilyRegistry, FamilySpec, SumSampler};
pub use rate::{
    cell_streams, fit_slopes, rate_study, uniform_sweep, OutputPaths, StudyConfig, StudyMode,
    TGrid, SUP_METRIC, SWEEP_METRIC,
};
pub use report::{
    config_hash, emit_report, fit_log_log, parse_report_csv, report_csv, RecordFlag,
    ReportFormat, SlopeFit, StudyRecord, StudyReport, ThetaEntry, CSV_HEADER,
};
pub use sum_cdf::{dkw_half_width, exact_sum_cdf_mc, SumCdf};
