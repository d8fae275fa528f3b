use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{FamilyRegistry, FamilySpec};
use super::report::{config_hash, fit_log_log, RecordFlag, SlopeFit, StudyRecord, StudyReport, ThetaEntry};
use super::sum_cdf::{dkw_half_width, exact_sum_cdf_mc};
use crate::bootstrap::{bootstrap_draws, empirical_edgeworth, EmpiricalMeasure};
use crate::edgeworth::{build_expansion, EdgeworthExpansion};
use crate::error::{Error, Result};
use crate::rng::{label_hash, mix, Streams};

/// Name of the sup-over-half-lines metric.
pub const SUP_METRIC: &str = "sup-interval";
/// Name of the max-over-θ metric in sweeps.
pub const SWEEP_METRIC: &str = "sweep-max";

const DATA_STREAM: u64 = 1;
const BOOT_STREAM: u64 = 2;
const SUM_STREAM: u64 = 3;

/// Evenly spaced grid of `points` values on `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid {
            lo: -5.0,
            hi: 5.0,
            points: 401,
        }
    }
}

impl TGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 || !(self.lo < self.hi || self.points == 1) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::invalid("t-grid needs finite lo < hi and at least one point"));
        }
        if self.points == 1 {
            return Ok(vec![self.lo]);
        }
        let span = self.hi - self.lo;
        let last = (self.points - 1) as f64;
        Ok((0..self.points).map(|i| self.lo + i as f64 * span / last).collect())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyMode {
    /// Exact-sum CDF against the population expansion.
    #[default]
    Theorem1,
    /// Bootstrap CDF of one sample against its empirical expansion.
    Theorem2,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub json: Option<PathBuf>,
}

fn default_n_grid() -> Vec<u64> {
    vec![25, 50, 100, 200, 400]
}

fn default_budget() -> u64 {
    1_000_000
}

fn one() -> u32 {
    1
}

/// Configuration shared by `rate-study` and `uniform-sweep`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub family: String,
    /// Parameters for a rate study; the registry default when absent.
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    /// Parameter grid for a sweep.
    #[serde(default)]
    pub theta_grid: Option<Vec<Vec<f64>>>,
    pub s: u32,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<u64>,
    /// Realizations of the exact sum per cell.
    #[serde(default = "default_budget")]
    pub m: u64,
    /// Bootstrap draws per cell (theorem-2 mode).
    #[serde(default = "default_budget")]
    pub b: u64,
    #[serde(default = "one")]
    pub reps: u32,
    #[serde(default)]
    pub mode: StudyMode,
    pub seed: u64,
    #[serde(default)]
    pub t_grid: TGrid,
    /// Moment cap for sweeps.
    #[serde(default)]
    pub rho_bar: Option<f64>,
    #[serde(default)]
    pub output: OutputPaths,
}

impl StudyConfig {
    pub fn new(family: impl Into<String>, s: u32, seed: u64) -> Self {
        StudyConfig {
            family: family.into(),
            theta: None,
            theta_grid: None,
            s,
            n_grid: default_n_grid(),
            m: default_budget(),
            b: default_budget(),
            reps: 1,
            mode: StudyMode::Theorem1,
            seed,
            t_grid: TGrid::default(),
            rho_bar: None,
            output: OutputPaths::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Hash of everything except the output paths.
    pub fn hash(&self) -> Result<String> {
        let mut c = self.clone();
        c.output = OutputPaths::default();
        config_hash(&c)
    }

    fn validate(&self) -> Result<()> {
        if self.s < 2 {
            return Err(Error::UnsupportedOrder(format!("s = {} < 2", self.s)));
        }
        if self.n_grid.len() < 4 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) || self.n_grid[0] == 0 {
            return Err(Error::invalid(
                "n-grid must be strictly increasing with at least 4 positive points",
            ));
        }
        if self.reps == 0 {
            return Err(Error::invalid("reps must be ≥ 1"));
        }
        let budget = match self.mode {
            StudyMode::Theorem1 => self.m,
            StudyMode::Theorem2 => self.b,
        };
        if budget == 0 {
            return Err(Error::invalid("Monte Carlo budget must be ≥ 1"));
        }
        self.t_grid.values()?;
        Ok(())
    }
}

fn theta_key(theta: &[f64]) -> u64 {
    theta.iter().fold(0x7e7a, |h, v| mix(h, v.to_bits()))
}

/// Stream root of one `(family, θ, n, rep)` cell.
pub fn cell_streams(seed: u64, family: &str, theta: &[f64], n: u64, rep: u32) -> Streams {
    Streams::new(seed).child(&[label_hash(family), theta_key(theta), n, u64::from(rep)])
}

fn sup_cdf_gap(values: &[f64], grid: &[f64], e: &EdgeworthExpansion) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for (v, t) in values.iter().zip(grid) {
        sup = sup.max((v - e.cdf_1d(*t)?).abs());
    }
    Ok(sup)
}

fn orders(s: u32) -> Vec<u32> {
    if s == 2 {
        vec![2]
    } else {
        vec![s, 2]
    }
}

fn run_cell(
    family: &FamilySpec,
    cfg: &StudyConfig,
    grid: &[f64],
    n: u64,
    rep: u32,
) -> Result<Vec<StudyRecord>> {
    let theta = family.theta();
    let cell = cell_streams(cfg.seed, &family.name, &theta, n, rep);
    let (values, budget, expansions) = match cfg.mode {
        StudyMode::Theorem1 => {
            let f = exact_sum_cdf_mc(family, n, cfg.m, grid, &cell.child(&[SUM_STREAM]))?;
            let c = family.standardized_cumulants(cfg.s)?;
            let es = orders(cfg.s)
                .into_iter()
                .map(|s| build_expansion(&c, n, s))
                .collect::<Result<Vec<_>>>()?;
            (f.cdf, cfg.m, es)
        }
        StudyMode::Theorem2 => {
            let data = family.sample_dataset(n as usize, &mut cell.child(&[DATA_STREAM]).stream(0))?;
            let q = EmpiricalMeasure::new(bootstrap_draws(&data, cfg.b, &cell.child(&[BOOT_STREAM]))?);
            let values = grid.iter().map(|t| q.cdf(*t).map(|e| e.value)).collect::<Result<Vec<_>>>()?;
            let es = orders(cfg.s)
                .into_iter()
                .map(|s| empirical_edgeworth(&data, s))
                .collect::<Result<Vec<_>>>()?;
            (values, cfg.b, es)
        }
    };
    let band = dkw_half_width(budget);
    expansions
        .iter()
        .map(|e| {
            let value = sup_cdf_gap(&values, grid, e)?;
            Ok(StudyRecord {
                family: family.name.clone(),
                theta: theta.clone(),
                n,
                rep,
                s: e.order(),
                metric: SUP_METRIC.into(),
                value,
                mc_se: 0.5 / (budget as f64).sqrt(),
                flag: if value < band {
                    RecordFlag::Inconclusive
                } else {
                    RecordFlag::Ok
                },
                seed: cell.master(),
            })
        })
        .collect()
}

fn run_cells(families: &[FamilySpec], cfg: &StudyConfig) -> Result<Vec<StudyRecord>> {
    let grid = cfg.t_grid.values()?;
    let cells: Vec<(&FamilySpec, u64, u32)> = families
        .iter()
        .flat_map(|f| {
            cfg.n_grid
                .iter()
                .flat_map(move |&n| (0..cfg.reps).map(move |r| (f, n, r)))
        })
        .collect();
    let out = cells
        .par_iter()
        .map(|(f, n, r)| run_cell(f, cfg, &grid, *n, *r))
        .collect::<Result<Vec<_>>>()?;
    Ok(out.into_iter().flatten().collect())
}

/// Slopes per `(θ, s, metric)` group over unflagged records, in order of
/// first appearance.
pub fn fit_slopes(records: &[StudyRecord]) -> Vec<SlopeFit> {
    let mut keys: Vec<(Vec<f64>, u32, String)> = vec![];
    for r in records {
        let k = (r.theta.clone(), r.s, r.metric.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(theta, s, metric)| {
            let pts: Vec<(u64, f64)> = records
                .iter()
                .filter(|r| r.theta == theta && r.s == s && r.metric == metric && r.flag == RecordFlag::Ok)
                .map(|r| (r.n, r.value))
                .collect();
            let (slope, intercept, std_error) = fit_log_log(&pts);
            SlopeFit {
                theta,
                s,
                metric,
                points: pts.len(),
                slope,
                intercept,
                std_error,
            }
        })
        .collect()
}

fn resolve(registry: &FamilyRegistry, cfg: &StudyConfig) -> Result<FamilySpec> {
    let base = registry.get(&cfg.family)?;
    if base.dim() != 1 {
        return Err(Error::Dimension(format!(
            "{} is {}-dimensional; rate studies use the one-dimensional interval class",
            base.name,
            base.dim()
        )));
    }
    Ok(base.clone())
}

/// Sup-over-half-lines error of the order-`s` expansion and of the
/// Gaussian baseline across the n-grid, with log–log slopes.
pub fn rate_study(registry: &FamilyRegistry, cfg: &StudyConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let base = resolve(registry, cfg)?;
    let family = match &cfg.theta {
        Some(t) => base.with_theta(t)?,
        None => base,
    };
    let mut report = StudyReport::new(cfg.hash()?);
    report.records = run_cells(std::slice::from_ref(&family), cfg)?;
    report.slopes = fit_slopes(&report.records);
    Ok(report)
}

/// The rate study over a θ-grid, plus the per-`n` maximum over θ.
pub fn uniform_sweep(registry: &FamilyRegistry, cfg: &StudyConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let base = resolve(registry, cfg)?;
    let grid = cfg
        .theta_grid
        .clone()
        .unwrap_or_else(|| vec![cfg.theta.clone().unwrap_or_else(|| base.theta())]);
    if grid.is_empty() {
        return Err(Error::invalid("empty θ-grid"));
    }
    let mut report = StudyReport::new(cfg.hash()?);
    let mut accepted = vec![];
    for theta in &grid {
        let fam = base.with_theta(theta)?;
        let proxy = fam.moment_proxy(cfg.s).unwrap_or(f64::INFINITY);
        let reason = if !proxy.is_finite() {
            Some("moment proxy is not finite".to_string())
        } else {
            cfg.rho_bar
                .filter(|cap| proxy > *cap)
                .map(|cap| format!("moment proxy {proxy} exceeds cap {cap}"))
        };
        report.thetas.push(ThetaEntry {
            theta: theta.clone(),
            moment_proxy: proxy,
            accepted: reason.is_none(),
            reason: reason.clone(),
        });
        if reason.is_none() {
            accepted.push(fam);
        }
    }
    if accepted.is_empty() {
        return Err(Error::invalid("no θ in the grid satisfies the moment cap"));
    }
    let per_theta = run_cells(&accepted, cfg)?;
    let budget = match cfg.mode {
        StudyMode::Theorem1 => cfg.m,
        StudyMode::Theorem2 => cfg.b,
    };
    let band = dkw_half_width(budget);
    let mut maxima = vec![];
    for &n in &cfg.n_grid {
        for rep in 0..cfg.reps {
            for s in orders(cfg.s) {
                let group = per_theta.iter().filter(|r| r.n == n && r.rep == rep && r.s == s);
                let value = group.clone().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
                let mc_se = group.map(|r| r.mc_se).fold(0.0, f64::max);
                maxima.push(StudyRecord {
                    family: base.name.clone(),
                    theta: vec![],
                    n,
                    rep,
                    s,
                    metric: SWEEP_METRIC.into(),
                    value,
                    mc_se,
                    flag: if value < band {
                        RecordFlag::Inconclusive
                    } else {
                        RecordFlag::Ok
                    },
                    seed: cfg.seed,
                });
            }
        }
    }
    report.records = per_theta;
    report.records.extend(maxima);
    report.slopes = fit_slopes(&report.records);
    Ok(report)
}
