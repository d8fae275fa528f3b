use serde::{Deserialize, Serialize};

use super::rate::TGrid;
use crate::bootstrap::{
    bootstrap_draws, edgeworth_tstat_cdf, empirical_edgeworth, event_checks, sample_stats,
    sup_deviation, tstat_bootstrap, tstat_dataset, EmpiricalMeasure, Estimate, EventFlags,
    EventThresholds, SupDeviation, TstatFunctional,
};
use crate::dataset::Dataset;
use crate::edgeworth::{set_measure, MeasureMethod, SetSpec};
use crate::error::{Error, Result};
use crate::rng::Streams;

const BOOT_STREAM: u64 = 2;
const QMC_STREAM: u64 = 4;

/// Thresholds used when a driver is not given any.
pub const DEFAULT_THRESHOLDS: EventThresholds = EventThresholds {
    rho_bar: 1e3,
    c1: 1e-3,
    c2: 1e3,
    c3: None,
};

/// One member of the compared class: a set index or a `t` value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub id: String,
    pub q_emp: f64,
    pub q_tilde: f64,
    pub abs_dev: f64,
    pub mc_se: f64,
}

fn rows_from(sup: &SupDeviation, ids: impl Fn(usize) -> String) -> Vec<CompareRow> {
    sup.records
        .iter()
        .map(|r| CompareRow {
            id: ids(r.member),
            q_emp: r.q_emp,
            q_tilde: r.q_tilde,
            abs_dev: r.abs_dev,
            mc_se: r.mc_se,
        })
        .collect()
}

/// CSV with columns `<id>, q_emp, q_tilde, abs_dev, mc_se`.
pub fn rows_csv(id_column: &str, rows: &[CompareRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record([id_column, "q_emp", "q_tilde", "abs_dev", "mc_se"])?;
    for r in rows {
        w.write_record([
            r.id.clone(),
            format!("{:?}", r.q_emp),
            format!("{:?}", r.q_tilde),
            format!("{:?}", r.abs_dev),
            format!("{:?}", r.mc_se),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub n: usize,
    pub b: u64,
    pub s: u32,
    pub seed: u64,
    pub sup: f64,
    pub argmax: usize,
    /// The same sup against the plain Gaussian (`s = 2`).
    pub gaussian_sup: f64,
    pub flags: EventFlags,
    pub degenerate_draws: u64,
    #[serde(skip)]
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn csv(&self) -> Result<String> {
        rows_csv("set_id", &self.rows)
    }
}

/// Half-lines `(−∞, t]` over a t-grid.
pub fn half_lines(grid: &[f64]) -> Vec<SetSpec> {
    grid.iter().map(|&upper| SetSpec::HalfLine { upper }).collect()
}

/// Bootstrap law of the standardized mean against the empirical-cumulant
/// expansion, over a class of sets.
pub fn bootstrap_compare(
    data: &Dataset,
    b: u64,
    s: u32,
    sets: &[SetSpec],
    seed: u64,
    thresholds: &EventThresholds,
) -> Result<CompareReport> {
    let flags = event_checks(data, s, thresholds)?;
    let q = EmpiricalMeasure::new(bootstrap_draws(data, b, &Streams::new(seed).child(&[BOOT_STREAM]))?);
    let method = MeasureMethod::quadrature();
    let tilde = |e: &crate::edgeworth::EdgeworthExpansion, a: &SetSpec| -> Result<Estimate> {
        let m = set_measure(e, a, &method)?;
        Ok(Estimate {
            value: m.value,
            se: m.error,
        })
    };
    let e = empirical_edgeworth(data, s)?;
    let g = empirical_edgeworth(data, 2)?;
    let sup = sup_deviation(sets, |a| q.measure(a), |a| tilde(&e, a))?;
    let gauss = sup_deviation(sets, |a| q.measure(a), |a| tilde(&g, a))?;
    Ok(CompareReport {
        n: data.n(),
        b,
        s,
        seed,
        sup: sup.sup,
        argmax: sup.argmax,
        gaussian_sup: gauss.sup,
        flags,
        degenerate_draws: 0,
        rows: rows_from(&sup, |i| i.to_string()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TstatStudyConfig {
    pub b: u64,
    pub s: u32,
    #[serde(default)]
    pub t_grid: TGrid,
    /// Gaussian importance draws for `Q̃(f̂_t)`.
    pub m: u64,
    pub seed: u64,
    pub thresholds: EventThresholds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TstatStudyReport {
    pub n: usize,
    pub b: u64,
    pub s: u32,
    pub seed: u64,
    pub sup: f64,
    pub argmax_t: f64,
    /// Largest combined standard error over the grid.
    pub max_mc_se: f64,
    pub degenerate_draws: u64,
    /// Importance draws that fell where `x₂ ≤ x₁²`.
    pub singular_points: u64,
    pub flags: EventFlags,
    #[serde(skip)]
    pub rows: Vec<CompareRow>,
}

impl TstatStudyReport {
    pub fn csv(&self) -> Result<String> {
        rows_csv("t", &self.rows)
    }
}

/// Bootstrap-t CDF against `Q̃(f̂_{n,t})` on a t-grid for the sample `w`.
pub fn tstat_study(w: &[f64], cfg: &TstatStudyConfig) -> Result<TstatStudyReport> {
    let grid = cfg.t_grid.values()?;
    let x = tstat_dataset(w)?;
    let streams = Streams::new(cfg.seed);
    let mut th = cfg.thresholds;
    th.c3 = th.c3.or(Some(1e3));
    let flags = event_checks(&x, cfg.s, &th)?;
    let st = sample_stats(&x, cfg.s)?;
    let f = TstatFunctional::new(&st, st.mean[0], w.len() as u64)?;
    let e = empirical_edgeworth(&x, cfg.s)?;
    let draws = tstat_bootstrap(w, cfg.b, &streams.child(&[BOOT_STREAM]))?;
    let emp = draws.cdf_grid(&grid);
    let tilde = edgeworth_tstat_cdf(&grid, &e, &f, cfg.m, &streams.child(&[QMC_STREAM]))?;
    let idx: Vec<usize> = (0..grid.len()).collect();
    let sup = sup_deviation(&idx, |i| Ok(emp[*i]), |i| Ok(tilde[*i]))?;
    Ok(TstatStudyReport {
        n: w.len(),
        b: cfg.b,
        s: cfg.s,
        seed: cfg.seed,
        sup: sup.sup,
        argmax_t: grid[sup.argmax],
        max_mc_se: sup.records.iter().map(|r| r.mc_se).fold(0.0, f64::max),
        degenerate_draws: draws.degenerate,
        singular_points: f.singular_count(),
        flags,
        rows: rows_from(&sup, |i| format!("{:?}", grid[i])),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_on_half_lines() {
        let data = Dataset::from_values(&[0.1, 0.5, 2.3, 0.05, 1.1, 0.7, 3.2, 0.2]).unwrap();
        let sets = half_lines(&[-1.0, 0.0, 1.0]);
        let r = bootstrap_compare(&data, 2000, 3, &sets, 5, &DEFAULT_THRESHOLDS).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(r.sup >= r.rows.iter().map(|x| x.abs_dev).fold(0.0, f64::max));
        assert!(r.csv().unwrap().starts_with("set_id,q_emp,q_tilde,abs_dev,mc_se\n"));
        assert!(bootstrap_compare(&data, 10, 3, &[], 5, &DEFAULT_THRESHOLDS).is_err());
    }

    #[test]
    fn tstat_study_runs() {
        let w: Vec<f64> = (0..30).map(|i| ((i * 7) % 13) as f64 / 4.0).collect();
        let cfg = TstatStudyConfig {
            b: 2000,
            s: 3,
            t_grid: TGrid {
                lo: -3.0,
                hi: 3.0,
                points: 13,
            },
            m: 4000,
            seed: 1,
            thresholds: DEFAULT_THRESHOLDS,
        };
        let r = tstat_study(&w, &cfg).unwrap();
        assert_eq!(r.rows.len(), 13);
        assert!(r.flags.e3.is_some());
        assert!(r.sup < 0.2);
    }
}
