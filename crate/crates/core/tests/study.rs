use edgeworth_core::bootstrap::{bootstrap_draws, tstat_bootstrap};
use edgeworth_core::normal;
use edgeworth_core::rng::Streams;
use edgeworth_core::study::{
    dkw_half_width, emit_report, exact_sum_cdf_mc, parse_report_csv, rate_study,
    register_builtin_families, report_csv, uniform_sweep, RecordFlag, ReportFormat, StudyConfig,
    StudyMode, StudyReport, SUP_METRIC, SWEEP_METRIC,
};
use edgeworth_core::Dataset;

fn small(family: &str, s: u32) -> StudyConfig {
    let mut c = StudyConfig::new(family, s, 99);
    c.n_grid = vec![10, 20, 40, 80];
    c.m = 50_000;
    c.b = 20_000;
    c.t_grid.points = 81;
    c
}

#[test]
fn gaussian_sum_cdf_stays_inside_the_dkw_band() {
    let reg = register_builtin_families();
    let fam = reg.get("gaussian").unwrap();
    let grid: Vec<f64> = (-30..=30).map(|i| f64::from(i) / 10.0).collect();
    for (n, seed) in [(1u64, 1u64), (7, 2), (64, 3)] {
        let f = exact_sum_cdf_mc(fam, n, 200_000, &grid, &Streams::new(seed)).unwrap();
        assert_eq!(f.half_width, dkw_half_width(200_000));
        for (i, t) in grid.iter().enumerate() {
            assert!(f.band_contains(i, normal::cdf(*t)), "n = {n}, t = {t}");
        }
    }
}

#[test]
fn summed_and_exact_samplers_agree() {
    // the mixture has no closed-form sum sampler; gamma does
    let reg = register_builtin_families();
    let grid = [-1.0, 0.0, 1.0];
    for name in ["gaussian-mixture", "gamma(2)"] {
        let f = exact_sum_cdf_mc(reg.get(name).unwrap(), 30, 100_000, &grid, &Streams::new(4)).unwrap();
        for (v, t) in f.cdf.iter().zip(grid) {
            assert!((v - normal::cdf(t)).abs() < 0.05, "{name} at {t}: {v}");
        }
    }
}

#[test]
fn rate_study_is_reproducible_and_thread_count_free() {
    let reg = register_builtin_families();
    let cfg = small("centered-exponential", 3);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let a = report_csv(&one.install(|| rate_study(&reg, &cfg)).unwrap()).unwrap();
    let b = report_csv(&one.install(|| rate_study(&reg, &cfg)).unwrap()).unwrap();
    let c = report_csv(&three.install(|| rate_study(&reg, &cfg)).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    let mut other = cfg.clone();
    other.seed += 1;
    assert_ne!(a, report_csv(&rate_study(&reg, &other).unwrap()).unwrap());
}

#[test]
fn csv_and_json_round_trip() {
    let reg = register_builtin_families();
    let rep = rate_study(&reg, &small("gamma(2)", 3)).unwrap();
    let text = report_csv(&rep).unwrap();
    assert!(text.starts_with("family,theta,n,rep,s,metric,value,mc_se,flag,seed\n"));
    assert_eq!(parse_report_csv(&text).unwrap(), rep.records);
    assert_eq!(StudyReport::from_json(&rep.to_json().unwrap()).unwrap(), rep);

    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    emit_report(&rep, ReportFormat::Csv, &p1).unwrap();
    emit_report(&rep, ReportFormat::Csv, &p2).unwrap();
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(std::fs::read_to_string(&p1).unwrap(), text);
}

#[test]
fn config_hash_ignores_output_paths() {
    let mut a = small("gaussian", 3);
    let h = a.hash().unwrap();
    a.output.csv = Some("elsewhere.csv".into());
    assert_eq!(a.hash().unwrap(), h);
    a.m += 1;
    assert_ne!(a.hash().unwrap(), h);
    assert_eq!(h.len(), 64);
}

#[test]
fn gaussian_records_are_flagged_inconclusive() {
    // the expansion is exact, so every gap is pure Monte Carlo noise
    let reg = register_builtin_families();
    let rep = rate_study(&reg, &small("gaussian", 3)).unwrap();
    assert!(rep.records.iter().all(|r| r.flag == RecordFlag::Inconclusive));
    assert!(rep.inconclusive_only());
    assert!(rep.slope(&[], 3, SUP_METRIC).unwrap().slope.is_none());
}

#[test]
fn sweep_maximum_dominates_each_theta() {
    let reg = register_builtin_families();
    let mut cfg = small("gamma", 3);
    cfg.family = "gamma(2)".into();
    cfg.theta_grid = Some(vec![vec![1.0], vec![2.0], vec![8.0]]);
    let rep = uniform_sweep(&reg, &cfg).unwrap();
    assert_eq!(rep.thetas.len(), 3);
    for m in rep.records.iter().filter(|r| r.metric == SWEEP_METRIC) {
        for r in rep.records.iter().filter(|r| r.metric == SUP_METRIC && r.n == m.n && r.s == m.s) {
            assert!(m.value >= r.value);
        }
    }
    // records for θ present in both runs are identical regardless of the rest of the grid
    let mut single = cfg.clone();
    single.theta_grid = Some(vec![vec![2.0]]);
    let one = uniform_sweep(&reg, &single).unwrap();
    for r in one.records.iter().filter(|r| r.metric == SUP_METRIC) {
        assert!(rep.records.contains(r));
    }
}

#[test]
fn moment_cap_rejects_theta() {
    let reg = register_builtin_families();
    let mut cfg = small("gamma(2)", 3);
    cfg.theta_grid = Some(vec![vec![0.05], vec![4.0]]);
    cfg.rho_bar = Some(20.0);
    let rep = uniform_sweep(&reg, &cfg).unwrap();
    assert!(!rep.thetas[0].accepted);
    assert!(rep.thetas[0].reason.is_some());
    assert!(rep.thetas[1].accepted);
}

#[test]
fn bootstrap_mode_runs() {
    let reg = register_builtin_families();
    let mut cfg = small("centered-exponential", 3);
    cfg.mode = StudyMode::Theorem2;
    let rep = rate_study(&reg, &cfg).unwrap();
    assert_eq!(rep.records.len(), 8);
    assert!(rep.records.iter().all(|r| r.value.is_finite() && r.value < 0.2));
}

#[test]
fn bootstrap_draws_are_standardized() {
    let reg = register_builtin_families();
    let fam = reg.get("centered-exponential").unwrap();
    let data = fam.sample_dataset(50, &mut Streams::new(8).stream(0)).unwrap();
    let draws = bootstrap_draws(&data, 200_000, &Streams::new(9)).unwrap();
    let v = draws.column(0);
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64;
    assert!(m.abs() < 0.01, "mean {m}");
    assert!((var - 1.0).abs() < 0.02, "variance {var}");

    let d2 = Dataset::from_rows(&(0..30).map(|i| vec![f64::from(i % 5), f64::from(i % 7)]).collect::<Vec<_>>())
        .unwrap();
    let draws2 = bootstrap_draws(&d2, 100_000, &Streams::new(10)).unwrap();
    let (a, b) = (draws2.column(0), draws2.column(1));
    let cov = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64;
    assert!(cov.abs() < 0.02, "cross covariance {cov}");
}

#[test]
fn tstat_bootstrap_counts_degenerate_draws() {
    let w = [1.0, 1.0, 1.0, 2.0];
    let t = tstat_bootstrap(&w, 20_000, &Streams::new(1)).unwrap();
    // all four picks equal to 1.0 happen with probability (3/4)^4
    let p = t.degenerate as f64 / 20_000.0;
    assert!((p - 0.75f64.powi(4) - 0.25f64.powi(4)).abs() < 0.02, "{p}");
    assert_eq!(t.values.len() as u64 + t.degenerate, 20_000);
}
