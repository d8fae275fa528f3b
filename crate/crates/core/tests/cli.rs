use std::path::Path;
use std::process::{Command, Output};

fn edgeworth(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgeworth"))
        .args(args)
        .current_dir(dir)
        .env("EDGEWORTH_OUT_DIR", dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn cf_scan_finds_the_lattice_witness() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.csv"), "0\n1\n1\n0\n1\n0\n0\n1\n").unwrap();
    let o = edgeworth(dir.path(), &["cf-scan", "--data", "b.csv", "--c", "0.01", "--t-max", "10"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"]["status"], "violated");
    let w = v["status"]["witness"][0].as_f64().unwrap();
    assert!((w.abs() - 2.0 * std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn certify_reports_a_probability_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = edgeworth(dir.path(), &["certify", "--family", "three-point-irrational", "--n", "120", "--t-max", "20"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["c_hat"].as_f64().unwrap() > 0.0);
    let p = v["prob_bound"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
}

#[test]
fn expand_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let a = edgeworth(dir.path(), &["expand", "--family", "gamma(2)", "--n", "30", "--s", "4", "--json", "e.json"]);
    assert!(a.status.success());
    let b = edgeworth(dir.path(), &["expand", "--cumulants", "e.json"]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).starts_with("d=1 s=4 n=30\n"));
}

#[test]
fn rate_study_writes_identical_reports_and_flags_inconclusive_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"family":"centered-exponential","s":3,"m":20000,"seed":5,"n_grid":[10,20,40,80],
                 "output":{"csv":"sub/a.csv"}}"#;
    std::fs::write(dir.path().join("cfg.json"), cfg).unwrap();
    let o = edgeworth(dir.path(), &["rate-study", "cfg.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read(dir.path().join("sub/a.csv")).unwrap();
    assert!(dir.path().join("rate-study.json").exists());
    edgeworth(dir.path(), &["rate-study", "cfg.json"]);
    assert_eq!(first, std::fs::read(dir.path().join("sub/a.csv")).unwrap());

    let gauss = r#"{"family":"gaussian","s":3,"m":1000,"seed":1,"n_grid":[5,10,20,40]}"#;
    std::fs::write(dir.path().join("g.json"), gauss).unwrap();
    assert_eq!(edgeworth(dir.path(), &["rate-study", "g.json"]).status.code(), Some(2));
}

#[test]
fn tstat_study_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = edgeworth(
        dir.path(),
        &["tstat-study", "--family", "centered-exponential", "--n", "40", "--B", "5000", "--m", "5000", "--tgrid", "-2:2:0.5"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(dir.path().join("tstat-study.csv")).unwrap();
    assert!(table.starts_with("t,q_emp,q_tilde,abs_dev,mc_se\n"));
    assert_eq!(table.lines().count(), 10);
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = edgeworth(dir.path(), &["rate-study", "missing.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    let o = edgeworth(dir.path(), &["expand", "--family", "no-such-family"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn families_lists_the_registry() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&edgeworth(dir.path(), &["families"]));
    assert!(text.lines().any(|l| l.starts_with("bernoulli(1/2)") && l.ends_with("lattice")));
    assert!(text.contains("centered-exponential"));
}
