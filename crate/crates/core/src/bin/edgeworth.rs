use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use edgeworth_core::bootstrap::EventThresholds;
use edgeworth_core::cramer::{
    c_r_lower_bound, failure_prob_bound, scan_grid, ustat_scan, weak_cramer_scan,
    CharFunctionHandle, CramerCertificate, ScanParams,
};
use edgeworth_core::cumulant::CumulantSet;
use edgeworth_core::edgeworth::{build_expansion, EdgeworthExpansion, ExpansionJson, SetSpec};
use edgeworth_core::rng::Streams;
use edgeworth_core::study::{
    bootstrap_compare, emit_report, half_lines, rate_study, register_builtin_families,
    tstat_study, uniform_sweep, FamilyRegistry, ReportFormat, StudyConfig, StudyReport, TGrid,
    TstatStudyConfig, DEFAULT_THRESHOLDS,
};
use edgeworth_core::{Dataset, Error, Result};

const DATA_STREAM: u64 = 1;

#[derive(Parser)]
#[command(name = "edgeworth", version, about = "Edgeworth expansions, Cramér certificates and bootstrap rate studies")]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, env = "EDGEWORTH_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan (1 − |φ(t)|)·‖t‖^b over R < ‖t‖ ≤ T_max.
    CfScan(ScanArgs),
    /// Grid scan plus the pairwise U-statistic certificate for a sample.
    Certify(ScanArgs),
    /// Bootstrap law of the standardized mean against the empirical expansion.
    BootstrapCompare(CompareArgs),
    /// Bootstrap-t CDF against the expansion of the t-functional.
    TstatStudy(TstatArgs),
    /// Rate study driven by a JSON config.
    RateStudy(ConfigArgs),
    /// Uniform-in-θ sweep driven by a JSON config.
    UniformSweep(ConfigArgs),
    /// Print an expansion's Hermite coefficient table.
    Expand(ExpandArgs),
    /// List the built-in families.
    Families,
}

#[derive(Args)]
struct Source {
    /// CSV file with one point per row.
    #[arg(long, conflicts_with = "family")]
    data: Option<PathBuf>,
    /// Built-in family name; sampled when --n is given.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl Source {
    fn dataset(&self, reg: &FamilyRegistry) -> Result<Dataset> {
        match (&self.data, &self.family, self.n) {
            (Some(path), _, _) => Dataset::from_csv(path),
            (None, Some(name), Some(n)) => {
                let fam = reg.get(name)?;
                let mut rng = Streams::new(self.seed).child(&[DATA_STREAM]).stream(0);
                Ok(fam.sample_dataset(n, &mut rng)?.with_provenance(name.clone(), self.seed))
            }
            _ => Err(Error::InvalidArgument(
                "give --data FILE or --family NAME --n N".into(),
            )),
        }
    }
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long = "r", default_value_t = 1.0)]
    r_inner: f64,
    #[arg(long, default_value_t = 100.0)]
    t_max: f64,
    /// Margin to test.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    radii: Option<usize>,
    #[arg(long)]
    dirs: Option<usize>,
    /// Keep the full evidence list in the JSON output.
    #[arg(long)]
    evidence: bool,
}

impl ScanArgs {
    fn params(&self, dim: usize) -> ScanParams {
        let mut p = ScanParams::new(dim, self.b, self.r_inner, self.t_max);
        p.target_c = self.c;
        if let Some(r) = self.radii {
            p.grid.radii = r;
        }
        if let Some(d) = self.dirs {
            p.grid.dirs = d;
        }
        p
    }
}

#[derive(Args)]
struct Thresholds {
    #[arg(long, default_value_t = DEFAULT_THRESHOLDS.rho_bar)]
    rho_bar: f64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLDS.c1)]
    c1: f64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLDS.c2)]
    c2: f64,
    #[arg(long)]
    c3: Option<f64>,
}

impl Thresholds {
    fn get(&self) -> EventThresholds {
        EventThresholds {
            rho_bar: self.rho_bar,
            c1: self.c1,
            c2: self.c2,
            c3: self.c3,
        }
    }
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long = "B", default_value_t = 1_000_000)]
    b: u64,
    #[arg(long, default_value_t = 3)]
    s: u32,
    /// JSON list of sets; defaults to half-lines on a 401-point grid over [−5, 5].
    #[arg(long)]
    sets: Option<PathBuf>,
    #[command(flatten)]
    thresholds: Thresholds,
    /// Output file stem.
    #[arg(long, default_value = "bootstrap-compare")]
    name: String,
}

#[derive(Args)]
struct TstatArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long = "B", default_value_t = 1_000_000)]
    b: u64,
    #[arg(long, default_value_t = 3)]
    s: u32,
    /// lo:hi:step
    #[arg(long, default_value = "-5:5:0.025", value_parser = parse_tgrid, allow_hyphen_values = true)]
    tgrid: TGrid,
    /// Gaussian importance draws for the expansion side.
    #[arg(long, default_value_t = 1_000_000)]
    m: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    thresholds: Thresholds,
    #[arg(long, default_value = "tstat-study")]
    name: String,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON config file.
    config: PathBuf,
}

#[derive(Args)]
struct ExpandArgs {
    /// Family whose standardized cumulants define the expansion.
    #[arg(long, conflicts_with = "cumulants")]
    family: Option<String>,
    /// Expansion JSON (as written by --json) to re-read.
    #[arg(long)]
    cumulants: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    n: u64,
    #[arg(long, default_value_t = 4)]
    s: u32,
    /// Also write the expansion as JSON to this file.
    #[arg(long)]
    json: Option<PathBuf>,
}

// Writes a line to stdout; a closed pipe ends the process quietly.
macro_rules! say {
    ($($arg:tt)*) => {
        if let Err(e) = writeln!(io::stdout().lock(), $($arg)*) {
            if e.kind() == io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            return Err(Error::io("<stdout>", e));
        }
    };
}

fn parse_tgrid(text: &str) -> std::result::Result<TGrid, String> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    let [lo, hi, step] = parts[..] else {
        return Err("expected lo:hi:step".into());
    };
    if !(step > 0.0 && hi > lo) {
        return Err("need hi > lo and step > 0".into());
    }
    Ok(TGrid {
        lo,
        hi,
        points: ((hi - lo) / step).round() as usize + 1,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn print_certificate(cert: &CramerCertificate, keep_evidence: bool) -> Result<()> {
    let mut out = cert.clone();
    if !keep_evidence {
        out.evidence.clear();
    }
    say!("{}", json(&out)?.trim_end());
    Ok(())
}

fn cf_scan(reg: &FamilyRegistry, a: &ScanArgs) -> Result<ExitCode> {
    let handle = match (&a.source.family, a.source.n, &a.source.data) {
        (Some(name), None, None) => reg
            .get(name)?
            .cf()
            .ok_or_else(|| Error::InvalidArgument(format!("{name} has no closed-form cf; pass --n")))?,
        _ => CharFunctionHandle::empirical(a.source.dataset(reg)?),
    };
    let cert = weak_cramer_scan(&handle, &a.params(handle.dim()))?;
    print_certificate(&cert, a.evidence)?;
    Ok(ExitCode::SUCCESS)
}

fn certify(reg: &FamilyRegistry, a: &ScanArgs) -> Result<ExitCode> {
    let data = a.source.dataset(reg)?;
    let p = a.params(data.dim());
    let mut cert = ustat_scan(&data, &p)?;
    let c_r = c_r_lower_bound(&data, p.r_inner, &scan_grid(data.dim(), &p)?)?;
    if c_r.value > 0.0 {
        cert.prob_bound = Some(failure_prob_bound(c_r.value, data.n() as u64)?);
    }
    print_certificate(&cert, a.evidence)?;
    Ok(ExitCode::SUCCESS)
}

fn bootstrap_cmd(reg: &FamilyRegistry, out: &Path, a: &CompareArgs) -> Result<ExitCode> {
    let data = a.source.dataset(reg)?;
    let sets: Vec<SetSpec> = match &a.sets {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&text)?
        }
        None if data.dim() == 1 => half_lines(&TGrid::default().values()?),
        None => return Err(Error::InvalidArgument("--sets is required for d > 1".into())),
    };
    let r = bootstrap_compare(&data, a.b, a.s, &sets, a.source.seed, &a.thresholds.get())?;
    write(&out.join(format!("{}.csv", a.name)), &r.csv()?)?;
    write(&out.join(format!("{}.json", a.name)), &json(&r)?)?;
    say!("sup deviation {:.6e} (gaussian {:.6e}) over {} sets", r.sup, r.gaussian_sup, sets.len());
    Ok(ExitCode::SUCCESS)
}

fn tstat_cmd(reg: &FamilyRegistry, out: &Path, a: &TstatArgs) -> Result<ExitCode> {
    let fam = reg.get(&a.family)?;
    if fam.dim() != 1 {
        return Err(Error::InvalidArgument("the t-statistic needs a one-dimensional family".into()));
    }
    let mut rng = Streams::new(a.seed).child(&[DATA_STREAM]).stream(0);
    let w = fam.sample_dataset(a.n, &mut rng)?;
    let cfg = TstatStudyConfig {
        b: a.b,
        s: a.s,
        t_grid: a.tgrid,
        m: a.m,
        seed: a.seed,
        thresholds: a.thresholds.get(),
    };
    let r = tstat_study(w.as_flat(), &cfg)?;
    write(&out.join(format!("{}.csv", a.name)), &r.csv()?)?;
    write(&out.join(format!("{}.json", a.name)), &json(&r)?)?;
    say!(
        "sup_t deviation {:.6e} at t = {} ({} degenerate draws)",
        r.sup, r.argmax_t, r.degenerate_draws
    );
    Ok(ExitCode::SUCCESS)
}

fn study_cmd(
    reg: &FamilyRegistry,
    out: &Path,
    a: &ConfigArgs,
    run: fn(&FamilyRegistry, &StudyConfig) -> Result<StudyReport>,
    stem: &str,
) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.config).map_err(|e| Error::io(&a.config, e))?;
    let cfg = StudyConfig::from_json(&text)?;
    let report = run(reg, &cfg)?;
    let csv = cfg.output.csv.clone().unwrap_or_else(|| out.join(format!("{stem}.csv")));
    let js = cfg.output.json.clone().unwrap_or_else(|| out.join(format!("{stem}.json")));
    for (path, format) in [(&csv, ReportFormat::Csv), (&js, ReportFormat::Json)] {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        emit_report(&report, format, path)?;
    }
    for f in &report.slopes {
        let theta: Vec<String> = f.theta.iter().map(|v| v.to_string()).collect();
        match f.slope {
            Some(slope) => say!(
                "{} θ=[{}] s={}: slope {slope:.4} ± {:.4} over {} points",
                f.metric,
                theta.join(","),
                f.s,
                f.std_error.unwrap_or(f64::NAN),
                f.points
            ),
            None => say!("{} θ=[{}] s={}: too few unflagged points", f.metric, theta.join(","), f.s),
        }
    }
    Ok(if report.inconclusive_only() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn expand(reg: &FamilyRegistry, a: &ExpandArgs) -> Result<ExitCode> {
    let e: EdgeworthExpansion = match (&a.family, &a.cumulants) {
        (Some(name), None) => {
            let c: CumulantSet = reg.get(name)?.standardized_cumulants(a.s)?;
            build_expansion(&c, a.n, a.s)?
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let doc: ExpansionJson = serde_json::from_str(&text)?;
            EdgeworthExpansion::from_json(&doc)?
        }
        _ => return Err(Error::InvalidArgument("give --family or --cumulants".into())),
    };
    say!("d={} s={} n={}", e.dim(), e.order(), e.sample_size());
    say!("{:>3}  {:<16} {:>24}", "j", "nu", "coefficient");
    for j in 0..=(e.order() as usize - 2) {
        for (nu, c) in e.term(j).expect("j ≤ s−2").terms() {
            say!("{j:>3}  {:<16} {c:>24.16e}", format!("{nu:?}"));
        }
    }
    if let Some(path) = &a.json {
        write(path, &json(&e.to_json())?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let reg = register_builtin_families();
    let out = &cli.out_dir;
    match &cli.command {
        Command::CfScan(a) => cf_scan(&reg, a),
        Command::Certify(a) => certify(&reg, a),
        Command::BootstrapCompare(a) => bootstrap_cmd(&reg, out, a),
        Command::TstatStudy(a) => tstat_cmd(&reg, out, a),
        Command::RateStudy(a) => study_cmd(&reg, out, a, rate_study, "rate-study"),
        Command::UniformSweep(a) => study_cmd(&reg, out, a, uniform_sweep, "uniform-sweep"),
        Command::Expand(a) => expand(&reg, a),
        Command::Families => {
            for f in reg.iter() {
                let lattice = if f.lattice() { "  lattice" } else { "" };
                say!("{}  d={}  θ={:?}{lattice}", f.name, f.dim(), f.theta());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
