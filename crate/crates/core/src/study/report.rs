use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 10] = [
    "family", "theta", "n", "rep", "s", "metric", "value", "mc_se", "flag", "seed",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordFlag {
    Ok,
    /// The Monte Carlo band is wider than the metric.
    Inconclusive,
}

impl RecordFlag {
    fn as_str(self) -> &'static str {
        match self {
            RecordFlag::Ok => "ok",
            RecordFlag::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub family: String,
    pub theta: Vec<f64>,
    pub n: u64,
    pub rep: u32,
    pub s: u32,
    pub metric: String,
    pub value: f64,
    pub mc_se: f64,
    pub flag: RecordFlag,
    /// Seed of the record's stream family.
    pub seed: u64,
}

/// Log–log OLS fit of a metric against `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub theta: Vec<f64>,
    pub s: u32,
    pub metric: String,
    pub points: usize,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub std_error: Option<f64>,
}

/// A θ considered by a sweep, with its moment-cap proxy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaEntry {
    pub theta: Vec<f64>,
    pub moment_proxy: f64,
    pub accepted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub version: String,
    pub config_hash: String,
    pub records: Vec<StudyRecord>,
    pub slopes: Vec<SlopeFit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub thetas: Vec<ThetaEntry>,
}

impl StudyReport {
    pub fn new(config_hash: impl Into<String>) -> Self {
        StudyReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash.into(),
            records: vec![],
            slopes: vec![],
            thetas: vec![],
        }
    }

    /// True when there are records and every one is flagged inconclusive.
    pub fn inconclusive_only(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.flag == RecordFlag::Inconclusive)
    }

    pub fn slope(&self, theta: &[f64], s: u32, metric: &str) -> Option<&SlopeFit> {
        self.slopes
            .iter()
            .find(|f| f.theta == theta && f.s == s && f.metric == metric)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Hex SHA-256 of a serializable configuration.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// OLS of `ln(value)` on `ln(n)`; `None` entries when there are too few
/// points (two for the slope, three for its standard error).
pub fn fit_log_log(points: &[(u64, f64)]) -> (Option<f64>, Option<f64>, Option<f64>) {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, v)| *n > 0 && *v > 0.0)
        .map(|(n, v)| ((*n as f64).ln(), v.ln()))
        .collect();
    let k = pts.len() as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
    if pts.len() < 2 || sxx == 0.0 {
        return (None, None, None);
    }
    let slope = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum::<f64>() / sxx;
    let intercept = ym - slope * xm;
    let se = (pts.len() >= 3).then(|| {
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (rss / (k - 2.0) / sxx).sqrt()
    });
    (Some(slope), Some(intercept), se)
}

fn join_theta(theta: &[f64]) -> String {
    theta.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(";")
}

pub fn report_csv(r: &StudyReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(CSV_HEADER)?;
    for rec in &r.records {
        w.write_record([
            rec.family.clone(),
            join_theta(&rec.theta),
            rec.n.to_string(),
            rec.rep.to_string(),
            rec.s.to_string(),
            rec.metric.clone(),
            format!("{:?}", rec.value),
            format!("{:?}", rec.mc_se),
            rec.flag.as_str().to_string(),
            rec.seed.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_report_csv(text: &str) -> Result<Vec<StudyRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let num = |field: &str, what: &str| -> Result<f64> {
        field
            .parse()
            .map_err(|_| Error::Parse(format!("bad {what} {field:?}")))
    };
    let int = |field: &str, what: &str| -> Result<u64> {
        field
            .parse()
            .map_err(|_| Error::Parse(format!("bad {what} {field:?}")))
    };
    let mut out = vec![];
    for row in rd.records() {
        let row = row?;
        let theta = if row[1].is_empty() {
            vec![]
        } else {
            row[1].split(';').map(|v| num(v, "theta")).collect::<Result<_>>()?
        };
        out.push(StudyRecord {
            family: row[0].to_string(),
            theta,
            n: int(&row[2], "n")?,
            rep: int(&row[3], "rep")? as u32,
            s: int(&row[4], "s")? as u32,
            metric: row[5].to_string(),
            value: num(&row[6], "value")?,
            mc_se: num(&row[7], "mc_se")?,
            flag: match &row[8] {
                "ok" => RecordFlag::Ok,
                "inconclusive" => RecordFlag::Inconclusive,
                other => return Err(Error::Parse(format!("bad flag {other:?}"))),
            },
            seed: int(&row[9], "seed")?,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

pub fn emit_report(r: &StudyReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = match format {
        ReportFormat::Csv => report_csv(r)?,
        ReportFormat::Json => r.to_json()?,
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
