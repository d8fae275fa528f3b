use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cf::CharFunctionHandle;
use super::ustat::ustat_certificate;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
/// Shell radius per extra multiple of the base direction count.
const ANGULAR_REF: f64 = 50.0;

/// Radial-shell grid over `R < ‖t‖ ≤ T_max`: `radii` geometrically spaced
/// shells, each with `dirs·⌈‖t‖/50⌉` directions rotated by a golden-ratio
/// offset per shell. One dimension always uses `±t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub radii: usize,
    pub dirs: usize,
}

impl GridSpec {
    pub fn default_for(dim: usize) -> Self {
        GridSpec {
            radii: 512,
            dirs: match dim {
                1 => 2,
                2 => 64,
                _ => 256,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    pub b: f64,
    pub r_inner: f64,
    pub t_max: f64,
    /// Margin to test; when absent the scan only reports `ĉ`.
    pub target_c: Option<f64>,
    pub grid: GridSpec,
}

impl ScanParams {
    pub fn new(dim: usize, b: f64, r_inner: f64, t_max: f64) -> Self {
        ScanParams {
            b,
            r_inner,
            t_max,
            target_c: None,
            grid: GridSpec::default_for(dim),
        }
    }

    pub fn with_target(mut self, c: f64) -> Self {
        self.target_c = Some(c);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.b > 0.0) {
            return Err(Error::invalid("exponent b must be positive"));
        }
        if !(self.r_inner > 0.0 && self.r_inner < self.t_max) {
            return Err(Error::invalid("need 0 < R < T_max"));
        }
        if self.grid.radii == 0 || self.grid.dirs == 0 {
            return Err(Error::invalid("scan grid is empty"));
        }
        if let Some(c) = self.target_c {
            if !(c > 0.0) {
                return Err(Error::invalid("margin c must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointSource {
    Grid,
    /// Golden-section refinement of a radial local minimum.
    Refined,
    /// Multiple of `2π/β` for a detected lattice span `β`.
    Lattice,
}

/// One scanned frequency: `slack = (1 − |φ(t)|)·‖t‖^b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub t: Vec<f64>,
    pub norm: f64,
    pub abs_cf: f64,
    pub slack: f64,
    pub source: PointSource,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CertificateStatus {
    CertifiedOnGrid,
    Violated { witness: Vec<f64>, abs_cf: f64 },
    CertifiedByUstat,
}

/// Result of a weak Cramér scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CramerCertificate {
    pub b: f64,
    /// The tested margin, or `ĉ` when none was supplied.
    pub c: f64,
    pub r_inner: f64,
    pub t_max: f64,
    /// Minimum slack over the evidence.
    pub c_hat: f64,
    pub argmin: Vec<f64>,
    pub status: CertificateStatus,
    pub s_value: Option<f64>,
    pub prob_bound: Option<f64>,
    pub evidence: Vec<EvidenceRecord>,
}

impl CramerCertificate {
    pub fn is_violated(&self) -> bool {
        matches!(self.status, CertificateStatus::Violated { .. })
    }
}

fn shell_radii(p: &ScanParams) -> Vec<f64> {
    let q = (p.t_max / p.r_inner).powf(1.0 / p.grid.radii as f64);
    (1..=p.grid.radii)
        .map(|i| {
            if i == p.grid.radii {
                p.t_max
            } else {
                p.r_inner * q.powi(i as i32)
            }
        })
        .collect()
}

fn shell_directions(dim: usize, base: usize, shell: usize, r: f64) -> Vec<Vec<f64>> {
    if dim == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    let m = base * ((r / ANGULAR_REF).ceil() as usize).max(1);
    let offset = (shell as f64 * GOLDEN).fract();
    match dim {
        2 => (0..m)
            .map(|k| {
                let th = 2.0 * PI * (k as f64 + offset) / m as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => (0..m)
            .map(|k| {
                // Fibonacci sphere in the first three coordinates
                let z = 1.0 - (2.0 * k as f64 + 1.0) / m as f64;
                let rho = (1.0 - z * z).sqrt();
                let ph = 2.0 * PI * (k as f64 * GOLDEN + offset).fract();
                let mut v = vec![0.0; dim];
                v[0] = rho * ph.cos();
                v[1] = rho * ph.sin();
                v[2] = z;
                v
            })
            .collect(),
    }
}

/// The scan grid as explicit points, shell by shell.
pub fn scan_grid(dim: usize, p: &ScanParams) -> Result<Vec<Vec<f64>>> {
    p.validate()?;
    Ok(shell_radii(p)
        .iter()
        .enumerate()
        .flat_map(|(i, &r)| {
            shell_directions(dim, p.grid.dirs, i, r)
                .into_iter()
                .map(move |u| u.iter().map(|x| x * r).collect::<Vec<_>>())
        })
        .collect())
}

/// Span `β` such that all values lie on `α + βℤ`, if one exists at a
/// resolution of `1e-6` of the value range.
pub fn lattice_span(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let scale = (v[v.len() - 1] - v[0]).abs();
    if scale == 0.0 {
        return None;
    }
    let tol = 1e-9 * scale;
    let diffs: Vec<f64> = v.iter().map(|x| x - v[0]).filter(|d| *d > tol).collect();
    let gcd = |mut a: f64, mut b: f64| {
        while b > tol {
            let r = a % b;
            a = b;
            b = r;
        }
        a
    };
    let beta = diffs.iter().fold(diffs[0], |acc, &d| gcd(d.max(acc), d.min(acc)));
    if beta < 1e-6 * scale {
        return None;
    }
    diffs
        .iter()
        .all(|d| {
            let m = d / beta;
            (m - m.round()).abs() <= 1e-9 * m.max(1.0)
        })
        .then_some(beta)
}

fn lattice_candidates(handles: &[&CharFunctionHandle], p: &ScanParams) -> Vec<Vec<f64>> {
    let mut out = vec![];
    for h in handles {
        let Some(data) = h.dataset() else { continue };
        let dim = data.dim();
        for k in 0..dim {
            let Some(beta) = lattice_span(&data.column(k)) else {
                continue;
            };
            let step = 2.0 * PI / beta;
            let mut m = 1.0;
            while m * step <= p.t_max {
                if m * step > p.r_inner {
                    for sign in [1.0, -1.0] {
                        let mut t = vec![0.0; dim];
                        t[k] = sign * m * step;
                        out.push(t);
                    }
                }
                m += 1.0;
            }
        }
    }
    out
}

fn record(modulus: &(impl Fn(&[f64]) -> f64 + Sync), t: Vec<f64>, b: f64, source: PointSource) -> EvidenceRecord {
    let norm = t.iter().map(|v| v * v).sum::<f64>().sqrt();
    let abs_cf = modulus(&t);
    EvidenceRecord {
        slack: (1.0 - abs_cf) * norm.powf(b),
        t,
        norm,
        abs_cf,
        source,
    }
}

/// Golden-section minimization of the slack along the ray through `dir`
/// on `[lo, hi]`.
fn refine_on_ray(
    modulus: &(impl Fn(&[f64]) -> f64 + Sync),
    dir: &[f64],
    lo: f64,
    hi: f64,
    b: f64,
) -> EvidenceRecord {
    let at = |r: f64| dir.iter().map(|u| u * r).collect::<Vec<_>>();
    let slack = |r: f64| (1.0 - modulus(&at(r))) * r.powf(b);
    let (mut a, mut c) = (lo, hi);
    let mut x1 = c - GOLDEN * (c - a);
    let mut x2 = a + GOLDEN * (c - a);
    let (mut f1, mut f2) = (slack(x1), slack(x2));
    for _ in 0..60 {
        if f1 < f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - GOLDEN * (c - a);
            f1 = slack(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (c - a);
            f2 = slack(x2);
        }
    }
    let r = if f1 < f2 { x1 } else { x2 };
    record(modulus, at(r), b, PointSource::Refined)
}

fn scan_modulus(
    dim: usize,
    modulus: impl Fn(&[f64]) -> f64 + Sync,
    lattice: Vec<Vec<f64>>,
    p: &ScanParams,
) -> Result<CramerCertificate> {
    p.validate()?;
    let radii = shell_radii(p);
    // shell-major evidence; per-shell work runs in parallel, order is fixed
    let shells: Vec<Vec<EvidenceRecord>> = radii
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            shell_directions(dim, p.grid.dirs, i, r)
                .into_iter()
                .map(|u| record(&modulus, u.iter().map(|x| x * r).collect(), p.b, PointSource::Grid))
                .collect()
        })
        .collect();
    let mut evidence: Vec<EvidenceRecord> = shells.iter().flatten().cloned().collect();

    if dim == 1 {
        // interior radial local minima, both signs
        let refined: Vec<EvidenceRecord> = (1..radii.len().saturating_sub(1))
            .into_par_iter()
            .flat_map_iter(|i| {
                (0..2)
                    .filter(|&s| {
                        let v = shells[i][s].slack;
                        v <= shells[i - 1][s].slack && v <= shells[i + 1][s].slack
                    })
                    .map(|s| {
                        let dir = [if s == 0 { 1.0 } else { -1.0 }];
                        refine_on_ray(&modulus, &dir, radii[i - 1], radii[i + 1], p.b)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        evidence.extend(refined);
    }
    evidence.extend(
        lattice
            .into_iter()
            .map(|t| record(&modulus, t, p.b, PointSource::Lattice)),
    );

    let best = evidence
        .iter()
        .min_by(|a, b| a.slack.total_cmp(&b.slack).then(a.norm.total_cmp(&b.norm)))
        .expect("nonempty grid");
    let c_hat = best.slack;
    let argmin = best.t.clone();
    let violated = match p.target_c {
        Some(c) => c_hat < c,
        None => !(c_hat > 0.0),
    };
    let status = if violated {
        CertificateStatus::Violated {
            witness: argmin.clone(),
            abs_cf: best.abs_cf,
        }
    } else {
        CertificateStatus::CertifiedOnGrid
    };
    Ok(CramerCertificate {
        b: p.b,
        c: p.target_c.unwrap_or(c_hat),
        r_inner: p.r_inner,
        t_max: p.t_max,
        c_hat,
        argmin,
        status,
        s_value: None,
        prob_bound: None,
        evidence,
    })
}

/// Scans `(1 − |φ(t)|)·‖t‖^b` over the grid for `R < ‖t‖ ≤ T_max`.
pub fn weak_cramer_scan(h: &CharFunctionHandle, p: &ScanParams) -> Result<CramerCertificate> {
    scan_modulus(
        h.dim(),
        |t| h.eval_unchecked(t).norm(),
        lattice_candidates(&[h], p),
        p,
    )
}

/// The same scan applied to `t ↦ (1/n) Σ_i |φ_i(t)|`.
pub fn mean_weak_cramer_scan(
    hs: &[CharFunctionHandle],
    p: &ScanParams,
) -> Result<CramerCertificate> {
    let Some(first) = hs.first() else {
        return Err(Error::invalid("no characteristic functions"));
    };
    let dim = first.dim();
    if hs.iter().any(|h| h.dim() != dim) {
        return Err(Error::invalid("handles differ in dimension"));
    }
    let refs: Vec<&CharFunctionHandle> = hs.iter().collect();
    let k = hs.len() as f64;
    scan_modulus(
        dim,
        |t| hs.iter().map(|h| h.eval_unchecked(t).norm()).sum::<f64>() / k,
        lattice_candidates(&refs, p),
        p,
    )
}

/// U-statistic certificate over the scan grid: certified when
/// `min_t S(t)·‖t‖^b` reaches the margin (or is positive if none is given).
/// The status is otherwise left as the plain grid scan reports it.
pub fn ustat_scan(data: &Dataset, p: &ScanParams) -> Result<CramerCertificate> {
    let mut cert = weak_cramer_scan(&CharFunctionHandle::empirical(data.clone()), p)?;
    let grid: Vec<Vec<f64>> = cert.evidence.iter().map(|e| e.t.clone()).collect();
    let records = grid
        .par_iter()
        .map(|t| ustat_certificate(data, t, p.b))
        .collect::<Result<Vec<_>>>()?;
    let worst = records
        .iter()
        .min_by(|a, b| a.scaled.total_cmp(&b.scaled))
        .expect("nonempty grid");
    cert.s_value = Some(worst.s_value);
    let margin = p.target_c.unwrap_or(f64::MIN_POSITIVE);
    if worst.scaled >= margin {
        cert.status = CertificateStatus::CertifiedByUstat;
        if p.target_c.is_none() {
            cert.c = worst.scaled;
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(v: &[f64]) -> CharFunctionHandle {
        CharFunctionHandle::empirical(Dataset::from_values(v).unwrap())
    }

    #[test]
    fn bernoulli_lattice_is_violated_near_two_pi() {
        let p = ScanParams::new(1, 1.0, 1.0, 10.0).with_target(0.01);
        let cert = weak_cramer_scan(&data(&[0.0, 1.0]), &p).unwrap();
        match &cert.status {
            CertificateStatus::Violated { witness, abs_cf } => {
                let m = witness[0].abs() / (2.0 * PI);
                assert!((m - m.round()).abs() < 1e-9);
                assert!(*abs_cf >= 1.0 - 1e-12);
            }
            s => panic!("expected violation, got {s:?}"),
        }
        let at_span = cert
            .evidence
            .iter()
            .find(|e| e.source == PointSource::Lattice && e.t[0] == 2.0 * PI)
            .unwrap();
        assert!((at_span.abs_cf - 1.0).abs() < 1e-12);
    }

    #[test]
    fn irrational_three_point_law_has_positive_margin() {
        let p = ScanParams::new(1, 1.0, 1.0, 100.0);
        let cert = weak_cramer_scan(&data(&[0.0, 1.0, 2f64.sqrt()]), &p).unwrap();
        assert!(cert.c_hat > 0.0);
        assert_eq!(cert.status, CertificateStatus::CertifiedOnGrid);
        // a 10x finer grid confirms the minimum is positive
        let mut fine = p.clone();
        fine.grid.radii *= 10;
        let c_fine = weak_cramer_scan(&data(&[0.0, 1.0, 2f64.sqrt()]), &fine).unwrap();
        assert!(c_fine.c_hat > 0.0);
        assert!(c_fine.c_hat <= cert.c_hat * 1.5);
    }

    #[test]
    fn gaussian_slack_grows_with_ceiling() {
        let g = CharFunctionHandle::standard_normal(1);
        let lo = weak_cramer_scan(&g, &ScanParams::new(1, 1.0, 1.0, 10.0)).unwrap();
        let hi = weak_cramer_scan(&g, &ScanParams::new(1, 1.0, 1.0, 100.0)).unwrap();
        let max_lo = lo.evidence.iter().map(|e| e.slack).fold(0.0, f64::max);
        let max_hi = hi.evidence.iter().map(|e| e.slack).fold(0.0, f64::max);
        assert!((max_lo - 10.0).abs() < 1e-9 && (max_hi - 100.0).abs() < 1e-9);
    }

    #[test]
    fn lattice_span_detection() {
        assert_eq!(lattice_span(&[0.0, 1.0, 1.0, 0.0]), Some(1.0));
        let b = lattice_span(&[0.25, 0.75, 2.25]).unwrap();
        assert!((b - 0.5).abs() < 1e-12);
        assert_eq!(lattice_span(&[0.0, 1.0, 2f64.sqrt()]), None);
        assert_eq!(lattice_span(&[3.0, 3.0]), None);
    }

    #[test]
    fn invalid_parameters() {
        let h = data(&[0.0, 1.0]);
        assert!(weak_cramer_scan(&h, &ScanParams::new(1, 1.0, 5.0, 2.0)).is_err());
        let mut p = ScanParams::new(1, 1.0, 1.0, 10.0);
        p.grid.radii = 0;
        assert!(weak_cramer_scan(&h, &p).is_err());
        assert!(mean_weak_cramer_scan(&[], &ScanParams::new(1, 1.0, 1.0, 2.0)).is_err());
        let two_d = CharFunctionHandle::standard_normal(2);
        assert!(mean_weak_cramer_scan(&[h, two_d], &ScanParams::new(1, 1.0, 1.0, 2.0)).is_err());
    }
}
