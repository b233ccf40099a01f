//! Ladders of runs, their comparison, and plot data.
//!
//! Every member run owns a directory `<label>-<hash>` where the hash is taken
//! over its configuration. A `MANIFEST` records the run's status, so an
//! interrupted study resumes by skipping members already complete.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use super::pipeline::{execute, Norms, RunResult, WindowStats};
use crate::energy::Norm;
use crate::error::{Error, Result};
use crate::gas::Invariant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    /// Ladder of `n1` values; `n2` scales with `n1`.
    Convergence,
    EpsilonScaling,
    DeltaRobustness,
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySpec {
    pub kind: StudyKind,
    pub ladder: Vec<f64>,
    /// Member runs executed at once.
    pub workers: usize,
}

fn line_err(line: usize, msg: impl Into<String>) -> Error {
    Error::ConfigLine { line, msg: msg.into() }
}

/// Parses `kind = ...`, `ladder = a, b, ...` and `workers = n`.
pub fn parse_study(text: &str) -> Result<StudySpec> {
    let mut kind = None;
    let mut ladder = Vec::new();
    let mut workers = 1usize;
    let mut ladder_line = 0;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body.split_once('=').ok_or_else(|| line_err(line, format!("expected key = value, got '{body}'")))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            "kind" => {
                kind = Some(
                    serde_json::from_value::<StudyKind>(serde_json::Value::String(v.to_lowercase()))
                        .map_err(|_| line_err(line, format!("unknown study kind '{v}'")))?,
                )
            }
            "ladder" => {
                ladder_line = line;
                ladder = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>().map_err(|_| line_err(line, format!("cannot parse ladder value '{s}'"))))
                    .collect::<Result<_>>()?;
                if ladder.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(line_err(line, "ladder values must be finite and non-negative"));
                }
            }
            "workers" => {
                workers = v.parse().map_err(|_| line_err(line, format!("cannot parse '{v}' for workers")))?;
                if workers == 0 {
                    return Err(line_err(line, "workers must be at least 1"));
                }
            }
            _ => return Err(line_err(line, format!("unknown key '{k}'"))),
        }
    }
    let kind = kind.ok_or_else(|| Error::Config("study spec needs a kind".into()))?;
    if kind != StudyKind::Single && ladder.len() < 2 {
        let msg = "scaling studies need a ladder of at least two values";
        return Err(if ladder_line > 0 { line_err(ladder_line, msg) } else { Error::Config(msg.into()) });
    }
    Ok(StudySpec { kind, ladder, workers })
}

impl StudySpec {
    /// Labelled member configurations, each validated.
    pub fn members(&self, base: &RunConfig) -> Result<Vec<(String, RunConfig)>> {
        let mut out = Vec::new();
        if self.kind == StudyKind::Single {
            out.push(("single".to_string(), base.clone()));
        }
        for &v in &self.ladder {
            let mut c = base.clone();
            let label = match self.kind {
                StudyKind::Single => break,
                StudyKind::Convergence => {
                    if v.fract() != 0.0 || v < 8.0 {
                        return Err(Error::Config(format!("resolution {v} is not an integer of at least 8")));
                    }
                    c.n1 = v as usize;
                    c.n2 = ((base.n2 * c.n1) as f64 / base.n1 as f64).round().max(1.0) as usize;
                    format!("n1-{}", c.n1)
                }
                StudyKind::EpsilonScaling => {
                    c.epsilon = v;
                    format!("eps-{v}")
                }
                StudyKind::DeltaRobustness => {
                    c.delta = v;
                    format!("delta-{v}")
                }
            };
            out.push((label, c));
        }
        for (label, c) in &out {
            c.validate().map_err(|e| Error::Config(format!("member {label}: {e}")))?;
        }
        Ok(out)
    }
}

/// First 12 hex digits of the SHA-256 of the configuration without its
/// output directory.
pub fn config_hash(cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.output = None;
    let bytes = serde_json::to_vec(&c).expect("config serializes");
    Sha256::digest(&bytes).iter().take(6).map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub status: RunStatus,
    pub label: String,
    pub hash: String,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub label: String,
    pub hash: String,
    pub dir: PathBuf,
    pub status: RunStatus,
    /// Loaded from an earlier complete run instead of executed.
    pub reused: bool,
    pub error: Option<String>,
    pub result: Option<RunResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, lo: Option<f64>, hi: Option<f64>) -> Self {
        let pass = value.is_finite() && lo.map_or(true, |l| value >= l) && hi.map_or(true, |h| value <= h);
        Self { name: name.into(), value, lo, hi, pass }
    }

    pub fn at_most(name: impl Into<String>, value: f64, hi: f64) -> Self {
        Self::new(name, value, None, Some(hi))
    }

    pub fn at_least(name: impl Into<String>, value: f64, lo: f64) -> Self {
        Self::new(name, value, Some(lo), None)
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self::new(name, value, Some(lo), Some(hi))
    }

    fn prefixed(mut self, p: &str) -> Self {
        self.name = format!("{p}: {}", self.name);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n: usize,
}

/// Least-squares line through `(x, y)`.
pub fn fit_line(name: impl Into<String>, x: &[f64], y: &[f64]) -> SlopeFit {
    let n = x.len().min(y.len());
    let (mx, my) = (x[..n].iter().sum::<f64>() / n as f64, y[..n].iter().sum::<f64>() / n as f64);
    let sxy: f64 = (0..n).map(|k| (x[k] - mx) * (y[k] - my)).sum();
    let sxx: f64 = (0..n).map(|k| (x[k] - mx).powi(2)).sum();
    let syy: f64 = (0..n).map(|k| (y[k] - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    SlopeFit { name: name.into(), slope, intercept: my - slope * mx, r2, n }
}

/// Fit in log-log coordinates over the pairs where both values are positive.
pub fn fit_loglog(name: impl Into<String>, x: &[f64], y: &[f64]) -> Option<SlopeFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).unzip();
    (lx.len() >= 2).then(|| fit_line(name, &lx, &ly))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub kind: StudyKind,
    pub out: PathBuf,
    pub runs: Vec<RunRecord>,
    pub checks: Vec<Check>,
    pub fits: Vec<SlopeFit>,
}

impl StudyReport {
    pub fn pass(&self) -> bool {
        self.runs.iter().all(|r| r.status == RunStatus::Complete) && self.checks.iter().all(|c| c.pass)
    }

    fn results(&self) -> impl Iterator<Item = (&RunRecord, &RunResult)> {
        self.runs.iter().filter_map(|r| r.result.as_ref().map(|x| (r, x)))
    }
}

// Measurements shared by studies and the acceptance suite.

/// Windows at `t >= k delta`.
pub fn late_windows(r: &RunResult, k: f64) -> impl Iterator<Item = &WindowStats> {
    let from = k * r.config.delta - 1e-9;
    r.windows.iter().filter(move |w| w.t >= from)
}

fn late_max(r: &RunResult, f: impl Fn(&WindowStats) -> f64) -> f64 {
    late_windows(r, 2.0).map(f).fold(0.0, f64::max)
}

/// `E + Ebar` of one norm at `(t, u)`.
pub fn energy_at(r: &RunResult, psi: Invariant, norm: Norm, order: usize, t: f64, u: f64) -> Option<f64> {
    r.energy.find(psi, norm, order, t, u).map(|e| e.energy())
}

/// `E + Ebar` at the last analysis time and the top level.
pub fn final_energy(r: &RunResult, psi: Invariant, norm: Norm, order: usize) -> Option<f64> {
    let t = *r.energy.times().last()?;
    let u = *r.energy.levels.last()?;
    energy_at(r, psi, norm, order, t, u)
}

/// Windows nearest to the given times.
fn windows_near<'a>(r: &'a RunResult, times: &[f64]) -> Vec<&'a WindowStats> {
    times
        .iter()
        .filter_map(|&t| r.windows.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs())))
        .collect()
}

pub const YRING_TIMES: [f64; 3] = [0.25, 0.5, 1.0];

/// Largest `|yring|` over the windows nearest to `YRING_TIMES`.
pub fn yring_max(r: &RunResult) -> f64 {
    windows_near(r, &YRING_TIMES).iter().map(|w| w.yring).fold(0.0, f64::max)
}

/// Time sum of a residual's band `L1` norm over `t >= 2 delta`, on the
/// windows both runs share.
pub fn summed_residual(r: &RunResult, other: &RunResult, pick: fn(&WindowStats) -> Norms) -> f64 {
    late_windows(r, 2.0).filter(|w| other.window_at(w.t).is_some()).map(|w| pick(w).l1).sum()
}

/// Residuals compared across resolutions: name and accessor.
pub const RESIDUALS: [(&str, fn(&WindowStats) -> Norms); 4] = [
    ("y_residual", |w| w.y_residual),
    ("z_residual", |w| w.z_residual),
    ("l_kappa_residual", |w| w.l_kappa_residual),
    ("l_that_residual", |w| w.l_that_residual),
];

/// Measured `max (E + F) / (eps^2 t^2)` over order-1 norms and the lattice.
pub fn bootstrap_constant(r: &RunResult) -> f64 {
    let eps2 = r.config.epsilon.powi(2);
    r.energy
        .rows
        .iter()
        .filter(|row| row.norm == Norm::Order && row.order == 1)
        .map(|row| (row.energy() + row.flux()) / (eps2 * row.t * row.t))
        .fold(0.0, f64::max)
}

/// Geometry of an unperturbed run against the exact fan.
pub fn geometry_checks(r: &RunResult) -> Vec<Check> {
    let floor = 5.0 * (r.config.x1_max - r.config.x1_min) / r.config.n1 as f64;
    let (mp_lo, mp_hi) =
        late_windows(r, 2.0).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), w| (a.min(w.m_prime.0), b.max(w.m_prime.1)));
    vec![
        Check::at_most("max |kappa/t - 1|", late_max(r, |w| w.kappa_over_t), 0.05),
        Check::at_most("max |that1 + 1|", late_max(r, |w| w.that1_plus_1), 0.05),
        Check::at_most("max |that2|", late_max(r, |w| w.that2), 0.05),
        Check::at_most("max |chi|", late_max(r, |w| w.chi), 0.05),
        Check::at_most("max |zeta|", late_max(r, |w| w.zeta), 0.05),
        Check::at_most("max |eta|", late_max(r, |w| w.eta), 0.05),
        Check::at_most("max y residual", late_max(r, |w| w.y_residual.max), floor),
        Check::at_most("max z residual", late_max(r, |w| w.z_residual.max), floor),
        Check::at_most("max L kappa residual", late_max(r, |w| w.l_kappa_residual.max), 0.05),
        Check::at_most("max |m' - 1|", (mp_hi - 1.0).abs().max((1.0 - mp_lo).abs()), 0.01),
    ]
}

/// Signs of `L mu`, `Tring wbar` and `Lbar_ring wbar` over `t >= 2 delta`.
pub fn sign_checks(r: &RunResult) -> Vec<Check> {
    let lmu = late_windows(r, 2.0).map(|w| w.signs.l_mu.0).fold(f64::INFINITY, f64::min);
    vec![
        Check::new("min L mu", lmu, Some(f64::MIN_POSITIVE), None),
        Check::at_most("max Tring wbar", late_max_signed(r, |w| w.signs.t_wbar.1), -0.4),
        Check::at_most("max Lbar_ring wbar", late_max_signed(r, |w| w.signs.lbar_wbar.1), -0.4),
    ]
}

fn late_max_signed(r: &RunResult, f: impl Fn(&WindowStats) -> f64) -> f64 {
    late_windows(r, 2.0).map(f).fold(f64::NEG_INFINITY, f64::max)
}

/// Log-log slope of the order-1 energy at the top level against `t` over
/// `t >= 4 delta`, per invariant.
pub fn time_slopes(r: &RunResult) -> (Vec<Check>, Vec<SlopeFit>) {
    let (mut checks, mut fits) = (Vec::new(), Vec::new());
    let Some(&u) = r.energy.levels.last() else { return (checks, fits) };
    let times: Vec<f64> = r.energy.times().into_iter().filter(|&t| t >= 4.0 * r.config.delta - 1e-9).collect();
    for psi in Invariant::ALL {
        let e: Vec<f64> = times.iter().map(|&t| energy_at(r, psi, Norm::Order, 1, t, u).unwrap_or(0.0)).collect();
        let name = format!("t-slope of E1({})", psi.name());
        match fit_loglog(&name, &times, &e) {
            Some(f) => {
                checks.push(Check::within(&name, f.slope, 1.7, 2.3));
                fits.push(f);
            }
            None => checks.push(Check::within(&name, f64::NAN, 1.7, 2.3)),
        }
    }
    (checks, fits)
}

/// `|yring|` at `YRING_TIMES` varies by less than a factor 2.
pub fn yring_variation(r: &RunResult) -> Check {
    let v: Vec<f64> = windows_near(r, &YRING_TIMES).iter().map(|w| w.yring).collect();
    let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    Check::new("yring variation across t", hi / lo, None, Some(2.0 - 1e-12))
}

/// Per-run checks; these decide the exit code of a single run.
pub fn run_checks(r: &RunResult) -> Vec<Check> {
    let mut c = vec![Check::new(
        "data predicates",
        r.predicates.predicates.iter().filter(|p| !p.pass).count() as f64,
        None,
        Some(0.0),
    )];
    if r.config.epsilon == 0.0 {
        c.extend(geometry_checks(r));
        return c;
    }
    if r.config.epsilon <= 0.01 {
        c.extend(sign_checks(r));
    }
    for g in &r.gronwall {
        let name = format!("gronwall {} {:?} {}", g.psi.name(), g.norm, g.order).to_lowercase();
        let ratio = g.verdict.as_ref().filter(|v| v.pass).map_or(f64::NAN, |v| v.max_ratio);
        c.push(Check::new(name, ratio, None, None));
    }
    c.extend(time_slopes(r).0);
    c.push(yring_variation(r));
    c
}

/// Coarse against fine: the fan error halves and, on perturbed runs, the
/// time-summed residuals drop by at least 1.5.
pub fn convergence_checks(coarse: &RunResult, fine: &RunResult) -> Vec<Check> {
    let mut c = vec![Check::within("fan L1 error ratio", coarse.fan_l1_error / fine.fan_l1_error, 1.6, 2.4)];
    if fine.config.epsilon == 0.0 {
        c.push(Check::at_most("x2 variation", coarse.x2_variation.max(fine.x2_variation), 1e-12));
    } else {
        for (name, pick) in RESIDUALS {
            let ratio = summed_residual(coarse, fine, pick) / summed_residual(fine, coarse, pick);
            c.push(Check::at_least(format!("{name} L1 ratio"), ratio, 1.5));
        }
    }
    c
}

/// Quantities expected to scale like `eps^2`, with their measurements.
pub fn quadratic_quantities(r: &RunResult) -> Vec<(String, f64)> {
    let mut q = vec![("max |that1 + 1|".to_string(), late_max(r, |w| w.that1_plus_1))];
    let keys = [
        (Invariant::W, Norm::Order, 0),
        (Invariant::Psi2, Norm::Order, 0),
        (Invariant::Wbar, Norm::Ring, 0),
        (Invariant::W, Norm::Order, 1),
        (Invariant::Wbar, Norm::Order, 1),
        (Invariant::Psi2, Norm::Order, 1),
    ];
    for (psi, norm, order) in keys {
        let tag = if norm == Norm::Ring { "ring " } else { "" };
        q.push((format!("{tag}E{order}({})", psi.name()), final_energy(r, psi, norm, order).unwrap_or(f64::NAN)));
    }
    q
}

/// Quantities expected to scale like `eps`.
pub fn linear_quantities(r: &RunResult) -> Vec<(String, f64)> {
    vec![("max |that2|".to_string(), late_max(r, |w| w.that2)), ("max |yring|".to_string(), yring_max(r))]
}

/// `a` at the larger amplitude against `b`, with `r = eps_a / eps_b`.
pub fn epsilon_checks(a: &RunResult, b: &RunResult) -> Vec<Check> {
    let r = a.config.epsilon / b.config.epsilon;
    let mut c = Vec::new();
    for ((name, x), (_, y)) in quadratic_quantities(a).into_iter().zip(quadratic_quantities(b)) {
        c.push(Check::within(format!("{name} ratio"), x / y, 0.75 * r * r, 1.25 * r * r));
    }
    for ((name, x), (_, y)) in linear_quantities(a).into_iter().zip(linear_quantities(b)) {
        c.push(Check::within(format!("{name} ratio"), x / y, 0.8 * r, 1.2 * r));
    }
    c
}

fn write_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    fs::write(dir.join("MANIFEST"), serde_json::to_vec_pretty(m)?)?;
    Ok(())
}

fn read_complete(dir: &Path, hash: &str) -> Option<RunResult> {
    let m: Manifest = serde_json::from_slice(&fs::read(dir.join("MANIFEST")).ok()?).ok()?;
    if m.status != RunStatus::Complete || m.hash != hash {
        return None;
    }
    serde_json::from_slice(&fs::read(dir.join("result.json")).ok()?).ok()
}

/// One row per window.
pub fn write_windows_csv<W: Write>(r: &RunResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut head = vec!["t", "band_cells", "kappa_over_t", "that1_plus_1", "that2", "chi", "zeta", "eta", "yring", "zring"];
    head.extend(["chiring", "etaring", "mu_check", "y_l1", "y_max", "z_l1", "z_max", "l_kappa_l1", "l_kappa_max"]);
    head.extend(["l_that_l1", "l_that_max", "m_prime_min", "m_prime_max", "l_mu_min", "t_wbar_max", "lbar_wbar_max"]);
    w.write_record(&head)?;
    for s in &r.windows {
        let mut row = vec![s.t, s.band_cells as f64, s.kappa_over_t, s.that1_plus_1, s.that2, s.chi, s.zeta, s.eta, s.yring];
        row.extend([s.zring, s.chiring, s.etaring, s.mu_check]);
        for n in [s.y_residual, s.z_residual, s.l_kappa_residual, s.l_that_residual] {
            row.extend([n.l1, n.max]);
        }
        row.extend([s.m_prime.0, s.m_prime.1, s.signs.l_mu.0, s.signs.t_wbar.1, s.signs.lbar_wbar.1]);
        let mut rec: Vec<String> = row.iter().map(|x| format!("{x:e}")).collect();
        rec[1] = s.band_cells.to_string();
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn run_member(label: &str, cfg: &RunConfig, root: &Path) -> RunRecord {
    let hash = config_hash(cfg);
    let dir = root.join(format!("{label}-{hash}"));
    let mut rec =
        RunRecord { label: label.into(), hash: hash.clone(), dir: dir.clone(), status: RunStatus::Complete, reused: false, error: None, result: None };
    if let Some(res) = read_complete(&dir, &hash) {
        rec.reused = true;
        rec.result = Some(res);
        return rec;
    }
    let attempt = || -> Result<RunResult> {
        fs::create_dir_all(&dir)?;
        write_manifest(&dir, &Manifest { status: RunStatus::Running, label: label.into(), hash: hash.clone(), error: None })?;
        fs::write(dir.join("config.json"), serde_json::to_vec_pretty(cfg)?)?;
        let res = execute(cfg, Some(&dir))?;
        fs::write(dir.join("result.json"), serde_json::to_vec_pretty(&res)?)?;
        res.energy.write_csv(fs::File::create(dir.join("energy.csv"))?)?;
        write_windows_csv(&res, fs::File::create(dir.join("windows.csv"))?)?;
        write_manifest(&dir, &Manifest { status: RunStatus::Complete, label: label.into(), hash: hash.clone(), error: None })?;
        Ok(res)
    };
    match attempt() {
        Ok(res) => rec.result = Some(res),
        Err(e) => {
            rec.status = RunStatus::Failed;
            rec.error = Some(e.to_string());
            // The directory may not exist if creating it was what failed.
            let _ = write_manifest(&dir, &Manifest { status: RunStatus::Failed, label: label.into(), hash, error: rec.error.clone() });
        }
    }
    rec
}

/// Output root of a study: the configured output directory or `study-out`.
pub fn study_root(base: &RunConfig) -> PathBuf {
    base.output.clone().unwrap_or_else(|| PathBuf::from("study-out"))
}

/// Executes the members, at most `workers` at a time, then compares them.
/// Writes `report.json`, `runs.csv` and `checks.csv` to the study root.
pub fn run_study(spec: &StudySpec, base: &RunConfig) -> Result<StudyReport> {
    let members = spec.members(base)?;
    let root = study_root(base);
    fs::create_dir_all(&root)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let runs: Vec<RunRecord> = pool.install(|| members.par_iter().map(|(label, cfg)| run_member(label, cfg, &root)).collect());

    let mut report = StudyReport { kind: spec.kind, out: root.clone(), runs, checks: Vec::new(), fits: Vec::new() };
    compare(&mut report);
    fs::write(root.join("report.json"), serde_json::to_vec_pretty(&report)?)?;
    write_runs_csv(&report, fs::File::create(root.join("runs.csv"))?)?;
    write_checks_csv(&report.checks, fs::File::create(root.join("checks.csv"))?)?;
    Ok(report)
}

fn compare(report: &mut StudyReport) {
    let done: Vec<(&RunRecord, &RunResult)> = report.results().collect();
    let mut checks = Vec::new();
    let mut fits = Vec::new();
    for (rec, res) in &done {
        checks.extend(run_checks(res).into_iter().map(|c| c.prefixed(&rec.label)));
        fits.extend(time_slopes(res).1.into_iter().map(|mut f| {
            f.name = format!("{}: {}", rec.label, f.name);
            f
        }));
    }
    match report.kind {
        StudyKind::Single => {}
        StudyKind::Convergence => {
            let mut by_n: Vec<&RunResult> = done.iter().map(|d| d.1).collect();
            by_n.sort_by_key(|r| r.config.n1);
            for p in by_n.windows(2) {
                let tag = format!("{} vs {}", p[0].config.n1, p[1].config.n1);
                checks.extend(convergence_checks(p[0], p[1]).into_iter().map(|c| c.prefixed(&tag)));
            }
            let dx: Vec<f64> = by_n.iter().map(|r| dx1(r)).collect();
            let fan: Vec<f64> = by_n.iter().map(|r| r.fan_l1_error).collect();
            fits.extend(fit_loglog("fan L1 error vs dx", &dx, &fan));
            if let Some(finest) = by_n.last() {
                for (name, pick) in RESIDUALS {
                    let v: Vec<f64> = by_n.iter().map(|r| summed_residual(r, finest, pick)).collect();
                    fits.extend(fit_loglog(format!("{name} vs dx"), &dx, &v));
                }
            }
        }
        StudyKind::EpsilonScaling => {
            let mut by_e: Vec<&RunResult> = done.iter().map(|d| d.1).filter(|r| r.config.epsilon > 0.0).collect();
            by_e.sort_by(|a, b| b.config.epsilon.total_cmp(&a.config.epsilon));
            for p in by_e.windows(2) {
                let tag = format!("eps {} vs {}", p[0].config.epsilon, p[1].config.epsilon);
                checks.extend(epsilon_checks(p[0], p[1]).into_iter().map(|c| c.prefixed(&tag)));
            }
            let eps: Vec<f64> = by_e.iter().map(|r| r.config.epsilon).collect();
            let series = |f: fn(&RunResult) -> Vec<(String, f64)>| -> Vec<(String, Vec<f64>)> {
                let per: Vec<Vec<(String, f64)>> = by_e.iter().map(|r| f(r)).collect();
                per.first()
                    .map(|first| first.iter().enumerate().map(|(k, (n, _))| (n.clone(), per.iter().map(|q| q[k].1).collect())).collect())
                    .unwrap_or_default()
            };
            for (name, v) in series(quadratic_quantities).into_iter().chain(series(linear_quantities)) {
                fits.extend(fit_loglog(format!("{name} vs eps"), &eps, &v));
            }
        }
        StudyKind::DeltaRobustness => {
            let m: Vec<f64> = done.iter().map(|d| bootstrap_constant(d.1)).collect();
            let (lo, hi) = m.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
            checks.push(Check::at_most("spread of max (E + F) / (eps^2 t^2) across delta", hi / lo, 4.0));
            let delta: Vec<f64> = done.iter().map(|d| d.1.config.delta).collect();
            fits.extend(fit_loglog("bootstrap constant vs delta", &delta, &m));
        }
    }
    report.checks = checks;
    report.fits = fits;
}

fn dx1(r: &RunResult) -> f64 {
    (r.config.x1_max - r.config.x1_min) / r.config.n1 as f64
}

fn write_runs_csv<W: Write>(report: &StudyReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "hash", "status", "reused", "steps", "seconds", "fan_l1_error", "x2_variation", "mass_change", "error"])?;
    for r in &report.runs {
        let status = match r.status {
            RunStatus::Running => "running",
            RunStatus::Complete => "complete",
            RunStatus::Failed => "failed",
        };
        let (steps, secs, fan, x2, mass) = r.result.as_ref().map_or(Default::default(), |x| {
            (x.steps.to_string(), format!("{:.3}", x.seconds), format!("{:e}", x.fan_l1_error), format!("{:e}", x.x2_variation), format!("{:e}", x.mass_change))
        });
        w.write_record([r.label.clone(), r.hash.clone(), status.into(), r.reused.to_string(), steps, secs, fan, x2, mass, r.error.clone().unwrap_or_default()])?;
    }
    w.flush()?;
    Ok(())
}

fn write_checks_csv<W: Write>(checks: &[Check], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "value", "lo", "hi", "pass"])?;
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:e}"));
    for c in checks {
        w.write_record([c.name.clone(), format!("{:e}", c.value), opt(c.lo), opt(c.hi), c.pass.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Whitespace-separated columns under a `#` header.
fn write_dat(path: &Path, header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> Result<PathBuf> {
    let mut s = format!("# {header}\n");
    for r in rows {
        let cols: Vec<String> = r.iter().map(|x| format!("{x:e}")).collect();
        s += &cols.join(" ");
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(path.to_path_buf())
}

fn norm_tag(psi: Invariant, norm: Norm, order: usize) -> String {
    match norm {
        Norm::Order => format!("{}_{order}", psi.name()),
        Norm::Ring => format!("{}_ring{order}", psi.name()),
    }
}

fn emit_run(dir: &Path, r: &RunResult) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let times = r.energy.times();
    let (Some(&t_end), Some(&u_top)) = (times.last(), r.energy.levels.last()) else { return Ok(files) };
    let mut keys: Vec<(Invariant, Norm, usize)> = r.energy.rows.iter().map(|x| (x.psi, x.norm, x.order)).collect();
    keys.sort_by_key(|k| norm_tag(k.0, k.1, k.2));
    keys.dedup();
    for (psi, norm, order) in keys {
        let tag = norm_tag(psi, norm, order);
        let e = times.iter().filter_map(|&t| {
            let v = energy_at(r, psi, norm, order, t, u_top)?;
            (v > 0.0).then(|| vec![t.ln(), v.ln()])
        });
        files.push(write_dat(&dir.join(format!("energy_{tag}.dat")), &format!("log t, log E at u = {u_top}"), e)?);
        let f = r.energy.levels.iter().filter_map(|&u| r.energy.find(psi, norm, order, t_end, u).map(|x| vec![u, x.flux()]));
        files.push(write_dat(&dir.join(format!("flux_{tag}.dat")), &format!("u, F at t = {t_end}"), f)?);
    }
    let w = &r.windows;
    files.push(write_dat(&dir.join("kappa_over_t.dat"), "t, max |kappa/t - 1|", w.iter().map(|s| vec![s.t, s.kappa_over_t]))?);
    files.push(write_dat(
        &dir.join("signs.dat"),
        "t, min L mu, max Tring wbar, max Lbar_ring wbar",
        w.iter().map(|s| vec![s.t, s.signs.l_mu.0, s.signs.t_wbar.1, s.signs.lbar_wbar.1]),
    )?);
    files.push(write_dat(
        &dir.join("residuals.dat"),
        "t, L1 of y, z, L kappa, L that residuals, then their max norms",
        w.iter().map(|s| {
            let n = [s.y_residual, s.z_residual, s.l_kappa_residual, s.l_that_residual];
            let mut row = vec![s.t];
            row.extend(n.iter().map(|x| x.l1));
            row.extend(n.iter().map(|x| x.max));
            row
        }),
    )?);
    files.push(write_dat(
        &dir.join("geometry.dat"),
        "t, max |that1 + 1|, |that2|, |chi|, |zeta|, |eta|, |yring|, |zring|",
        w.iter().map(|s| vec![s.t, s.that1_plus_1, s.that2, s.chi, s.zeta, s.eta, s.yring, s.zring]),
    )?);
    Ok(files)
}

/// Writes gnuplot-ready two-column data per run and, for scaling studies,
/// the quantities against the ladder parameter plus `slopes.csv`. Returns
/// the files written; an empty report writes none.
pub fn emit_plots(report: &StudyReport) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    if report.runs.is_empty() {
        return Ok(files);
    }
    for (rec, res) in report.results() {
        files.extend(emit_run(&rec.dir, res)?);
    }
    let done: Vec<&RunResult> = report.results().map(|x| x.1).collect();
    let root = &report.out;
    fs::create_dir_all(root)?;
    match report.kind {
        StudyKind::Convergence if !done.is_empty() => {
            let mut by_n = done.clone();
            by_n.sort_by_key(|r| r.config.n1);
            let finest = by_n[by_n.len() - 1];
            files.push(write_dat(&root.join("fan_error_vs_dx.dat"), "dx1, fan L1 error", by_n.iter().map(|r| vec![dx1(r), r.fan_l1_error]))?);
            files.push(write_dat(
                &root.join("residual_vs_dx.dat"),
                "dx1, time-summed L1 of y, z, L kappa, L that residuals",
                by_n.iter().map(|r| {
                    let mut row = vec![dx1(r)];
                    row.extend(RESIDUALS.iter().map(|(_, p)| summed_residual(r, finest, *p)));
                    row
                }),
            )?);
        }
        StudyKind::EpsilonScaling => {
            let mut by_e = done.clone();
            by_e.sort_by(|a, b| a.config.epsilon.total_cmp(&b.config.epsilon));
            files.push(write_dat(
                &root.join("scaling_vs_epsilon.dat"),
                "eps, max |that1 + 1|, E0(w), E0(psi2), ring E0(wbar), E1(w), E1(wbar), E1(psi2), max |that2|, max |yring|",
                by_e.iter().map(|r| {
                    let mut row = vec![r.config.epsilon];
                    row.extend(quadratic_quantities(r).into_iter().chain(linear_quantities(r)).map(|q| q.1));
                    row
                }),
            )?);
        }
        StudyKind::DeltaRobustness => {
            let mut by_d = done.clone();
            by_d.sort_by(|a, b| a.config.delta.total_cmp(&b.config.delta));
            files.push(write_dat(
                &root.join("bootstrap_vs_delta.dat"),
                "delta, max (E + F) / (eps^2 t^2)",
                by_d.iter().map(|r| vec![r.config.delta, bootstrap_constant(r)]),
            )?);
        }
        _ => {}
    }
    if !report.fits.is_empty() {
        let path = root.join("slopes.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["name", "slope", "intercept", "r2", "n"])?;
        for f in &report.fits {
            w.write_record([f.name.clone(), format!("{:e}", f.slope), format!("{:e}", f.intercept), format!("{:e}", f.r2), f.n.to_string()])?;
        }
        w.flush()?;
        files.push(path);
    }
    Ok(files)
}
