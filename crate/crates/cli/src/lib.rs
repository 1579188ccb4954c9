//! Command implementations behind the `csit` binary.
//!
//! Every subcommand resolves its flags into a [`Job`], runs it, and writes a
//! [`RunManifest`] next to its outputs. A manifest can be replayed to
//! regenerate the same files.

pub mod io;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use csit_core::advection::{
    dispersion_fd, parasitic_energy, pulse_centroid, run_advection, wavelength, AdvectionConfig, SourceTimeFunction,
    WavefieldSnapshot,
};
use csit_core::closed_forms::{verify_closed_forms, ClosedFormConfig, ClosedFormReport, Reference};
use csit_core::grid::{RealSeries, UniformGrid};
use csit_core::ifreq::{
    analytic_signal, chirp, chirp_frequency, chirp_trace, if_classical, if_csit, if_damped, interior_mask,
    AnalyticTrace, DerivativeBackend, IfParams,
};
use csit_core::operator::{
    csit_quadrature, csit_spectral, csit_symbol, fd_centered, pseudospectral_derivative, CsitParams,
};

use crate::io::{fmt_bool, fmt_f64, read_series, write_atomic, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("input: {0}")]
    Input(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("{0}")]
    Numerical(csit_core::Error),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub(crate) fn io(e: impl std::fmt::Display) -> Self {
        CliError::Io(e.to_string())
    }

    /// 0 success, 1 failed check, 2 usage, 3 input data or I/O, 4 divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Input(_) | CliError::Io(_) => 3,
            CliError::Numerical(csit_core::Error::Diverged { .. }) => 4,
            CliError::Numerical(csit_core::Error::InvalidParameter(_))
            | CliError::Numerical(csit_core::Error::ContinuationOverflow { .. }) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<csit_core::Error> for CliError {
    fn from(e: csit_core::Error) -> Self {
        CliError::Numerical(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformMode {
    #[default]
    Quadrature,
    Symbol,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformJob {
    pub input: PathBuf,
    pub params: CsitParams,
    pub mode: TransformMode,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticDemo {
    pub n: usize,
    pub k: f64,
    pub t0: f64,
}

impl Default for LogisticDemo {
    fn default() -> Self {
        Self {
            n: 500,
            k: 100.0,
            t0: 0.5,
        }
    }
}

impl LogisticDemo {
    pub fn grid(&self) -> Result<UniformGrid, CliError> {
        Ok(UniformGrid::new(0.0, 1.0, self.n)?)
    }

    pub fn value(&self, t: f64) -> f64 {
        1.0 / (1.0 + (-self.k * (t - self.t0)).exp())
    }

    /// `k / (e^{s/2} + e^{-s/2})²` with `s = k(t - t0)`, free of overflow.
    pub fn derivative(&self, t: f64) -> f64 {
        let h = 0.5 * self.k * (t - self.t0);
        let d = h.exp() + (-h).exp();
        self.k / (d * d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeriveSource {
    Logistic(LogisticDemo),
    Input(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeriveJob {
    pub source: DeriveSource,
    pub params: CsitParams,
    /// Nodes excluded at each edge from the interior mask.
    pub edge: usize,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvectJob {
    pub config: AdvectionConfig,
    pub source: SourceTimeFunction,
    pub snapshots: Vec<f64>,
    /// Half-width of the pulse window in wavelengths.
    pub window_wavelengths: f64,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    /// `sin²(π t / T)` over the window.
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpDemo {
    pub n: usize,
    pub f0: f64,
    pub kc: f64,
    pub envelope: Option<Envelope>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IfreqSource {
    Chirp(ChirpDemo),
    Input(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfreqJob {
    pub source: IfreqSource,
    pub params: IfParams,
    pub backend: DerivativeBackend,
    /// Damping as a fraction of the peak amplitude.
    pub damping: f64,
    pub trim_fraction: f64,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub kmax: f64,
    pub samples: usize,
    pub h: f64,
    pub z: f64,
    pub dx: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolJob {
    pub spec: SymbolSpec,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormsJob {
    pub config: ClosedFormConfig,
    pub output: PathBuf,
}

/// A fully resolved subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Job {
    Transform(TransformJob),
    Derive(DeriveJob),
    Advect(AdvectJob),
    Ifreq(IfreqJob),
    Symbol(SymbolJob),
    ClosedForms(ClosedFormsJob),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub job: Job,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

/// What a finished job produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub summary: String,
    /// `Some(message)` when a built-in check failed.
    pub failure: Option<String>,
}

fn redirect(path: &Path, dir: &Path) -> PathBuf {
    dir.join(path.file_name().unwrap_or(path.as_os_str()))
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Transform(_) => "transform",
            Job::Derive(_) => "derive",
            Job::Advect(_) => "advect",
            Job::Ifreq(_) => "ifreq",
            Job::Symbol(_) => "symbol",
            Job::ClosedForms(_) => "closed-forms",
        }
    }

    pub fn inputs(&self) -> Vec<PathBuf> {
        match self {
            Job::Transform(j) => vec![j.input.clone()],
            Job::Derive(DeriveJob {
                source: DeriveSource::Input(p),
                ..
            })
            | Job::Ifreq(IfreqJob {
                source: IfreqSource::Input(p),
                ..
            }) => vec![p.clone()],
            _ => Vec::new(),
        }
    }

    /// Where the manifest goes.
    pub fn manifest_path(&self) -> PathBuf {
        match self {
            Job::Advect(j) => j.output_dir.join("manifest.json"),
            Job::Transform(TransformJob { output, .. })
            | Job::Derive(DeriveJob { output, .. })
            | Job::Ifreq(IfreqJob { output, .. })
            | Job::Symbol(SymbolJob { output, .. })
            | Job::ClosedForms(ClosedFormsJob { output, .. }) => {
                let mut name = output.file_name().unwrap_or_default().to_os_string();
                name.push(".manifest.json");
                output.with_file_name(name)
            }
        }
    }

    /// Moves every output into `dir`, keeping file names.
    pub fn redirect_outputs(&mut self, dir: &Path) {
        match self {
            Job::Advect(j) => j.output_dir = dir.to_path_buf(),
            Job::Transform(TransformJob { output, .. })
            | Job::Derive(DeriveJob { output, .. })
            | Job::Ifreq(IfreqJob { output, .. })
            | Job::Symbol(SymbolJob { output, .. })
            | Job::ClosedForms(ClosedFormsJob { output, .. }) => *output = redirect(output, dir),
        }
    }

    pub fn run(&self) -> Result<Outcome, CliError> {
        match self {
            Job::Transform(j) => run_transform(j),
            Job::Derive(j) => run_derive(j),
            Job::Advect(j) => run_advect(j),
            Job::Ifreq(j) => run_ifreq(j),
            Job::Symbol(j) => run_symbol(j),
            Job::ClosedForms(j) => run_closed_forms(j),
        }
    }
}

/// Runs `job`, then writes its manifest. A failed built-in check still
/// leaves outputs and manifest behind before the error is returned.
pub fn execute(job: Job) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let outcome = job.run()?;
    let manifest = RunManifest {
        tool: "csit".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        inputs: job.inputs(),
        outputs: outcome.outputs.clone(),
        duration_seconds: start.elapsed().as_secs_f64(),
        job: job.clone(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(CliError::io)? + "\n";
    write_atomic(&job.manifest_path(), text.as_bytes())?;
    if let Some(msg) = &outcome.failure {
        return Err(CliError::CheckFailed(msg.clone()));
    }
    Ok(outcome)
}

/// Re-runs a manifest, optionally writing into another directory.
pub fn replay(manifest: &Path, output_dir: Option<&Path>) -> Result<Outcome, CliError> {
    let mut job = RunManifest::load(manifest)?.job;
    if let Some(dir) = output_dir {
        job.redirect_outputs(dir);
    }
    execute(job)
}

fn write_table(path: &Path, table: &Table) -> Result<(), CliError> {
    write_atomic(path, &table.to_bytes()?)
}

fn run_transform(job: &TransformJob) -> Result<Outcome, CliError> {
    let s = read_series(&job.input)?;
    let out = match job.mode {
        TransformMode::Quadrature => csit_quadrature(&s, &job.params)?,
        TransformMode::Symbol => csit_spectral(&s, job.params.h, job.params.z)?,
    };
    let mut table = Table::new(vec!["x", "input", "csit_output"]);
    for ((x, v), o) in s.grid().coords().iter().zip(s.values()).zip(out.values()) {
        table.push(vec![fmt_f64(*x), fmt_f64(*v), fmt_f64(*o)]);
    }
    write_table(&job.output, &table)?;
    Ok(Outcome {
        outputs: vec![job.output.clone()],
        summary: format!("transformed {} samples ({:?} mode)", s.grid().len(), job.mode),
        failure: None,
    })
}

/// Derivatives of one series by every operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DeriveTable {
    pub grid: UniformGrid,
    pub f: Vec<f64>,
    pub fd: Vec<f64>,
    pub pseudospectral: Vec<f64>,
    pub csit: Vec<f64>,
    pub analytic: Option<Vec<f64>>,
    pub interior: Vec<bool>,
}

impl DeriveTable {
    /// `|d - exact| / |exact|` per node, when the exact derivative is known.
    pub fn relative_errors(&self, column: &[f64]) -> Option<Vec<f64>> {
        self.analytic
            .as_ref()
            .map(|a| column.iter().zip(a).map(|(d, e)| (d - e).abs() / e.abs()).collect())
    }
}

pub fn derive_table(job: &DeriveJob) -> Result<DeriveTable, CliError> {
    let (s, analytic) = match &job.source {
        DeriveSource::Logistic(demo) => {
            let grid = demo.grid()?;
            let s = RealSeries::from_fn(grid, |t| demo.value(t))?;
            let exact = grid.coords().iter().map(|&t| demo.derivative(t)).collect();
            (s, Some(exact))
        }
        DeriveSource::Input(path) => (read_series(path)?, None),
    };
    let n = s.grid().len();
    if n < 2 * job.edge + 1 {
        return Err(CliError::Usage(format!(
            "edge {} leaves no interior in {n} samples",
            job.edge
        )));
    }
    Ok(DeriveTable {
        grid: *s.grid(),
        fd: fd_centered(&s)?.into_values(),
        pseudospectral: pseudospectral_derivative(&s).into_values(),
        csit: csit_quadrature(&s, &job.params)?.into_values(),
        f: s.into_values(),
        analytic,
        interior: (0..n).map(|j| j >= job.edge && j < n - job.edge).collect(),
    })
}

fn run_derive(job: &DeriveJob) -> Result<Outcome, CliError> {
    let t = derive_table(job)?;
    let mut table = Table::new(vec![
        "t",
        "f",
        "fd",
        "pseudospectral",
        "csit",
        "analytic",
        "rel_fd",
        "rel_pseudospectral",
        "rel_csit",
        "interior",
    ]);
    let missing = vec![f64::NAN; t.f.len()];
    let analytic = t.analytic.clone().unwrap_or_else(|| missing.clone());
    let rel = |c: &[f64]| t.relative_errors(c).unwrap_or_else(|| missing.clone());
    let (rfd, rps, rcs) = (rel(&t.fd), rel(&t.pseudospectral), rel(&t.csit));
    for (j, x) in t.grid.coords().iter().enumerate() {
        table.push(vec![
            fmt_f64(*x),
            fmt_f64(t.f[j]),
            fmt_f64(t.fd[j]),
            fmt_f64(t.pseudospectral[j]),
            fmt_f64(t.csit[j]),
            fmt_f64(analytic[j]),
            fmt_f64(rfd[j]),
            fmt_f64(rps[j]),
            fmt_f64(rcs[j]),
            fmt_bool(t.interior[j]),
        ]);
    }
    write_table(&job.output, &table)?;
    let summary = if t.analytic.is_some() {
        let worst = |r: &[f64]| {
            r.iter()
                .zip(&t.interior)
                .filter(|(_, m)| **m)
                .map(|(v, _)| *v)
                .fold(0.0, f64::max)
        };
        format!(
            "interior max relative error: fd {:.3e}, pseudospectral {:.3e}, csit {:.3e}",
            worst(&rfd),
            worst(&rps),
            worst(&rcs)
        )
    } else {
        format!("differentiated {} samples", t.f.len())
    };
    Ok(Outcome {
        outputs: vec![job.output.clone()],
        summary,
        failure: None,
    })
}

/// Per-snapshot diagnostics of an advection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSummary {
    pub file: String,
    pub t: f64,
    pub centroid: Option<f64>,
    pub window: (f64, f64),
    pub parasitic_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvectSummary {
    pub scheme: String,
    pub dt: f64,
    pub dx: f64,
    pub n_t: usize,
    pub snapshots: Vec<SnapshotSummary>,
    /// Centroid tracking times, one tenth of the way and at the end of the
    /// run.
    pub tracking_times: (f64, f64),
    pub tracking_centroids: (Option<f64>, Option<f64>),
    pub pulse_speed: Option<f64>,
}

/// Expected pulse position `x_s + c (t - t_delay)`, wrapped into the domain.
fn expected_position(cfg: &AdvectionConfig, src: &SourceTimeFunction, t: f64) -> f64 {
    (cfg.x_s + cfg.c * (t - src.t_delay).max(0.0)).rem_euclid(cfg.length)
}

pub fn tracking_times(cfg: &AdvectionConfig, src: &SourceTimeFunction) -> (f64, f64) {
    let end = cfg.duration();
    ((src.t_delay + 0.1 * cfg.length / cfg.c).min(end), end)
}

fn centroid_near(job: &AdvectJob, s: &WavefieldSnapshot) -> Option<f64> {
    let half = job.window_wavelengths * wavelength(&job.config);
    pulse_centroid(s, expected_position(&job.config, &job.source, s.t), half)
}

/// `snaps` are the requested snapshots, `tracking` the pair at
/// [`tracking_times`].
pub fn advect_summary(
    job: &AdvectJob,
    snaps: &[WavefieldSnapshot],
    tracking: (&WavefieldSnapshot, &WavefieldSnapshot),
) -> Result<AdvectSummary, CliError> {
    let cfg = &job.config;
    let half = job.window_wavelengths * wavelength(cfg);
    let mut out = Vec::new();
    for (i, s) in snaps.iter().enumerate() {
        let centroid = centroid_near(job, s);
        let c = centroid.unwrap_or_else(|| expected_position(cfg, &job.source, s.t));
        let window = (c - half, c + half);
        out.push(SnapshotSummary {
            file: snapshot_name(i),
            t: s.t,
            centroid,
            window,
            parasitic_energy: parasitic_energy(s, window)?,
        });
    }
    let (a, b) = tracking;
    let centroids = (centroid_near(job, a), centroid_near(job, b));
    let pulse_speed = match centroids {
        (Some(ca), Some(cb)) if b.t > a.t => Some((cb - ca).rem_euclid(cfg.length) / (b.t - a.t)),
        _ => None,
    };
    Ok(AdvectSummary {
        scheme: format!("{:?}", cfg.scheme).to_lowercase(),
        dt: cfg.dt(),
        dx: cfg.dx(),
        n_t: cfg.n_t,
        snapshots: out,
        tracking_times: (a.t, b.t),
        tracking_centroids: centroids,
        pulse_speed,
    })
}

fn snapshot_name(i: usize) -> String {
    format!("snapshot_{i:03}.csv")
}

fn run_advect(job: &AdvectJob) -> Result<Outcome, CliError> {
    let (t1, t2) = tracking_times(&job.config, &job.source);
    let mut times = job.snapshots.clone();
    times.extend([t1, t2]);
    let mut snaps = run_advection(&job.config, &job.source, &times)?;
    let late = snaps.pop().expect("tracking snapshot");
    let early = snaps.pop().expect("tracking snapshot");
    let mut outputs = Vec::new();
    for (i, s) in snaps.iter().enumerate() {
        let mut table = Table::new(vec!["x", "u"]);
        for (x, u) in s.u.grid().coords().iter().zip(s.u.values()) {
            table.push(vec![fmt_f64(*x), fmt_f64(*u)]);
        }
        let path = job.output_dir.join(snapshot_name(i));
        write_table(&path, &table)?;
        outputs.push(path);
    }
    let summary = advect_summary(job, &snaps, (&early, &late))?;
    let path = job.output_dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).map_err(CliError::io)? + "\n";
    write_atomic(&path, text.as_bytes())?;
    outputs.push(path);
    let last = summary.snapshots.last();
    Ok(Outcome {
        outputs,
        summary: format!(
            "{} steps of {:.6e} s; final parasitic energy {}; pulse speed {}",
            job.config.n_t,
            job.config.dt(),
            last.map(|s| format!("{:.6e}", s.parasitic_energy))
                .unwrap_or_else(|| "n/a".into()),
            summary
                .pulse_speed
                .map(|v| format!("{v:.3} m/s"))
                .unwrap_or_else(|| "n/a".into())
        ),
        failure: None,
    })
}

/// Trace and truth for an instantaneous-frequency job.
pub fn ifreq_trace(source: &IfreqSource) -> Result<(AnalyticTrace, Option<Vec<f64>>), CliError> {
    match source {
        IfreqSource::Chirp(demo) => {
            let grid = UniformGrid::new(0.0, 1.0, demo.n)?;
            let tr = match demo.envelope {
                None => analytic_signal(&chirp(demo.f0, demo.kc, &grid)),
                Some(Envelope::Hann) => {
                    let span = grid.length();
                    chirp_trace(demo.f0, demo.kc, &grid, |t| (PI * t / span).sin().powi(2))?
                }
            };
            let truth = grid
                .coords()
                .iter()
                .map(|&t| chirp_frequency(demo.f0, demo.kc, t))
                .collect();
            Ok((tr, Some(truth)))
        }
        IfreqSource::Input(path) => Ok((analytic_signal(&read_series(path)?), None)),
    }
}

fn run_ifreq(job: &IfreqJob) -> Result<Outcome, CliError> {
    let (tr, truth) = ifreq_trace(&job.source)?;
    let n = tr.grid().len();
    let peak = tr.amplitude().into_iter().fold(0.0, f64::max);
    let classical = if_classical(&tr, job.backend)?;
    let damped = if_damped(&tr, (job.damping * peak).max(f64::MIN_POSITIVE), job.backend)?;
    let csit = if_csit(&tr, &job.params)?;
    let interior = interior_mask(n, job.trim_fraction);
    let mut table = Table::new(vec![
        "t",
        "if_classical",
        "if_damped",
        "if_csit",
        "classical_flagged",
        "csit_flagged",
        "interior",
        "truth",
    ]);
    for (j, t) in tr.grid().coords().iter().enumerate() {
        table.push(vec![
            fmt_f64(*t),
            fmt_f64(classical.hz[j]),
            fmt_f64(damped.hz[j]),
            fmt_f64(csit.hz[j]),
            fmt_bool(classical.flagged[j]),
            fmt_bool(csit.flagged[j]),
            fmt_bool(interior[j]),
            truth.as_ref().map(|v| fmt_f64(v[j])).unwrap_or_default(),
        ]);
    }
    write_table(&job.output, &table)?;
    let summary = match &truth {
        Some(truth) => {
            let worst = |hz: &[f64]| {
                hz.iter()
                    .zip(truth)
                    .zip(&interior)
                    .filter(|(_, m)| **m)
                    .map(|((v, t), _)| (v - t).abs())
                    .fold(0.0, f64::max)
            };
            format!(
                "interior max error: classical {:.4} Hz, damped {:.4} Hz, csit {:.4} Hz; classical flagged {}",
                worst(&classical.hz),
                worst(&damped.hz),
                worst(&csit.hz),
                classical.flagged_count()
            )
        }
        None => format!("{n} samples; classical flagged {}", classical.flagged_count()),
    };
    Ok(Outcome {
        outputs: vec![job.output.clone()],
        summary,
        failure: None,
    })
}

fn run_symbol(job: &SymbolJob) -> Result<Outcome, CliError> {
    let s = job.spec;
    if s.samples < 2 || !(s.kmax > 0.0) || !(s.dx > 0.0) {
        return Err(CliError::Usage("symbol needs samples >= 2, kmax > 0 and dx > 0".into()));
    }
    let mut table = Table::new(vec!["k", "sigma_csit", "sigma_single", "ik", "omega_fd"]);
    for i in 0..s.samples {
        let k = s.kmax * i as f64 / (s.samples - 1) as f64;
        table.push(vec![
            fmt_f64(k),
            fmt_f64(csit_symbol(k, s.h, s.z)?.norm()),
            fmt_f64(csit_symbol(k, 0.0, s.z)?.norm()),
            fmt_f64(k.abs()),
            fmt_f64(dispersion_fd(k, s.c, s.dx)),
        ]);
    }
    write_table(&job.output, &table)?;
    Ok(Outcome {
        outputs: vec![job.output.clone()],
        summary: format!("{} wavenumbers up to {}", s.samples, s.kmax),
        failure: None,
    })
}

pub fn closed_forms_table(report: &ClosedFormReport) -> Table {
    let mut table = Table::new(vec![
        "row",
        "reference",
        "x_min",
        "x_max",
        "points",
        "max_deviation",
        "tolerance",
        "passed",
        "note",
    ]);
    for r in &report.rows {
        table.push(vec![
            r.name.clone(),
            match r.reference {
                Reference::ClosedForm => "closed_form".into(),
                Reference::BruteForce => "brute_force".into(),
            },
            fmt_f64(r.x_min),
            fmt_f64(r.x_max),
            r.points.to_string(),
            fmt_f64(r.max_deviation),
            fmt_f64(r.tolerance),
            fmt_bool(r.passed),
            report.note.clone(),
        ]);
    }
    table
}

fn run_closed_forms(job: &ClosedFormsJob) -> Result<Outcome, CliError> {
    let report = verify_closed_forms(&job.config)?;
    write_table(&job.output, &closed_forms_table(&report))?;
    let lines: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "{:<9} {:>10.3e} (tol {:.0e}) {}",
                r.name,
                r.max_deviation,
                r.tolerance,
                if r.passed { "ok" } else { "FAIL" }
            )
        })
        .collect();
    let failed: Vec<&str> = report
        .rows
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.as_str())
        .collect();
    Ok(Outcome {
        outputs: vec![job.output.clone()],
        summary: format!("{}\nnote: {}", lines.join("\n"), report.note),
        failure: (!failed.is_empty()).then(|| format!("rows out of tolerance: {}", failed.join(", "))),
    })
}
