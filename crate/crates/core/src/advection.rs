//! Leapfrog solver for `u_t + c u_x = f(t) δ(x - x_s)` on a periodic grid,
//! with a selectable spatial derivative, plus the dispersion relations of the
//! derivative operators and a parasitic-energy metric.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::grid::{RealSeries, UniformGrid};
use crate::operator::{CsitParams, DerivativeOperator};
use crate::special::{shi, sinc_kernel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Fd,
    Pseudospectral,
    Csit,
}

/// How the CSIT derivative is evaluated inside the time loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsitMode {
    #[default]
    Quadrature,
    Symbol,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvectionConfig {
    /// Velocity (m/s).
    pub c: f64,
    /// Domain length (m); the grid spans `[0, length)`.
    pub length: f64,
    /// Source position (m).
    pub x_s: f64,
    /// Source peak frequency (Hz).
    pub f0: f64,
    pub n_x: usize,
    pub cfl: f64,
    pub n_t: usize,
    pub scheme: Scheme,
    /// Lengths in metres; used when `scheme` is `csit`.
    pub csit: CsitParams,
    #[serde(default)]
    pub csit_mode: CsitMode,
}

impl AdvectionConfig {
    /// The reference setup: c = 900 m/s, L = 10 km, source at 5 km, 1 Hz,
    /// 500 nodes, Courant number 0.25, `H = 0.0005Δx`, `Z = 0.1Δx`, run until
    /// the pulse has travelled `0.3 L` past the source delay.
    pub fn reference(scheme: Scheme) -> Self {
        let (c, length, n_x, f0) = (900.0, 10_000.0, 500, 1.0);
        let dx = length / n_x as f64;
        let csit = CsitParams::new(0.0005 * dx, 0.1 * dx, 4, 8).expect("reference CSIT parameters are valid");
        let mut cfg = Self {
            c,
            length,
            x_s: 5000.0,
            f0,
            n_x,
            cfl: 0.25,
            n_t: 0,
            scheme,
            csit,
            csit_mode: CsitMode::Quadrature,
        };
        cfg.n_t = cfg.steps_for(SourceTimeFunction::new(f0).t_delay + 0.3 * length / c);
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        positive("c", self.c)?;
        positive("length", self.length)?;
        positive("f0", self.f0)?;
        positive("cfl", self.cfl)?;
        if !(self.x_s > 0.0 && self.x_s < self.length) {
            return Err(Error::param(format!(
                "source position {} must lie inside (0, {})",
                self.x_s, self.length
            )));
        }
        if self.n_x < 16 {
            return Err(Error::param(format!("n_x must be at least 16, got {}", self.n_x)));
        }
        self.operator().check(&self.grid()?)
    }

    pub fn grid(&self) -> Result<UniformGrid> {
        UniformGrid::new(0.0, self.length, self.n_x)
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n_x as f64
    }

    pub fn dt(&self) -> f64 {
        self.cfl * self.dx() / self.c
    }

    /// Number of steps needed to reach time `t`.
    pub fn steps_for(&self, t: f64) -> usize {
        (t / self.dt() - 1e-9).ceil().max(0.0) as usize
    }

    pub fn duration(&self) -> f64 {
        self.n_t as f64 * self.dt()
    }

    pub fn operator(&self) -> DerivativeOperator {
        match (self.scheme, self.csit_mode) {
            (Scheme::Fd, _) => DerivativeOperator::CenteredFd,
            (Scheme::Pseudospectral, _) => DerivativeOperator::Pseudospectral,
            (Scheme::Csit, CsitMode::Quadrature) => DerivativeOperator::CsitQuadrature { params: self.csit },
            (Scheme::Csit, CsitMode::Symbol) => DerivativeOperator::CsitSymbol {
                h: self.csit.h,
                z: self.csit.z,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Ricker,
    GaussianDerivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceTimeFunction {
    pub kind: SourceKind,
    /// Peak frequency (Hz).
    pub f0: f64,
    /// Delay of the pulse centre (s).
    pub t_delay: f64,
    #[serde(default = "unit")]
    pub amplitude: f64,
}

fn unit() -> f64 {
    1.0
}

impl SourceTimeFunction {
    /// First derivative of a Gaussian, delayed by `1.2/f0`.
    pub fn new(f0: f64) -> Self {
        Self {
            kind: SourceKind::GaussianDerivative,
            f0,
            t_delay: 1.2 / f0,
            amplitude: 1.0,
        }
    }

    pub fn silent(f0: f64) -> Self {
        Self {
            amplitude: 0.0,
            ..Self::new(f0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f0 > 0.0 && self.f0.is_finite()) {
            return Err(Error::param(format!("source f0 must be > 0, got {}", self.f0)));
        }
        if !(self.t_delay >= 0.0 && self.t_delay.is_finite()) {
            return Err(Error::param(format!("source delay must be >= 0, got {}", self.t_delay)));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::param("source amplitude must be finite"));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let a = (PI * self.f0).powi(2);
        let s = t - self.t_delay;
        let g = (-a * s * s).exp();
        let shape = match self.kind {
            SourceKind::Ricker => (1.0 - 2.0 * a * s * s) * g,
            SourceKind::GaussianDerivative => -2.0 * a * s * g,
        };
        self.amplitude * shape
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavefieldSnapshot {
    pub t: f64,
    pub u: RealSeries,
}

/// Runs from a zero field.
pub fn run_advection(
    cfg: &AdvectionConfig,
    src: &SourceTimeFunction,
    snapshot_times: &[f64],
) -> Result<Vec<WavefieldSnapshot>> {
    let u0 = RealSeries::zeros(cfg.grid()?);
    run_advection_from(cfg, &u0, src, snapshot_times)
}

/// Runs from the initial field `u0`. Snapshots are taken at the time step
/// nearest each requested time, which must not exceed the configured
/// duration.
pub fn run_advection_from(
    cfg: &AdvectionConfig,
    u0: &RealSeries,
    src: &SourceTimeFunction,
    snapshot_times: &[f64],
) -> Result<Vec<WavefieldSnapshot>> {
    cfg.validate()?;
    src.validate()?;
    let grid = cfg.grid()?;
    if *u0.grid() != grid {
        return Err(Error::InvalidGrid("initial field is not on the configured grid".into()));
    }
    let dt = cfg.dt();
    let mut wanted: Vec<(usize, usize)> = Vec::with_capacity(snapshot_times.len());
    for (i, &t) in snapshot_times.iter().enumerate() {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::param(format!("snapshot time {t} must be finite and >= 0")));
        }
        let step = (t / dt).round() as usize;
        if step > cfg.n_t {
            return Err(Error::param(format!(
                "snapshot time {t} s is past the end of the run ({} s)",
                cfg.duration()
            )));
        }
        wanted.push((step, i));
    }
    wanted.sort_unstable();

    let op = cfg.operator();
    let source_node = grid.nearest_node(cfg.x_s);
    let inv_dx = 1.0 / grid.spacing();
    let rhs = |u: &RealSeries, t: f64| -> Result<Vec<f64>> {
        let mut r = op.apply(u)?.into_values();
        for v in r.iter_mut() {
            *v *= -cfg.c;
        }
        r[source_node] += src.eval(t) * inv_dx;
        Ok(r)
    };

    let mut out: Vec<Option<WavefieldSnapshot>> = vec![None; snapshot_times.len()];
    let mut next = 0;
    let mut take = |step: usize, u: &RealSeries, out: &mut Vec<Option<WavefieldSnapshot>>| {
        while next < wanted.len() && wanted[next].0 == step {
            out[wanted[next].1] = Some(WavefieldSnapshot {
                t: step as f64 * dt,
                u: u.clone(),
            });
            next += 1;
        }
    };

    let mut prev = u0.clone();
    take(0, &prev, &mut out);
    if cfg.n_t == 0 {
        return Ok(out.into_iter().map(|s| s.expect("all snapshots taken")).collect());
    }
    let r0 = rhs(&prev, 0.0)?;
    let first: Vec<f64> = prev.values().iter().zip(&r0).map(|(u, r)| u + dt * r).collect();
    let mut curr = advance(&grid, first, &prev, dt, dt)?;
    take(1, &curr, &mut out);
    for step in 1..cfg.n_t {
        let t = step as f64 * dt;
        let r = rhs(&curr, t)?;
        let new: Vec<f64> = prev.values().iter().zip(&r).map(|(u, r)| u + 2.0 * dt * r).collect();
        let next_field = advance(&grid, new, &curr, t + dt, dt)?;
        prev = std::mem::replace(&mut curr, next_field);
        take(step + 1, &curr, &mut out);
    }
    Ok(out.into_iter().map(|s| s.expect("all snapshots taken")).collect())
}

/// Wraps the new level, reporting divergence with the last finite field.
fn advance(grid: &UniformGrid, values: Vec<f64>, last: &RealSeries, t: f64, dt: f64) -> Result<RealSeries> {
    if values.iter().all(|v| v.is_finite()) {
        RealSeries::new(*grid, values)
    } else {
        Err(Error::Diverged {
            t,
            last_finite: Box::new(WavefieldSnapshot {
                t: t - dt,
                u: last.clone(),
            }),
        })
    }
}

/// `sin(πr)` with exact zeros at integer `r` (within a few ulps).
fn sin_pi(r: f64) -> f64 {
    let nearest = r.round();
    if (r - nearest).abs() <= 4.0 * f64::EPSILON * r.abs().max(1.0) {
        return 0.0;
    }
    (PI * r).sin()
}

/// `ω = (c/Δx) sin(kΔx)` for centered differences.
pub fn dispersion_fd(k: f64, c: f64, dx: f64) -> f64 {
    c / dx * sin_pi(k * dx / PI)
}

/// `ω = c · Shi(kZ)/Z · sinc(kH)`.
pub fn dispersion_csit(k: f64, c: f64, h: f64, z: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    c * shi(k * z) / z * sinc_kernel(k * h)
}

/// `ω = c k` on `|kΔx| < π`, the exact pseudospectral relation.
pub fn dispersion_pseudospectral(k: f64, c: f64) -> f64 {
    c * k
}

/// Whether `x` lies in the periodic window `[lo, hi]` of a domain of
/// length `length`.
fn in_window(x: f64, (lo, hi): (f64, f64), length: f64) -> bool {
    if hi - lo >= length {
        return true;
    }
    (x - lo).rem_euclid(length) <= hi - lo
}

/// Energy outside `window` over energy inside. Windows may extend past the
/// domain ends and wrap periodically.
pub fn parasitic_energy(snap: &WavefieldSnapshot, window: (f64, f64)) -> Result<f64> {
    let grid = snap.u.grid();
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::param(format!("window ({lo}, {hi}) must be finite with hi > lo")));
    }
    let (mut inside, mut outside) = (0.0, 0.0);
    for (x, u) in grid.coords().into_iter().zip(snap.u.values()) {
        if in_window(x, window, grid.length()) {
            inside += u * u;
        } else {
            outside += u * u;
        }
    }
    if inside + outside == 0.0 {
        return Ok(0.0);
    }
    Ok(outside / inside)
}

/// Energy centroid `Σ x u² / Σ u²` over the periodic window
/// `guess ± half_width`, with coordinates unwrapped around `guess`.
pub fn pulse_centroid(snap: &WavefieldSnapshot, guess: f64, half_width: f64) -> Option<f64> {
    let grid = snap.u.grid();
    let length = grid.length();
    let (mut num, mut den) = (0.0, 0.0);
    for (x, u) in grid.coords().into_iter().zip(snap.u.values()) {
        let offset = (x - guess + 0.5 * length).rem_euclid(length) - 0.5 * length;
        if offset.abs() <= half_width {
            num += offset * u * u;
            den += u * u;
        }
    }
    (den > 0.0).then(|| guess + num / den)
}

/// Dominant wavelength `c / f0` of the injected pulse.
pub fn wavelength(cfg: &AdvectionConfig) -> f64 {
    cfg.c / cfg.f0
}
