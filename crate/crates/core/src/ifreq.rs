//! Analytic signals and instantaneous frequency.
//!
//! Three estimators of `(1/2π) dθ/dt` for a trace `x + iy = A e^{iθ}`:
//! the classical ratio `(x y' - y x') / (x² + y²)`, a damped variant with
//! `ε²` added to the denominator, and the complex-step integral transform
//! applied to the phase, which never divides by the amplitude.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuation::{check_exponent, shift_into, ComplexShift};
use crate::grid::{fft_forward, fft_inverse, nyquist_slot, signed_index, RealSeries, UniformGrid};
use crate::operator::{fd_centered, pseudospectral_derivative, CsitParams, ReductionOrder};
use crate::{Complex64, Error, Result};

/// Denominators below this are treated as amplitude zeros.
pub const UNDERFLOW: f64 = 1e-300;

/// `|1 + (B/A)²|` below this marks an arctangent branch point.
pub const BRANCH_TOLERANCE: f64 = 1e-14;

/// A real trace `x` with its quadrature component `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticTrace {
    x: RealSeries,
    y: RealSeries,
}

impl AnalyticTrace {
    /// Pairs two components; they need not form an exact analytic signal
    /// (see [`AnalyticTrace::negative_leakage`]).
    pub fn from_components(x: RealSeries, y: RealSeries) -> Result<Self> {
        if x.grid() != y.grid() {
            return Err(Error::InvalidGrid("trace components live on different grids".into()));
        }
        Ok(Self { x, y })
    }

    pub fn grid(&self) -> &UniformGrid {
        self.x.grid()
    }

    pub fn x(&self) -> &RealSeries {
        &self.x
    }

    pub fn y(&self) -> &RealSeries {
        &self.y
    }

    pub fn amplitude(&self) -> Vec<f64> {
        self.x
            .values()
            .iter()
            .zip(self.y.values())
            .map(|(x, y)| x.hypot(*y))
            .collect()
    }

    pub fn phase(&self) -> Vec<f64> {
        self.x
            .values()
            .iter()
            .zip(self.y.values())
            .map(|(x, y)| y.atan2(*x))
            .collect()
    }

    /// Largest negative-frequency coefficient magnitude of `x + iy`,
    /// relative to the largest coefficient overall.
    pub fn negative_leakage(&self) -> f64 {
        let n = self.grid().len();
        let values: Vec<Complex64> = self
            .x
            .values()
            .iter()
            .zip(self.y.values())
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect();
        let z = crate::grid::ComplexSeries::new(*self.grid(), values).expect("finite components");
        let spectrum = fft_forward(&z);
        let coeffs = spectrum.coeffs();
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        let nyquist = nyquist_slot(n);
        let negative = (0..n)
            .filter(|&j| signed_index(j, n) < 0 && Some(j) != nyquist)
            .map(|j| coeffs[j].norm())
            .fold(0.0, f64::max);
        negative / max
    }
}

/// Doubles positive frequencies, drops negative ones, keeps DC and the
/// Nyquist mode once.
pub fn analytic_signal(x: &RealSeries) -> AnalyticTrace {
    let n = x.grid().len();
    let mut spectrum = fft_forward(x);
    let nyquist = nyquist_slot(n);
    for (j, c) in spectrum.coeffs_mut().iter_mut().enumerate() {
        let s = signed_index(j, n);
        if Some(j) == nyquist || s == 0 {
            continue;
        }
        *c *= if s > 0 { 2.0 } else { 0.0 };
    }
    let z = fft_inverse(&spectrum);
    AnalyticTrace {
        x: x.clone(),
        y: z.im(),
    }
}

/// Time derivative used by the classical estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeBackend {
    #[default]
    Pseudospectral,
    CenteredFd,
}

impl DerivativeBackend {
    fn apply(&self, s: &RealSeries) -> Result<RealSeries> {
        match self {
            DerivativeBackend::Pseudospectral => Ok(pseudospectral_derivative(s)),
            DerivativeBackend::CenteredFd => fd_centered(s),
        }
    }
}

/// Frequencies in Hz with a per-node flag. Flagged nodes of the classical
/// estimator hold NaN; the transform estimator fills them and stays finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyEstimate {
    pub grid: UniformGrid,
    pub hz: Vec<f64>,
    pub flagged: Vec<bool>,
}

impl FrequencyEstimate {
    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|f| **f).count()
    }
}

/// `false` for the `round(fraction·n)` nodes at each edge.
pub fn interior_mask(n: usize, fraction: f64) -> Vec<bool> {
    let trim = ((fraction * n as f64).round() as usize).min(n / 2);
    (0..n).map(|j| j >= trim && j < n - trim).collect()
}

fn phase_rate_terms(tr: &AnalyticTrace, backend: DerivativeBackend) -> Result<Vec<(f64, f64)>> {
    let dx = backend.apply(&tr.x)?;
    let dy = backend.apply(&tr.y)?;
    Ok((0..tr.grid().len())
        .map(|j| {
            let (x, y) = (tr.x.values()[j], tr.y.values()[j]);
            (x * dy.values()[j] - y * dx.values()[j], x * x + y * y)
        })
        .collect())
}

pub fn if_classical(tr: &AnalyticTrace, backend: DerivativeBackend) -> Result<FrequencyEstimate> {
    let terms = phase_rate_terms(tr, backend)?;
    let mut hz = Vec::with_capacity(terms.len());
    let mut flagged = Vec::with_capacity(terms.len());
    for (num, den) in terms {
        if den < UNDERFLOW {
            hz.push(f64::NAN);
            flagged.push(true);
        } else {
            hz.push(num / den / (2.0 * PI));
            flagged.push(false);
        }
    }
    Ok(FrequencyEstimate {
        grid: *tr.grid(),
        hz,
        flagged,
    })
}

pub fn if_damped(tr: &AnalyticTrace, eps_damp: f64, backend: DerivativeBackend) -> Result<FrequencyEstimate> {
    if !(eps_damp > 0.0 && eps_damp.is_finite()) {
        return Err(Error::param(format!("damping must be > 0, got {eps_damp}")));
    }
    let e2 = eps_damp * eps_damp;
    let hz: Vec<f64> = phase_rate_terms(tr, backend)?
        .into_iter()
        .map(|(num, den)| num / (den + e2) / (2.0 * PI))
        .collect();
    Ok(FrequencyEstimate {
        grid: *tr.grid(),
        flagged: vec![false; hz.len()],
        hz,
    })
}

/// How the complex perturbation enters the phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IfVariant {
    /// `x` and `y` evaluated at the complex time `t + η + iτ`.
    #[default]
    SpectralShift,
    /// `η + iτ` added to the sample values.
    PointwiseAdditive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IfParams {
    #[serde(flatten)]
    pub csit: CsitParams,
    #[serde(default)]
    pub variant: IfVariant,
}

impl IfParams {
    /// `H = Z = Δt`, `ε = Δt/100`, four nodes in each direction.
    pub fn for_sampling(dt: f64) -> Result<Self> {
        Ok(Self {
            csit: CsitParams::new(dt, dt, 4, 4)?.with_epsilon(1e-2 * dt)?,
            variant: IfVariant::SpectralShift,
        })
    }
}

/// `Im[arctan(B/A)] = ½ ln(|A - iB| / |A + iB|)`, or `None` near a branch
/// point.
fn im_arctan(a: Complex64, b: Complex64) -> Option<f64> {
    let i = Complex64::i();
    let plus = a + i * b;
    let minus = a - i * b;
    if a.norm() == 0.0 || (plus * minus).norm() < BRANCH_TOLERANCE * a.norm_sqr() {
        return None;
    }
    let v = 0.5 * (minus.norm().ln() - plus.norm().ln());
    v.is_finite().then_some(v)
}

/// Fills `(x, y)` at the shift `(η, τ)`.
type ShiftedPair = dyn Fn(f64, f64, &mut [Complex64], &mut [Complex64]) + Sync;

/// Instantaneous frequency through the transform of the phase.
///
/// Quadrature nodes that hit a branch point take the value of the nearest
/// valid `τ` node at the same `η`; the time node is flagged.
pub fn if_csit(tr: &AnalyticTrace, p: &IfParams) -> Result<FrequencyEstimate> {
    let cp = &p.csit;
    cp.validate()?;
    let grid = *tr.grid();
    let n = grid.len();
    let tau = cp.tau_nodes();

    let evaluate: Box<ShiftedPair> = match p.variant {
        IfVariant::SpectralShift => {
            check_exponent(&grid, cp.z)?;
            let sx = fft_forward(&tr.x);
            let sy = fft_forward(&tr.y);
            let ks = grid.wavenumbers();
            Box::new(move |eta, t, a, b| {
                let shift = ComplexShift::new(eta, t).expect("validated node");
                shift_into(sx.coeffs(), &ks, shift, a);
                shift_into(sy.coeffs(), &ks, shift, b);
            })
        }
        IfVariant::PointwiseAdditive => {
            let (x, y) = (tr.x.values().to_vec(), tr.y.values().to_vec());
            Box::new(move |eta, t, a, b| {
                let d = Complex64::new(eta, t);
                for j in 0..a.len() {
                    a[j] = x[j] + d;
                    b[j] = y[j] + d;
                }
            })
        }
    };

    let column = |&(eta, w_eta): &(f64, f64)| -> (Vec<f64>, Vec<bool>) {
        let mut a = vec![Complex64::new(0.0, 0.0); n];
        let mut b = a.clone();
        let mut terms: Vec<Vec<Option<f64>>> = Vec::with_capacity(tau.len());
        for &(t, _) in &tau {
            evaluate(eta, t, &mut a, &mut b);
            terms.push(
                a.iter()
                    .zip(&b)
                    .map(|(a, b)| im_arctan(*a, *b).map(|v| v / t))
                    .collect(),
            );
        }
        let mut sum = vec![0.0; n];
        let mut flagged = vec![false; n];
        for j in 0..n {
            for (m, &(_, w_tau)) in tau.iter().enumerate() {
                let v = match terms[m][j] {
                    Some(v) => v,
                    None => {
                        flagged[j] = true;
                        nearest_valid(&terms, m, j).unwrap_or(0.0)
                    }
                };
                sum[j] += w_eta * w_tau * v;
            }
        }
        (sum, flagged)
    };

    let eta = cp.eta_nodes();
    let merge = |(mut s, mut f): (Vec<f64>, Vec<bool>), (s2, f2): (Vec<f64>, Vec<bool>)| {
        for j in 0..s.len() {
            s[j] += s2[j];
            f[j] |= f2[j];
        }
        (s, f)
    };
    let (sum, flagged) = match cp.reduction {
        ReductionOrder::Fixed => {
            let parts: Vec<_> = eta.par_iter().map(column).collect();
            parts.into_iter().fold((vec![0.0; n], vec![false; n]), merge)
        }
        ReductionOrder::Unordered => eta
            .par_iter()
            .map(column)
            .reduce(|| (vec![0.0; n], vec![false; n]), merge),
    };
    let scale = cp.normalization() / (2.0 * PI);
    Ok(FrequencyEstimate {
        grid,
        hz: sum.into_iter().map(|v| v * scale).collect(),
        flagged,
    })
}

fn nearest_valid(terms: &[Vec<Option<f64>>], m: usize, j: usize) -> Option<f64> {
    (1..terms.len()).find_map(|d| {
        let below = m.checked_sub(d).and_then(|i| terms[i][j]);
        let above = terms.get(m + d).and_then(|row| row[j]);
        below.or(above)
    })
}

/// `cos(2π(f0 t + k_c t²/2))`.
pub fn chirp(f0: f64, kc: f64, grid: &UniformGrid) -> RealSeries {
    RealSeries::from_fn(*grid, |t| (2.0 * PI * chirp_phase(f0, kc, t)).cos()).expect("finite chirp")
}

/// Phase in cycles, `f0 t + k_c t²/2`.
pub fn chirp_phase(f0: f64, kc: f64, t: f64) -> f64 {
    f0 * t + 0.5 * kc * t * t
}

/// `f0 + k_c t`.
pub fn chirp_frequency(f0: f64, kc: f64, t: f64) -> f64 {
    f0 + kc * t
}

/// The closed-form pair `(cos φ, sin φ)` of the chirp, each multiplied by
/// `envelope(t)`.
pub fn chirp_trace(f0: f64, kc: f64, grid: &UniformGrid, envelope: impl Fn(f64) -> f64) -> Result<AnalyticTrace> {
    let phase = |t: f64| 2.0 * PI * chirp_phase(f0, kc, t);
    let x = RealSeries::from_fn(*grid, |t| envelope(t) * phase(t).cos())?;
    let y = RealSeries::from_fn(*grid, |t| envelope(t) * phase(t).sin())?;
    AnalyticTrace::from_components(x, y)
}
