//! The complex-step integral transform and the baseline derivative
//! operators it is compared against.
//!
//! The transform of `f` at `x` is
//!
//! ```text
//! (C f)(x) = 1/(2HZ) ∫_{-H}^{H} ∫_{0+}^{Z} Im[f(x + η + iτ)] / τ  dτ dη
//! ```
//!
//! It is evaluated by a tensor quadrature over `η` nodes in `[-H, H]` and
//! `τ` nodes in `[ε, Z]`. The integrand is regular at `τ → 0` (it tends to
//! `f'(x + η)`), so the strip `[0, ε]` is filled with the value at the
//! smallest `τ` node rather than dropped. With `H = 0` the `η` average
//! collapses to a single evaluation at `η = 0` and the normalization is
//! `1/Z`.
//!
//! In Fourier space the transform is the multiplier
//! `σ(k) = i · Shi(kZ)/Z · sin(kH)/(kH)`, odd and purely imaginary.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuation::{check_exponent, continue_direct, shift_into, AnalyticFunction, ComplexShift};
use crate::grid::{fft_forward, fft_inverse, nyquist_slot, ComplexSeries, RealSeries, Series, UniformGrid};
use crate::quadrature::{nodes, Rule};
use crate::special::{shi, sinc_kernel};
use crate::{Complex64, Error, Result};

/// How partial sums over `η` nodes are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionOrder {
    /// Partial sums are added in node order; output is bit-reproducible.
    #[default]
    Fixed,
    /// Partial sums are combined as they finish.
    Unordered,
}

/// Parameters of the double integral. Lengths are in the units of the grid
/// coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsitParams {
    /// Half-width of the real average.
    pub h: f64,
    /// Extent of the imaginary direction.
    pub z: f64,
    /// Smallest `τ` node.
    pub epsilon: f64,
    pub n_eta: usize,
    pub n_tau: usize,
    #[serde(default = "default_eta_rule")]
    pub eta_rule: Rule,
    #[serde(default = "default_tau_rule")]
    pub tau_rule: Rule,
    #[serde(default)]
    pub reduction: ReductionOrder,
}

fn default_eta_rule() -> Rule {
    Rule::Midpoint
}

fn default_tau_rule() -> Rule {
    Rule::Trapezoid
}

impl CsitParams {
    /// Midpoint nodes in `η`, trapezoid nodes `τ_m = mZ/n_tau` in `τ`.
    pub fn new(h: f64, z: f64, n_eta: usize, n_tau: usize) -> Result<Self> {
        let params = Self {
            h,
            z,
            epsilon: z / n_tau.max(1) as f64,
            n_eta: if h == 0.0 { 1 } else { n_eta },
            n_tau,
            eta_rule: default_eta_rule(),
            tau_rule: default_tau_rule(),
            reduction: ReductionOrder::Fixed,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn with_rules(mut self, eta_rule: Rule, tau_rule: Rule) -> Self {
        self.eta_rule = eta_rule;
        self.tau_rule = tau_rule;
        self
    }

    pub fn with_reduction(mut self, reduction: ReductionOrder) -> Self {
        self.reduction = reduction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h >= 0.0) {
            return Err(Error::param(format!("H must be finite and >= 0, got {}", self.h)));
        }
        if !(self.z.is_finite() && self.z > 0.0) {
            return Err(Error::param(format!("Z must be finite and > 0, got {}", self.z)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < self.z) {
            return Err(Error::param(format!(
                "epsilon must satisfy 0 < epsilon < Z (epsilon = {}, Z = {})",
                self.epsilon, self.z
            )));
        }
        if self.n_eta == 0 || self.n_tau == 0 {
            return Err(Error::param("node counts must be at least 1"));
        }
        Ok(())
    }

    /// `η` nodes and weights; a single unit-weight node at 0 when `H = 0`.
    pub fn eta_nodes(&self) -> Vec<(f64, f64)> {
        if self.h == 0.0 {
            vec![(0.0, 1.0)]
        } else {
            nodes(self.eta_rule, -self.h, self.h, self.n_eta)
        }
    }

    /// `τ` nodes and weights on `[ε, Z]`, with `[0, ε]` folded into the
    /// first node.
    pub fn tau_nodes(&self) -> Vec<(f64, f64)> {
        let mut tau = nodes(self.tau_rule, self.epsilon, self.z, self.n_tau);
        tau[0].1 += self.epsilon;
        tau
    }

    /// `1/(2HZ)`, or `1/Z` when `H = 0`.
    pub fn normalization(&self) -> f64 {
        let eta_total: f64 = self.eta_nodes().iter().map(|p| p.1).sum();
        1.0 / (eta_total * self.z)
    }
}

/// Quadrature form of the transform on sampled real data, continued
/// spectrally.
pub fn csit_quadrature(s: &RealSeries, p: &CsitParams) -> Result<RealSeries> {
    p.validate()?;
    let grid = *s.grid();
    check_exponent(&grid, p.z)?;
    let spectrum = fft_forward(s);
    let coeffs = spectrum.coeffs();
    let ks = grid.wavenumbers();
    let n = grid.len();
    let tau = p.tau_nodes();

    let partial = |&(eta, w_eta): &(f64, f64)| -> Vec<f64> {
        let mut acc = vec![0.0; n];
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for &(t, w_tau) in &tau {
            // Guarded by `check_exponent` above (t ≤ Z).
            let shift = ComplexShift::new(eta, t).expect("validated node");
            shift_into(coeffs, &ks, shift, &mut buf);
            let w = w_eta * w_tau / t;
            for (a, v) in acc.iter_mut().zip(&buf) {
                *a += w * v.im;
            }
        }
        acc
    };

    let eta = p.eta_nodes();
    let sum = match p.reduction {
        ReductionOrder::Fixed => {
            let parts: Vec<Vec<f64>> = eta.par_iter().map(partial).collect();
            let mut total = vec![0.0; n];
            for part in parts {
                add_into(&mut total, &part);
            }
            total
        }
        ReductionOrder::Unordered => eta.par_iter().map(partial).reduce(
            || vec![0.0; n],
            |mut a, b| {
                add_into(&mut a, &b);
                a
            },
        ),
    };
    let norm = p.normalization();
    RealSeries::new(grid, sum.into_iter().map(|v| v * norm).collect())
}

fn add_into(total: &mut [f64], part: &[f64]) {
    for (t, v) in total.iter_mut().zip(part) {
        *t += v;
    }
}

/// Complex data: the transform of the real part plus `i` times the
/// transform of the imaginary part.
pub fn csit_quadrature_complex(s: &ComplexSeries, p: &CsitParams) -> Result<ComplexSeries> {
    let re = csit_quadrature(&s.re(), p)?;
    let im = csit_quadrature(&s.im(), p)?;
    ComplexSeries::from_parts(&re, &im)
}

/// Quadrature form of the transform for a closed-form function, evaluated
/// at complex points directly (no FFT).
pub fn csit_quadrature_direct(f: &AnalyticFunction, x: f64, p: &CsitParams) -> Result<f64> {
    p.validate()?;
    let tau = p.tau_nodes();
    let mut sum = 0.0;
    for (eta, w_eta) in p.eta_nodes() {
        let mut inner = 0.0;
        for &(t, w_tau) in &tau {
            let v = continue_direct(f, x, ComplexShift::new(eta, t)?)?;
            inner += w_tau * v.im / t;
        }
        sum += w_eta * inner;
    }
    Ok(sum * p.normalization())
}

/// Direct-evaluation transform of `re + i·im`, each part real on the real
/// axis.
pub fn csit_quadrature_direct_complex(
    re: &AnalyticFunction,
    im: &AnalyticFunction,
    x: f64,
    p: &CsitParams,
) -> Result<Complex64> {
    Ok(Complex64::new(
        csit_quadrature_direct(re, x, p)?,
        csit_quadrature_direct(im, x, p)?,
    ))
}

/// Fourier multiplier of the transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsitSymbol {
    h: f64,
    z: f64,
}

impl CsitSymbol {
    pub fn new(h: f64, z: f64) -> Result<Self> {
        if !(h.is_finite() && h >= 0.0) {
            return Err(Error::param(format!("H must be finite and >= 0, got {h}")));
        }
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::param(format!("Z must be finite and > 0, got {z}")));
        }
        Ok(Self { h, z })
    }

    /// `i · Shi(kZ)/Z · sinc(kH)`.
    pub fn eval(&self, k: f64) -> Complex64 {
        if k == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(0.0, shi(k * self.z) / self.z * sinc_kernel(k * self.h))
    }
}

pub fn csit_symbol(k: f64, h: f64, z: f64) -> Result<Complex64> {
    Ok(CsitSymbol::new(h, z)?.eval(k))
}

/// Applies `multiplier` to the spectrum of `s`, zeroing the Nyquist slot
/// when asked, and synthesizes.
fn apply_multiplier<S: Series + ?Sized>(
    s: &S,
    multiplier: impl Fn(f64) -> Complex64,
    zero_nyquist: bool,
) -> ComplexSeries {
    let mut spectrum = fft_forward(s).apply(multiplier);
    if zero_nyquist {
        if let Some(slot) = nyquist_slot(s.grid().len()) {
            spectrum.coeffs_mut()[slot] = Complex64::new(0.0, 0.0);
        }
    }
    fft_inverse(&spectrum)
}

/// Odd, purely imaginary multipliers map real data to real data; the
/// imaginary residue is rounding.
fn real_part(c: ComplexSeries) -> RealSeries {
    c.re()
}

/// The transform as a Fourier multiplier: the `ε → 0`, fine-quadrature limit
/// of [`csit_quadrature`]. The Nyquist mode is zeroed.
pub fn csit_spectral(s: &RealSeries, h: f64, z: f64) -> Result<RealSeries> {
    let symbol = CsitSymbol::new(h, z)?;
    Ok(real_part(apply_multiplier(s, |k| symbol.eval(k), true)))
}

pub fn csit_spectral_complex(s: &ComplexSeries, h: f64, z: f64) -> Result<ComplexSeries> {
    let symbol = CsitSymbol::new(h, z)?;
    Ok(apply_multiplier(s, |k| symbol.eval(k), true))
}

/// `(s_{j+1} - s_{j-1}) / (2Δx)` with periodic wraparound.
pub fn fd_centered(s: &RealSeries) -> Result<RealSeries> {
    let n = s.grid().len();
    if n < 3 {
        return Err(Error::param(format!("centered differences need n >= 3, got {n}")));
    }
    let v = s.values();
    let inv = 1.0 / (2.0 * s.grid().spacing());
    let out = (0..n).map(|j| (v[(j + 1) % n] - v[(j + n - 1) % n]) * inv).collect();
    RealSeries::new(*s.grid(), out)
}

/// Fourier multiplier `ik` with the Nyquist mode zeroed.
pub fn pseudospectral_derivative(s: &RealSeries) -> RealSeries {
    real_part(apply_multiplier(s, |k| Complex64::new(0.0, k), true))
}

pub fn pseudospectral_derivative_complex(s: &ComplexSeries) -> ComplexSeries {
    apply_multiplier(s, |k| Complex64::new(0.0, k), true)
}

/// `Im[f(x + h + iv)] / v`; `h = 0` is the classical complex step.
pub fn complex_step_derivative(f: &AnalyticFunction, x: f64, h: f64, v: f64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::param(format!("imaginary step must be > 0, got {v}")));
    }
    let value = continue_direct(f, x, ComplexShift::new(h, v)?)?;
    Ok(value.im / v)
}

/// Hilbert transform as the multiplier `-i·sgn(k)`, with DC and Nyquist
/// zeroed.
pub fn hilbert_fft(s: &RealSeries) -> RealSeries {
    real_part(apply_multiplier(
        s,
        |k| Complex64::new(0.0, -k.signum() * f64::from(k != 0.0)),
        true,
    ))
}

/// Uniform bound `(M/6)H² + (M/18)Z²` on `|C f - f'|` for `|f'''| ≤ M` on
/// the integration rectangle.
pub fn remainder_bound(m: f64, h: f64, z: f64) -> f64 {
    m / 6.0 * h * h + m / 18.0 * z * z
}

/// A spatial derivative operator acting on real series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DerivativeOperator {
    CenteredFd,
    Pseudospectral,
    CsitQuadrature { params: CsitParams },
    CsitSymbol { h: f64, z: f64 },
}

impl DerivativeOperator {
    pub fn apply(&self, s: &RealSeries) -> Result<RealSeries> {
        match self {
            DerivativeOperator::CenteredFd => fd_centered(s),
            DerivativeOperator::Pseudospectral => Ok(pseudospectral_derivative(s)),
            DerivativeOperator::CsitQuadrature { params } => csit_quadrature(s, params),
            DerivativeOperator::CsitSymbol { h, z } => csit_spectral(s, *h, *z),
        }
    }

    /// Checks that the operator can run on `grid`.
    pub fn check(&self, grid: &UniformGrid) -> Result<()> {
        match self {
            DerivativeOperator::CenteredFd if grid.len() < 3 => Err(Error::param("centered differences need n >= 3")),
            DerivativeOperator::CsitQuadrature { params } => {
                params.validate()?;
                check_exponent(grid, params.z)
            }
            DerivativeOperator::CsitSymbol { h, z } => CsitSymbol::new(*h, *z).map(|_| ()),
            _ => Ok(()),
        }
    }
}
