//! Evaluation of `f(x + η + iτ)`.
//!
//! Sampled data are continued spectrally: with `s_j = (1/n) Σ c_k e^{ikx_j}`,
//! each coefficient is multiplied by `e^{ikη} e^{-kτ}`. The negative-`k`
//! branch grows like `e^{|k|τ}`; that growth is the correct upper-half-plane
//! continuation of a full (two-sided) spectrum and is kept, guarded against
//! overflow. Closed-form functions are evaluated directly.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::grid::{fft_forward, inverse_in_place, ComplexSeries, Series, Spectrum, UniformGrid};
use crate::{Complex64, Error, Result};

/// Upper bound on `max_k(-k·τ)`, the log of the largest multiplier.
pub const EXPONENT_LIMIT: f64 = 700.0;

/// Complex displacement `η + iτ` with `τ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexShift {
    eta: f64,
    tau: f64,
}

impl ComplexShift {
    pub fn new(eta: f64, tau: f64) -> Result<Self> {
        if !eta.is_finite() || !tau.is_finite() {
            return Err(Error::param(format!("shift ({eta}, {tau}) must be finite")));
        }
        if tau < 0.0 {
            return Err(Error::param(format!("imaginary shift must be non-negative, got {tau}")));
        }
        Ok(Self { eta, tau })
    }

    pub fn real(eta: f64) -> Result<Self> {
        Self::new(eta, 0.0)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.eta, self.tau)
    }

    /// `e^{ikη} e^{-kτ}`.
    pub fn multiplier(&self, k: f64) -> Complex64 {
        Complex64::from_polar((-k * self.tau).exp(), k * self.eta)
    }
}

/// Rejects shifts whose multiplier would overflow on this grid.
pub fn check_exponent(grid: &UniformGrid, tau: f64) -> Result<()> {
    let exponent = grid
        .wavenumbers()
        .iter()
        .map(|&k| -k * tau)
        .fold(f64::NEG_INFINITY, f64::max);
    if exponent > EXPONENT_LIMIT {
        return Err(Error::ContinuationOverflow {
            exponent,
            limit: EXPONENT_LIMIT,
        });
    }
    Ok(())
}

/// Continues a sampled series to `x_j + η + iτ` at every node.
///
/// Complex input is continued as `cont(Re s) + i·cont(Im s)`, which by
/// linearity of the multiplier is a single pass over the full spectrum.
pub fn continue_spectral<S: Series + ?Sized>(s: &S, shift: ComplexShift) -> Result<ComplexSeries> {
    continue_spectrum(&fft_forward(s), shift)
}

/// As [`continue_spectral`], starting from precomputed coefficients.
pub fn continue_spectrum(spectrum: &Spectrum, shift: ComplexShift) -> Result<ComplexSeries> {
    check_exponent(spectrum.grid(), shift.tau)?;
    let ks = spectrum.wavenumbers();
    let mut buf = vec![Complex64::new(0.0, 0.0); ks.len()];
    shift_into(spectrum.coeffs(), &ks, shift, &mut buf);
    ComplexSeries::new(*spectrum.grid(), buf)
}

/// Writes the synthesis of `coeffs · e^{ikη - kτ}` into `out`. Callers
/// check the exponent guard.
pub(crate) fn shift_into(coeffs: &[Complex64], ks: &[f64], shift: ComplexShift, out: &mut [Complex64]) {
    for ((o, &c), &k) in out.iter_mut().zip(coeffs).zip(ks) {
        *o = c * shift.multiplier(k);
    }
    inverse_in_place(out);
}

type Evaluator = dyn Fn(Complex64) -> Complex64 + Send + Sync;

/// A function of a complex argument, evaluated in closed form.
///
/// The transform takes `Im[f(·)]`, so evaluators used with it are expected
/// to be real on the real axis. Complex-valued data are handled as a pair of
/// such functions (real and imaginary parts).
#[derive(Clone)]
pub struct AnalyticFunction {
    name: String,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFunction").field("name", &self.name).finish()
    }
}

impl AnalyticFunction {
    pub fn new(name: impl Into<String>, eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn sin() -> Self {
        Self::new("sin", |z: Complex64| z.sin())
    }

    pub fn cos() -> Self {
        Self::new("cos", |z: Complex64| z.cos())
    }

    pub fn exp() -> Self {
        Self::new("exp", |z: Complex64| z.exp())
    }

    /// `e^{-z²}`.
    pub fn gaussian() -> Self {
        Self::new("gaussian", |z: Complex64| (-z * z).exp())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let v = (self.eval)(z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation {
                function: self.name.clone(),
                at: format!("{z}"),
            })
        }
    }
}

/// `f(x + η + iτ)` by direct evaluation.
pub fn continue_direct(f: &AnalyticFunction, x: f64, shift: ComplexShift) -> Result<Complex64> {
    f.eval(Complex64::new(x, 0.0) + shift.as_complex())
}
