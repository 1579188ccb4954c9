//! Complex-step integral transform (CSIT).
//!
//! The transform averages the complex-step derivative `Im[f(x + η + iτ)] / τ`
//! over the rectangle `η ∈ [-H, H]`, `τ ∈ (0, Z]` of the complex plane. For
//! analytic data it reproduces `f'(x)` with an `O(H² + Z²)` remainder, and in
//! Fourier space it acts as the purely imaginary multiplier
//! `σ(k) = i · Shi(kZ)/Z · sin(kH)/(kH)`.
//!
//! Sampled data are continued into the complex plane spectrally: every Fourier
//! coefficient `c_k` is multiplied by `e^{ikη} e^{-kτ}`.
//!
//! Module map:
//!
//! - [`grid`]: uniform periodic grids, sample series and the DFT pair
//! - [`special`]: `Shi`, `Si` and the sinc kernel
//! - [`continuation`]: spectral and direct analytic continuation
//! - [`operator`]: the transform itself plus baseline derivative operators
//! - [`closed_forms`]: verification of the transform against closed forms
//! - [`advection`]: leapfrog advection solver and dispersion relations
//! - [`ifreq`]: analytic signals and instantaneous frequency estimators

pub mod advection;
pub mod closed_forms;
pub mod continuation;
mod error;
pub mod grid;
pub mod ifreq;
pub mod operator;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
