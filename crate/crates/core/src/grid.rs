//! Uniform periodic grids, sampled series and the discrete Fourier transform.
//!
//! Transform convention: the forward transform is the plain sum
//! `c_k = Σ_j s_j e^{-2πi jk/n}` and the inverse carries the `1/n` factor, so
//! that `s_j = (1/n) Σ_k c_k e^{i k x_j}` with signed wavenumbers
//! `k = 2π j_signed / L`. For even `n` the Nyquist slot is assigned the
//! negative wavenumber `-π n / L`.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Complex64, Error, Result};

/// `n` equispaced nodes `x0 + j·Δx` on the periodic interval `[x0, x0 + L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct UniformGrid {
    x0: f64,
    length: f64,
    n: usize,
}

#[derive(Deserialize)]
struct RawGrid {
    x0: f64,
    length: f64,
    n: usize,
}

impl TryFrom<RawGrid> for UniformGrid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        UniformGrid::new(raw.x0, raw.length, raw.n)
    }
}

impl UniformGrid {
    pub fn new(x0: f64, length: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 nodes, got {n}")));
        }
        if !x0.is_finite() {
            return Err(Error::InvalidGrid(format!("origin must be finite, got {x0}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        Ok(Self { x0, length, n })
    }

    /// Grid over `[0, 2π)`.
    pub fn periodic_2pi(n: usize) -> Result<Self> {
        Self::new(0.0, 2.0 * PI, n)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn coord(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    /// Index of the node closest to `x`, wrapping periodically.
    pub fn nearest_node(&self, x: f64) -> usize {
        let rel = (x - self.x0).rem_euclid(self.length) / self.spacing();
        (rel.round() as usize) % self.n
    }

    /// Signed wavenumbers in standard FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        wavenumbers(self)
    }
}

/// Signed wavenumbers `2π j_signed / L` in FFT storage order: `0`, the
/// positive branch ascending, then the negative branch. For even `n` the
/// Nyquist slot `n/2` carries `-π n / L`.
pub fn wavenumbers(grid: &UniformGrid) -> Vec<f64> {
    let n = grid.len();
    let scale = 2.0 * PI / grid.length();
    (0..n).map(|j| signed_index(j, n) as f64 * scale).collect()
}

/// Signed frequency index of storage slot `j`.
pub fn signed_index(j: usize, n: usize) -> i64 {
    let positive = n.div_ceil(2);
    if j < positive {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Storage slot of the Nyquist mode, present only for even `n`.
pub fn nyquist_slot(n: usize) -> Option<usize> {
    n.is_multiple_of(2).then_some(n / 2)
}

fn check_finite<T: Copy>(values: &[T], finite: impl Fn(T) -> bool) -> Result<()> {
    match values.iter().position(|&v| !finite(v)) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn check_len(grid: &UniformGrid, actual: usize) -> Result<()> {
    if actual != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual,
        });
    }
    Ok(())
}

/// Real samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSeries {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl RealSeries {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        check_finite(&values, f64::is_finite)?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.coords().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid,
        }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn to_complex(&self) -> ComplexSeries {
        ComplexSeries {
            grid: self.grid,
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// Circular shift by `m` nodes: output node `j` holds input node `j - m`.
    pub fn rotate(&self, m: usize) -> Self {
        let mut values = self.values.clone();
        values.rotate_right(m % self.grid.len());
        Self {
            grid: self.grid,
            values,
        }
    }
}

/// Complex samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    grid: UniformGrid,
    values: Vec<Complex64>,
}

impl ComplexSeries {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        check_finite(&values, |c: Complex64| c.is_finite())?;
        Ok(Self { grid, values })
    }

    pub fn from_parts(re: &RealSeries, im: &RealSeries) -> Result<Self> {
        if re.grid != im.grid {
            return Err(Error::InvalidGrid(
                "real and imaginary parts live on different grids".into(),
            ));
        }
        let values = re
            .values
            .iter()
            .zip(&im.values)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        Ok(Self { grid: re.grid, values })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn re(&self) -> RealSeries {
        RealSeries {
            grid: self.grid,
            values: self.values.iter().map(|c| c.re).collect(),
        }
    }

    pub fn im(&self) -> RealSeries {
        RealSeries {
            grid: self.grid,
            values: self.values.iter().map(|c| c.im).collect(),
        }
    }

    pub fn rotate(&self, m: usize) -> Self {
        let mut values = self.values.clone();
        values.rotate_right(m % self.grid.len());
        Self {
            grid: self.grid,
            values,
        }
    }
}

/// Anything that can be transformed: real or complex samples on a grid.
pub trait Series {
    fn grid(&self) -> &UniformGrid;
    fn complex_values(&self) -> Vec<Complex64>;
}

impl Series for RealSeries {
    fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    fn complex_values(&self) -> Vec<Complex64> {
        self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }
}

impl Series for ComplexSeries {
    fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    fn complex_values(&self) -> Vec<Complex64> {
        self.values.clone()
    }
}

/// Fourier coefficients in FFT storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: UniformGrid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: UniformGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, coeffs.len())?;
        check_finite(&coeffs, |c: Complex64| c.is_finite())?;
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        wavenumbers(&self.grid)
    }

    /// Multiplies each coefficient by `multiplier(k)`.
    pub fn apply(&self, multiplier: impl Fn(f64) -> Complex64) -> Spectrum {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.wavenumbers())
            .map(|(&c, k)| c * multiplier(k))
            .collect();
        Spectrum {
            grid: self.grid,
            coeffs,
        }
    }
}

struct PlanPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> PlanPair {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let mut planner = PLANNER
        .get_or_init(|| Mutex::new(FftPlanner::new()))
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner());
    PlanPair {
        forward: planner.plan_fft_forward(n),
        inverse: planner.plan_fft_inverse(n),
    }
}

/// Unnormalized forward DFT in place.
pub(crate) fn forward_in_place(buf: &mut [Complex64]) {
    plans(buf.len()).forward.process(buf);
}

/// Inverse DFT in place, including the `1/n` factor.
pub(crate) fn inverse_in_place(buf: &mut [Complex64]) {
    plans(buf.len()).inverse.process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

pub fn fft_forward<S: Series + ?Sized>(s: &S) -> Spectrum {
    let mut coeffs = s.complex_values();
    forward_in_place(&mut coeffs);
    Spectrum {
        grid: *s.grid(),
        coeffs,
    }
}

pub fn fft_inverse(spectrum: &Spectrum) -> ComplexSeries {
    let mut values = spectrum.coeffs.clone();
    inverse_in_place(&mut values);
    ComplexSeries {
        grid: spectrum.grid,
        values,
    }
}
