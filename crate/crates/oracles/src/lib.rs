//! Brute-force references for tests: adaptive Gauss–Kronrod quadrature, a
//! nested quadrature of the complex-step integral, direct DFT summation and
//! series/quadrature values of `Shi` and `Si`.
//!
//! Nothing here depends on `csit-core`.

use std::f64::consts::PI;

pub use num_complex::Complex64;

/// Gauss–Kronrod 7/15 abscissae on `[-1, 1]` (non-negative half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOracle {
    /// Absolute tolerance for the whole interval.
    pub tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureOracle {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_depth: 40,
        }
    }
}

fn kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let pair = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    (k * h, (k - g).abs() * h)
}

impl QuadratureOracle {
    pub fn new(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn integrate(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> OracleEstimate {
        let mut out = OracleEstimate {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
        if a == b {
            return out;
        }
        self.step(f, a, b, self.tol, self.max_depth, &mut out);
        out
    }

    fn step(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32, out: &mut OracleEstimate) {
        let (value, error) = kronrod(f, a, b);
        let m = 0.5 * (a + b);
        // Below the rounding level of the panel the estimate cannot improve.
        let floor = 50.0 * f64::EPSILON * value.abs();
        if error <= tol.max(floor) || m <= a || m >= b {
            out.value += value;
            out.error += error;
            return;
        }
        if depth == 0 || !value.is_finite() {
            out.value += value;
            out.error += error;
            out.converged = false;
            return;
        }
        self.step(f, a, m, 0.5 * tol, depth - 1, out);
        self.step(f, m, b, 0.5 * tol, depth - 1, out);
    }
}

/// The normalized double integral
/// `1/(2HZ) ∫_{-H}^{H} ∫_ε^Z Im f(x+η+iτ)/τ dτ dη` by nested adaptive
/// quadrature (`1/Z` and no `η` integral when `H = 0`). Pass `eps = 0` for
/// the full integral; the Kronrod nodes never touch `τ = 0`.
pub fn csit_bruteforce(
    f: &dyn Fn(Complex64) -> Complex64,
    x: f64,
    h: f64,
    z: f64,
    eps: f64,
    oracle: QuadratureOracle,
) -> OracleEstimate {
    let inner_oracle = QuadratureOracle::new(oracle.tol * 1e-2);
    let worst_inner = std::cell::Cell::new((0.0f64, true));
    let inner = |eta: f64| -> f64 {
        let est = inner_oracle.integrate(&|tau| f(Complex64::new(x + eta, tau)).im / tau, eps, z);
        let (e, ok) = worst_inner.get();
        worst_inner.set((e.max(est.error), ok && est.converged));
        est.value
    };
    let (value, error, converged) = if h == 0.0 {
        let v = inner(0.0);
        (v / z, 0.0, true)
    } else {
        let outer = oracle.integrate(&inner, -h, h);
        let norm = 2.0 * h * z;
        (outer.value / norm, outer.error / norm, outer.converged)
    };
    let (inner_error, inner_ok) = worst_inner.get();
    OracleEstimate {
        value,
        error: error + inner_error / z,
        converged: converged && inner_ok,
    }
}

/// Plain `O(n²)` DFT, `X_k = Σ_j x_j e^{-2πi jk/n}`.
pub fn dft_direct(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    (0..n)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let r = (j * k) % n;
                    v * Complex64::from_polar(1.0, -2.0 * PI * r as f64 / n as f64)
                })
                .sum()
        })
        .collect()
}

/// Power series of `Shi` (`sign = 1`) or `Si` (`sign = -1`), summed until the
/// terms stop mattering.
fn odd_series(z: f64, sign: f64) -> f64 {
    let mut sum = 0.0;
    let mut factorial_term = z; // z^{2m+1}/(2m+1)!
    for m in 0..200 {
        let k = 2 * m + 1;
        let term = factorial_term / k as f64;
        sum += term;
        if term.abs() <= 1e-20 * sum.abs() {
            break;
        }
        factorial_term *= sign * z * z / ((k + 1) as f64 * (k + 2) as f64);
    }
    sum
}

pub fn shi_series(z: f64) -> f64 {
    odd_series(z, 1.0)
}

pub fn si_series(z: f64) -> f64 {
    odd_series(z, -1.0)
}

pub fn shi_quadrature(z: f64) -> OracleEstimate {
    QuadratureOracle::new(1e-14).integrate(&|t: f64| if t == 0.0 { 1.0 } else { t.sinh() / t }, 0.0, z)
}

pub fn si_quadrature(z: f64) -> OracleEstimate {
    QuadratureOracle::new(1e-14).integrate(&|t: f64| if t == 0.0 { 1.0 } else { t.sin() / t }, 0.0, z)
}
