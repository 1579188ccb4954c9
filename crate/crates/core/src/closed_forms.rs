//! Verification of the quadrature transform against closed forms.
//!
//! Each row evaluates [`csit_quadrature_direct`] at sample points and
//! compares it with either an exact expression (sin, cos, `e^{ix}`) or a
//! nested adaptive Simpson evaluation of the double integral (`e^x`,
//! Gaussian). Closed forms use the normalized convention
//! `C[e^{ikx}] = i · Shi(kZ)/Z · sinc(kH) · e^{ikx}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::continuation::AnalyticFunction;
use crate::operator::{csit_quadrature_direct, CsitParams};
use crate::quadrature::adaptive_simpson;
use crate::special::{shi, si, sinc_kernel};
use crate::{Complex64, Error, Result};

pub const NORMALIZATION_NOTE: &str = "closed forms carry the 1/(2HZ) normalization: \
C[sin](x) = sinc(H) Shi(Z)/Z cos(x); the unnormalized tabulated form omits the 1/Z factor";

/// Imaginary step used to evaluate the integrand at `τ = 0`.
const TAU_ZERO_STEP: f64 = 1e-100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormConfig {
    pub h: f64,
    pub z: f64,
    pub n_eta: usize,
    pub n_tau: usize,
    pub epsilon: f64,
    pub points: usize,
    pub tolerance: f64,
}

impl Default for ClosedFormConfig {
    fn default() -> Self {
        Self {
            h: 0.1,
            z: 0.1,
            n_eta: 128,
            n_tau: 128,
            epsilon: 0.1 / 512.0,
            points: 20,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    ClosedForm,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormRow {
    pub name: String,
    pub reference: Reference,
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormReport {
    pub config: ClosedFormConfig,
    pub rows: Vec<ClosedFormRow>,
    pub note: String,
}

impl ClosedFormReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

/// `points` equispaced samples on `[a, b]`, endpoints included.
fn sample_points(a: f64, b: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..points)
        .map(|i| a + (b - a) * i as f64 / (points - 1) as f64)
        .collect()
}

/// The normalized double integral by nested adaptive Simpson quadrature,
/// integrating `τ` from 0.
pub fn csit_reference(f: &AnalyticFunction, x: f64, h: f64, z: f64, tol: f64) -> Result<f64> {
    if !(h >= 0.0 && z > 0.0) {
        return Err(Error::param(format!(
            "reference needs H >= 0 and Z > 0 (H = {h}, Z = {z})"
        )));
    }
    let failure = std::cell::Cell::new(None::<Error>);
    let integrand = |eta: f64, tau: f64| -> f64 {
        let t = if tau == 0.0 { TAU_ZERO_STEP } else { tau };
        match f.eval(Complex64::new(x + eta, t)) {
            Ok(v) => v.im / t,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let inner = |eta: f64| -> f64 {
        let est = adaptive_simpson(&|tau| integrand(eta, tau), 0.0, z, tol * z);
        if !est.converged && est.value.is_finite() {
            failure.set(Some(Error::NotConverged {
                estimate: est.value,
                error: est.error,
            }));
        }
        est.value
    };
    let value = if h == 0.0 {
        inner(0.0) / z
    } else {
        let est = adaptive_simpson(&inner, -h, h, tol * 2.0 * h * z);
        if !est.converged {
            return Err(Error::NotConverged {
                estimate: est.value,
                error: est.error,
            });
        }
        est.value / (2.0 * h * z)
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(value)
}

/// Runs all rows.
pub fn verify_closed_forms(cfg: &ClosedFormConfig) -> Result<ClosedFormReport> {
    let p = CsitParams::new(cfg.h, cfg.z, cfg.n_eta, cfg.n_tau)?.with_epsilon(cfg.epsilon)?;
    let gain = sinc_kernel(cfg.h) * shi(cfg.z) / cfg.z;
    let reference_tol = 1e-12;

    let mut rows = Vec::new();
    let mut row = |name: &str, reference, (a, b): (f64, f64), deviation: &dyn Fn(f64) -> Result<f64>| -> Result<()> {
        let mut max_deviation: f64 = 0.0;
        for x in sample_points(a, b, cfg.points) {
            max_deviation = max_deviation.max(deviation(x)?);
        }
        rows.push(ClosedFormRow {
            name: name.to_string(),
            reference,
            x_min: a,
            x_max: b,
            points: cfg.points,
            max_deviation,
            tolerance: cfg.tolerance,
            passed: max_deviation < cfg.tolerance,
        });
        Ok(())
    };

    let sin = AnalyticFunction::sin();
    let cos = AnalyticFunction::cos();
    let exp = AnalyticFunction::exp();
    let gaussian = AnalyticFunction::gaussian();
    let period = (-PI, PI);

    row("sin", Reference::ClosedForm, period, &|x| {
        Ok((csit_quadrature_direct(&sin, x, &p)? - gain * x.cos()).abs())
    })?;
    row("cos", Reference::ClosedForm, period, &|x| {
        Ok((csit_quadrature_direct(&cos, x, &p)? + gain * x.sin()).abs())
    })?;
    row("exp", Reference::BruteForce, (-1.0, 1.0), &|x| {
        let reference = csit_reference(&exp, x, cfg.h, cfg.z, reference_tol)?;
        Ok((csit_quadrature_direct(&exp, x, &p)? - reference).abs())
    })?;
    row("gaussian", Reference::BruteForce, (-2.0, 2.0), &|x| {
        let reference = csit_reference(&gaussian, x, cfg.h, cfg.z, reference_tol)?;
        Ok((csit_quadrature_direct(&gaussian, x, &p)? - reference).abs())
    })?;
    row("exp_ix", Reference::ClosedForm, period, &|x| {
        let value = Complex64::new(
            csit_quadrature_direct(&cos, x, &p)?,
            csit_quadrature_direct(&sin, x, &p)?,
        );
        let closed = Complex64::new(0.0, gain) * Complex64::from_polar(1.0, x);
        Ok((value - closed).norm())
    })?;

    Ok(ClosedFormReport {
        config: *cfg,
        rows,
        note: NORMALIZATION_NOTE.to_string(),
    })
}

/// Closed form for `e^x` along the real direction only: the `η` average of
/// `e^{x+η}` times the `τ` average of `sin τ / τ`, i.e.
/// `Si(Z)/(2HZ) · (e^{x+H} - e^{x-H})`.
pub fn exp_closed_form(x: f64, h: f64, z: f64) -> f64 {
    if h == 0.0 {
        return si(z) / z * x.exp();
    }
    si(z) / (2.0 * h * z) * ((x + h).exp() - (x - h).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_matches_sine_closed_form() {
        let v = csit_reference(&AnalyticFunction::sin(), 0.0, 0.1, 0.1, 1e-13).unwrap();
        let closed = sinc_kernel(0.1) * shi(0.1) / 0.1;
        assert!((v - closed).abs() < 1e-10, "{v} vs {closed}");
    }

    #[test]
    fn reference_of_constant_is_zero() {
        let one = AnalyticFunction::new("one", |_| Complex64::new(1.0, 0.0));
        assert_eq!(csit_reference(&one, 0.3, 0.1, 0.1, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn exp_reference_matches_its_closed_form() {
        for x in [-1.0, 0.0, 0.4] {
            let v = csit_reference(&AnalyticFunction::exp(), x, 0.1, 0.1, 1e-13).unwrap();
            assert!((v - exp_closed_form(x, 0.1, 0.1)).abs() < 1e-10);
        }
        let v = csit_reference(&AnalyticFunction::exp(), 0.2, 0.0, 0.3, 1e-13).unwrap();
        assert!((v - exp_closed_form(0.2, 0.0, 0.3)).abs() < 1e-10);
    }

    #[test]
    fn gaussian_vanishes_at_origin() {
        let v = csit_reference(&AnalyticFunction::gaussian(), 0.0, 0.1, 0.1, 1e-13).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn sample_points_include_endpoints() {
        assert_eq!(sample_points(-1.0, 1.0, 3), vec![-1.0, 0.0, 1.0]);
        assert_eq!(sample_points(0.0, 2.0, 1), vec![1.0]);
    }

    #[test]
    fn reduced_report_passes() {
        let cfg = ClosedFormConfig {
            n_eta: 64,
            n_tau: 64,
            points: 5,
            tolerance: 1e-5,
            ..ClosedFormConfig::default()
        };
        let report = verify_closed_forms(&cfg).unwrap();
        assert_eq!(report.rows.len(), 5);
        assert!(report.all_passed(), "{report:#?}");
        assert!(report.note.contains("1/Z"));
    }
}
