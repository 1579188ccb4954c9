//! Hyperbolic sine integral, sine integral and the sinc kernel.
//!
//! `Shi` and `Si` use their Maclaurin series for `|z| ≤ 4`. Beyond that the
//! defining integral is continued from `z = 4` by adaptive Simpson
//! quadrature; `Si` switches to its asymptotic expansion for `|z| ≥ 64`.

use std::f64::consts::FRAC_PI_2;

use crate::quadrature::adaptive_simpson;
use crate::{Error, Result};

const SERIES_LIMIT: f64 = 4.0;
const SI_ASYMPTOTIC: f64 = 64.0;

/// Largest argument for which `sinh` (and so the integrand of `Shi`) is
/// representable.
pub const SHI_ARG_LIMIT: f64 = 710.0;

/// Σ (±1)^m z^{2m+1} / ((2m+1)·(2m+1)!), `sign` = +1 for Shi, -1 for Si.
fn odd_series(z: f64, sign: f64) -> f64 {
    let z2 = z * z;
    let mut power = z; // z^{2m+1} / (2m+1)!
    let mut sum = z;
    let mut m = 0.0;
    loop {
        power *= sign * z2 / ((2.0 * m + 2.0) * (2.0 * m + 3.0));
        m += 1.0;
        let term = power / (2.0 * m + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            return sum;
        }
    }
}

fn sinhc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sinh() / t
    }
}

/// Hyperbolic sine integral `Shi(z) = ∫₀^z sinh(t)/t dt`.
///
/// Saturates to `±∞` beyond [`SHI_ARG_LIMIT`]; use [`shi_checked`] to get a
/// diagnostic instead.
pub fn shi(z: f64) -> f64 {
    match shi_checked(z) {
        Ok(v) => v,
        Err(_) if z.is_nan() => f64::NAN,
        Err(_) => f64::INFINITY.copysign(z),
    }
}

pub fn shi_checked(z: f64) -> Result<f64> {
    let a = z.abs();
    if !(a <= SHI_ARG_LIMIT) {
        return Err(Error::Overflow {
            function: "shi",
            arg: z,
        });
    }
    if a <= SERIES_LIMIT {
        return Ok(odd_series(z, 1.0));
    }
    let base = odd_series(SERIES_LIMIT, 1.0);
    let scale = base.max(a.sinh() / a);
    let tail = adaptive_simpson(&sinhc, SERIES_LIMIT, a, 1e-15 * scale).into_result()?;
    Ok((base + tail).copysign(z))
}

fn sinc_integrand(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sin() / t
    }
}

/// Sine integral `Si(z) = ∫₀^z sin(t)/t dt`. Returns NaN for NaN input.
pub fn si(z: f64) -> f64 {
    si_checked(z).unwrap_or(f64::NAN)
}

pub fn si_checked(z: f64) -> Result<f64> {
    if z.is_nan() {
        return Err(Error::Evaluation {
            function: "si".into(),
            at: "NaN".into(),
        });
    }
    let a = z.abs();
    if a <= SERIES_LIMIT {
        return Ok(odd_series(z, -1.0));
    }
    let value = if a < SI_ASYMPTOTIC {
        let base = odd_series(SERIES_LIMIT, -1.0);
        base + adaptive_simpson(&sinc_integrand, SERIES_LIMIT, a, 1e-15).into_result()?
    } else if a.is_infinite() {
        FRAC_PI_2
    } else {
        si_asymptotic(a)
    };
    Ok(value.copysign(z))
}

/// `Si(z) = π/2 - f(z) cos z - g(z) sin z` with the auxiliary functions
/// expanded asymptotically and truncated at the smallest term.
fn si_asymptotic(z: f64) -> f64 {
    let inv2 = 1.0 / (z * z);
    let mut f_sum = 0.0;
    let mut g_sum = 0.0;
    // f ~ (1/z) Σ (-1)^m (2m)!/z^{2m},  g ~ (1/z²) Σ (-1)^m (2m+1)!/z^{2m}
    let mut f_term = 1.0;
    let mut g_term = 1.0;
    let mut m = 0.0;
    loop {
        f_sum += f_term;
        g_sum += g_term;
        let next_f = -f_term * (2.0 * m + 1.0) * (2.0 * m + 2.0) * inv2;
        let next_g = -g_term * (2.0 * m + 2.0) * (2.0 * m + 3.0) * inv2;
        if next_f.abs() >= f_term.abs() || next_f.abs() < 1e-18 {
            break;
        }
        f_term = next_f;
        g_term = next_g;
        m += 1.0;
    }
    let f = f_sum / z;
    let g = g_sum * inv2;
    FRAC_PI_2 - f * z.cos() - g * z.sin()
}

/// `sin(w)/w` with the removable singularity at 0 filled in.
pub fn sinc_kernel(w: f64) -> f64 {
    if w.abs() < 1e-4 {
        let w2 = w * w;
        1.0 - w2 / 6.0 * (1.0 - w2 / 20.0)
    } else {
        w.sin() / w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn shi_at_origin_and_oddness() {
        assert_eq!(shi(0.0), 0.0);
        for z in [0.3, 2.0, 5.5, 12.0] {
            assert_eq!(shi(-z), -shi(z));
        }
    }

    #[test]
    fn shi_small_argument() {
        // Partial sums of the series through z^11.
        let z: f64 = 0.1;
        let reference = z + z.powi(3) / 18.0 + z.powi(5) / 600.0 + z.powi(7) / 35280.0;
        assert_relative_eq!(shi(0.1), reference, max_relative = 1e-14);
        assert!((shi(0.1) - 0.100_055_572_225_057).abs() < 1e-15);
    }

    #[test]
    fn shi_cubic_expansion() {
        // z + z³/18 leaves the z⁵/600 term, 1.67e-13 at z = 0.01.
        let residual = shi(0.01) - (0.01 + 1e-6 / 18.0);
        assert!((residual - 1e-10 / 600.0).abs() < 1e-18, "{residual:e}");
    }

    #[test]
    fn shi_one() {
        assert!((shi(1.0) - 1.057_250_875_375_728_5).abs() < 1e-15);
    }

    #[test]
    fn shi_overflow_is_reported() {
        assert!(matches!(shi_checked(800.0), Err(Error::Overflow { .. })));
        assert_eq!(shi(800.0), f64::INFINITY);
        assert_eq!(shi(-800.0), f64::NEG_INFINITY);
        assert!(shi_checked(700.0).unwrap().is_finite());
    }

    #[test]
    fn si_values() {
        assert_eq!(si(0.0), 0.0);
        assert!((si(PI) - 1.851_937_051_982_466).abs() < 1e-13);
        assert!((si(50.0) - FRAC_PI_2).abs() < 0.02);
        assert!((si(1e6) - FRAC_PI_2).abs() < 2e-6);
        assert!(si_checked(f64::NAN).is_err());
    }

    #[test]
    fn si_regimes_join_continuously() {
        for edge in [SERIES_LIMIT, SI_ASYMPTOTIC] {
            let below = si(edge * (1.0 - 1e-12));
            let above = si(edge * (1.0 + 1e-12));
            assert!((below - above).abs() < 1e-11, "{edge}: {below} vs {above}");
        }
    }

    #[test]
    fn sinc_kernel_values() {
        assert_eq!(sinc_kernel(0.0), 1.0);
        assert!(sinc_kernel(PI).abs() < 1e-16);
        assert_relative_eq!(sinc_kernel(0.5), 0.958_851_077_208_406, max_relative = 1e-14);
        assert_relative_eq!(sinc_kernel(5e-5), (5e-5f64).sin() / 5e-5, max_relative = 1e-15);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn si_is_odd(z in -40.0f64..40.0) {
                prop_assert_eq!(si(-z), -si(z));
            }

            #[test]
            fn sinc_is_even_and_bounded(w in -100.0f64..100.0) {
                prop_assert_eq!(sinc_kernel(w), sinc_kernel(-w));
                prop_assert!(sinc_kernel(w).abs() <= 1.0);
            }

            #[test]
            fn shi_derivative_matches_integrand(z in 0.05f64..9.0) {
                let h = 1e-5;
                let fd = (shi(z + h) - shi(z - h)) / (2.0 * h);
                prop_assert!((fd - z.sinh() / z).abs() < 1e-6);
            }
        }
    }
}
