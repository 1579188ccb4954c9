//! One-dimensional quadrature: fixed node/weight rules for the transform's
//! double integral and an adaptive Simpson integrator for special functions
//! and reference values.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Trapezoid,
    Midpoint,
}

/// `count` nodes and weights of a composite rule on `[a, b]`.
///
/// The trapezoid rule needs at least two nodes; with a single node it falls
/// back to the midpoint rule.
pub fn nodes(rule: Rule, a: f64, b: f64, count: usize) -> Vec<(f64, f64)> {
    assert!(count >= 1, "quadrature needs at least one node");
    let span = b - a;
    match rule {
        Rule::Trapezoid if count >= 2 => {
            let h = span / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    let w = if i == 0 || i == count - 1 { 0.5 * h } else { h };
                    let x = if i == count - 1 { b } else { a + i as f64 * h };
                    (x, w)
                })
                .collect()
        }
        _ => {
            let h = span / count as f64;
            (0..count).map(|i| (a + (i as f64 + 0.5) * h, h)).collect()
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

impl Estimate {
    pub fn into_result(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NotConverged {
                estimate: self.value,
                error: self.error,
            })
        }
    }
}

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integration of `f` over `[a, b]` with Richardson
/// correction. `tol` is an absolute target for the whole interval.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Estimate {
    if a == b {
        return Estimate {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut acc = Estimate {
        value: 0.0,
        error: 0.0,
        converged: true,
    };
    simpson_step(f, [a, m, b], [fa, fm, fb], whole, tol, MAX_DEPTH, &mut acc);
    acc
}

fn simpson_step(
    f: &impl Fn(f64) -> f64,
    [a, m, b]: [f64; 3],
    [fa, fm, fb]: [f64; 3],
    whole: f64,
    tol: f64,
    depth: u32,
    acc: &mut Estimate,
) {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || !delta.is_finite() {
        acc.value += left + right;
        acc.error += delta.abs() / 15.0;
        acc.converged = false;
        return;
    }
    // Stop on the 15·tol criterion (floored at rounding level of the
    // local estimate), or once the interval can no longer be split.
    let magnitude = (b - a) / 12.0 * (fa.abs() + 4.0 * flm.abs() + 2.0 * fm.abs() + 4.0 * frm.abs() + fb.abs());
    let floor = 64.0 * f64::EPSILON * magnitude;
    if delta.abs() <= (15.0 * tol).max(floor) || lm <= a || rm >= b {
        acc.value += left + right + delta / 15.0;
        acc.error += delta.abs() / 15.0;
        return;
    }
    simpson_step(f, [a, lm, m], [fa, flm, fm], left, 0.5 * tol, depth - 1, acc);
    simpson_step(f, [m, rm, b], [fm, frm, fb], right, 0.5 * tol, depth - 1, acc);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_nodes_cover_endpoints() {
        let n = nodes(Rule::Trapezoid, 1.0, 2.0, 5);
        assert_eq!(n.first().unwrap().0, 1.0);
        assert_eq!(n.last().unwrap().0, 2.0);
        let total: f64 = n.iter().map(|p| p.1).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn midpoint_nodes_are_symmetric() {
        let n = nodes(Rule::Midpoint, -1.0, 1.0, 4);
        let xs: Vec<f64> = n.iter().map(|p| p.0).collect();
        assert_eq!(xs, vec![-0.75, -0.25, 0.25, 0.75]);
        assert!(n.iter().all(|p| p.1 == 0.5));
    }

    #[test]
    fn single_trapezoid_node_falls_back_to_midpoint() {
        assert_eq!(nodes(Rule::Trapezoid, 0.0, 2.0, 1), vec![(1.0, 2.0)]);
    }

    #[test]
    fn rules_integrate_linear_functions_exactly() {
        for rule in [Rule::Trapezoid, Rule::Midpoint] {
            let s: f64 = nodes(rule, 0.0, 3.0, 7).iter().map(|&(x, w)| w * (2.0 * x + 1.0)).sum();
            assert!((s - 12.0).abs() < 1e-13, "{rule:?}: {s}");
        }
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let est = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13);
        assert!(est.converged);
        assert!((est.value - (1f64.exp() - 1.0)).abs() < 1e-12);
        let est = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13);
        assert!((est.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_flags_non_convergence() {
        let est = adaptive_simpson(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-12);
        assert!(!est.converged);
        assert!(est.into_result().is_err());
    }
}
