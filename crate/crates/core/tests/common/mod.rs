#![allow(dead_code)]

use csit_core::grid::{ComplexSeries, RealSeries, UniformGrid};
use csit_core::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_real(grid: UniformGrid, rng: &mut StdRng) -> RealSeries {
    let values = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    RealSeries::new(grid, values).unwrap()
}

pub fn random_complex(grid: UniformGrid, rng: &mut StdRng) -> ComplexSeries {
    let values = (0..grid.len())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexSeries::new(grid, values).unwrap()
}

/// Random real trigonometric polynomial with modes `1..=kmax` (in units of
/// `2π/L`).
pub fn band_limited(grid: UniformGrid, kmax: usize, rng: &mut StdRng) -> RealSeries {
    let terms: Vec<(f64, f64)> = (1..=kmax)
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let l = grid.length();
    let x0 = grid.x0();
    RealSeries::from_fn(grid, |x| {
        terms
            .iter()
            .enumerate()
            .map(|(m, (a, b))| {
                let w = 2.0 * PI * (m + 1) as f64 * (x - x0) / l;
                a * w.cos() + b * w.sin()
            })
            .sum()
    })
    .unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}
