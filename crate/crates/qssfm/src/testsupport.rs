//! Test-only oracles: brute-force DFT summation and seeded random fields.
//! Kept independent of the fast paths they are used to check.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{ComplexField, Grid, Representation};

/// O(N^2)-per-axis direct DFT summation, unitary normalization.
/// `inverse` flips the exponent sign. Supports the same 1D/2D row-major
/// layout as the grid module but shares none of its code path.
pub fn dft_direct(values: &[Complex64], shape: &[usize], inverse: bool) -> Vec<Complex64> {
    let sign = if inverse { 1.0 } else { -1.0 };
    match shape.len() {
        1 => {
            let n = shape[0];
            let scale = 1.0 / (n as f64).sqrt();
            (0..n)
                .map(|k| {
                    let mut sum = Complex64::new(0.0, 0.0);
                    for (j, v) in values.iter().enumerate() {
                        let angle = sign * TAU * (j * k) as f64 / n as f64;
                        sum += v * Complex64::from_polar(1.0, angle);
                    }
                    sum * scale
                })
                .collect()
        }
        2 => {
            let (nx, ny) = (shape[0], shape[1]);
            let scale = 1.0 / ((nx * ny) as f64).sqrt();
            let mut out = vec![Complex64::new(0.0, 0.0); nx * ny];
            for kx in 0..nx {
                for ky in 0..ny {
                    let mut sum = Complex64::new(0.0, 0.0);
                    for jx in 0..nx {
                        for jy in 0..ny {
                            let angle = sign
                                * TAU
                                * ((jx * kx) as f64 / nx as f64 + (jy * ky) as f64 / ny as f64);
                            sum += values[jx * ny + jy] * Complex64::from_polar(1.0, angle);
                        }
                    }
                    out[kx * ny + ky] = sum * scale;
                }
            }
            out
        }
        d => panic!("dft_direct supports 1 or 2 dimensions, got {d}"),
    }
}

/// Seeded random complex values normalized to unit L2.
pub fn unit_random_values(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    for v in values.iter_mut() {
        *v /= norm;
    }
    values
}

/// Seeded random unit-norm position-space field on `grid`.
pub fn random_field(grid: &Grid, seed: u64) -> ComplexField {
    ComplexField::new(
        grid.clone(),
        unit_random_values(grid.total_points(), seed),
        Representation::Position,
    )
    .unwrap()
}

pub fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

/// Max pointwise modulus difference between two complex slices.
pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
