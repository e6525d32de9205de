//! Error metrics, spectra, phase, Madelung velocity, vorticity, and
//! circulation probes used by the benchmark comparisons.
//!
//! The velocity field is the density-floored Madelung construction
//! `u = Im(conj(psi) grad(psi)) / max(|psi|^2, floor)` with spectral
//! gradients; the floor regularizes vortex cores where the density vanishes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, ComplexField, Grid, Representation};

/// Relative density floor used when no explicit value is passed: the floor is
/// this fraction of the peak density.
pub const DEFAULT_DENSITY_FLOOR_REL: f64 = 1e-6;

/// Signed pointwise density deviation `|psi_c|^2 - |psi_q|^2`.
pub fn density_error_field(psi_c: &ComplexField, psi_q: &ComplexField) -> Result<Vec<f64>> {
    if psi_c.grid() != psi_q.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(psi_c
        .values()
        .iter()
        .zip(psi_q.values().iter())
        .map(|(a, b)| a.norm_sqr() - b.norm_sqr())
        .collect())
}

/// `|| |psi_c|^2 - |psi_q|^2 ||_2 / || |psi_c|^2 ||_2`.
pub fn relative_l2_error(psi_c: &ComplexField, psi_q: &ComplexField) -> Result<f64> {
    let err = density_error_field(psi_c, psi_q)?;
    let num: f64 = err.iter().map(|e| e * e).sum::<f64>().sqrt();
    let den: f64 = psi_c
        .values()
        .iter()
        .map(|a| a.norm_sqr() * a.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if den == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(num / den)
}

/// Moduli of the spectral coefficients in FFT ordering. Position fields are
/// transformed first; spectral fields are read directly.
pub fn spectrum_magnitudes(field: &ComplexField) -> Result<Vec<f64>> {
    let spectral = match field.representation() {
        Representation::Position => grid::dft_forward(field)?,
        Representation::Spectral => field.clone(),
    };
    Ok(spectral.values().iter().map(|v| v.norm()).collect())
}

/// Wrap an angle to (-pi, pi].
fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(std::f64::consts::TAU);
    if w > std::f64::consts::PI {
        w -= std::f64::consts::TAU;
    }
    w
}

/// Phase of the wave function with the global gauge fixed so the phase at
/// `gauge_point` is zero; wrapped to (-pi, pi].
pub fn phase_field(field: &ComplexField, gauge_point: usize) -> Result<Vec<f64>> {
    let values = field.values();
    if gauge_point >= values.len() {
        return Err(Error::IndexOutOfRange {
            index: gauge_point,
            len: values.len(),
        });
    }
    let gauge = values[gauge_point].arg();
    Ok(values.iter().map(|v| wrap_angle(v.arg() - gauge)).collect())
}

fn spectral_gradient(field: &ComplexField, axis: usize) -> Result<Vec<Complex64>> {
    let g = field.grid();
    let k = g.wavenumbers(axis)?;
    let mut spectral = field.values().to_vec();
    grid::transform_values(&mut spectral, g, false);
    match g.ndim() {
        1 => {
            for (l, v) in spectral.iter_mut().enumerate() {
                *v *= Complex64::new(0.0, k[l]);
            }
        }
        _ => {
            let ny = g.shape()[1];
            for (flat, v) in spectral.iter_mut().enumerate() {
                let kl = if axis == 0 { k[flat / ny] } else { k[flat % ny] };
                *v *= Complex64::new(0.0, kl);
            }
        }
    }
    grid::transform_values(&mut spectral, g, true);
    Ok(spectral)
}

/// Madelung velocity components on the grid, one vector per axis.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub grid: Grid,
    pub components: Vec<Vec<f64>>,
}

/// Density-floored superfluid velocity; `floor_rel` is relative to the peak
/// density and must be positive.
pub fn velocity_field(field: &ComplexField, floor_rel: f64) -> Result<VelocityField> {
    if !floor_rel.is_finite() || floor_rel <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "density floor {floor_rel} must be > 0"
        )));
    }
    let density = field.density();
    let peak = density.iter().cloned().fold(0.0, f64::max);
    let floor = (floor_rel * peak).max(f64::MIN_POSITIVE);
    let mut components = Vec::with_capacity(field.grid().ndim());
    for axis in 0..field.grid().ndim() {
        let grad = spectral_gradient(field, axis)?;
        components.push(
            field
                .values()
                .iter()
                .zip(grad.iter())
                .zip(density.iter())
                .map(|((psi, d), rho)| (psi.conj() * d).im / rho.max(floor))
                .collect(),
        );
    }
    Ok(VelocityField {
        grid: field.grid().clone(),
        components,
    })
}

fn real_spectral_derivative(grid: &Grid, values: &[f64], axis: usize) -> Result<Vec<f64>> {
    let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let field = ComplexField::new(grid.clone(), complex, Representation::Position)?;
    Ok(spectral_gradient(&field, axis)?.iter().map(|v| v.re).collect())
}

/// Vorticity `w = d(u_y)/dx - d(u_x)/dy` of the floored Madelung velocity.
pub fn vorticity_field(field: &ComplexField, floor_rel: f64) -> Result<Vec<f64>> {
    if field.grid().ndim() != 2 {
        return Err(Error::InvalidGrid("vorticity needs a 2D field".into()));
    }
    let u = velocity_field(field, floor_rel)?;
    let duy_dx = real_spectral_derivative(&u.grid, &u.components[1], 0)?;
    let dux_dy = real_spectral_derivative(&u.grid, &u.components[0], 1)?;
    Ok(duy_dx
        .iter()
        .zip(dux_dy.iter())
        .map(|(a, b)| a - b)
        .collect())
}

/// Axis-aligned rectangular loop in index space (periodic wrapping allowed).
#[derive(Debug, Clone, Copy)]
pub struct GridLoop {
    /// (x-index, y-index) of the lower-left corner.
    pub corner: (usize, usize),
    /// Extent in cells along x and y; both must be >= 1.
    pub width: usize,
    pub height: usize,
}

/// Counterclockwise line integral of the velocity around `loop_`, trapezoidal
/// along each edge. Superfluid vortices give values near 2*pi*q.
pub fn circulation(v: &VelocityField, loop_: &GridLoop) -> Result<f64> {
    if v.grid.ndim() != 2 {
        return Err(Error::InvalidGrid("circulation needs a 2D field".into()));
    }
    if loop_.width == 0 || loop_.height == 0 {
        return Err(Error::DegenerateLoop);
    }
    let (nx, ny) = (v.grid.shape()[0], v.grid.shape()[1]);
    let (dx, dy) = (v.grid.spacing(0), v.grid.spacing(1));
    let ux = &v.components[0];
    let uy = &v.components[1];
    let at = |f: &Vec<f64>, ix: usize, iy: usize| f[(ix % nx) * ny + (iy % ny)];
    let (x0, y0) = loop_.corner;
    let (w, h) = (loop_.width, loop_.height);

    let mut total = 0.0;
    for k in 0..w {
        // bottom, left to right
        total += 0.5 * (at(ux, x0 + k, y0) + at(ux, x0 + k + 1, y0)) * dx;
        // top, right to left
        total -= 0.5 * (at(ux, x0 + k, y0 + h) + at(ux, x0 + k + 1, y0 + h)) * dx;
    }
    for k in 0..h {
        // right, bottom to top
        total += 0.5 * (at(uy, x0 + w, y0 + k) + at(uy, x0 + w, y0 + k + 1)) * dy;
        // left, top to bottom
        total -= 0.5 * (at(uy, x0, y0 + k) + at(uy, x0, y0 + k + 1)) * dy;
    }
    Ok(total)
}

/// Per-snapshot deviation between a reference and a test trajectory.
#[derive(Debug, Clone, Copy)]
pub struct SnapshotError {
    pub time: f64,
    pub relative_l2_density_error: f64,
    pub max_pointwise_density_error: f64,
    /// 1 - norm of the reference snapshot.
    pub norm_deficit_reference: f64,
    /// 1 - norm of the test snapshot.
    pub norm_deficit_test: f64,
}

/// Deviation report between two trajectories; the scalar fields carry the
/// final-snapshot values, `snapshots` the full series.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub relative_l2_density_error: f64,
    pub max_pointwise_density_error: f64,
    pub norm_deficit: f64,
    pub snapshots: Vec<SnapshotError>,
}

/// Compare a test trajectory against a reference with matching grids and
/// sample times.
pub fn compare_trajectories(
    reference: &crate::ssfm::Trajectory,
    test: &crate::ssfm::Trajectory,
) -> Result<ErrorReport> {
    if reference.fields.len() != test.fields.len() {
        return Err(Error::LengthMismatch {
            expected: reference.fields.len(),
            found: test.fields.len(),
        });
    }
    let mut snapshots = Vec::with_capacity(reference.fields.len());
    for ((ta, fa), (tb, fb)) in reference
        .times
        .iter()
        .zip(reference.fields.iter())
        .zip(test.times.iter().zip(test.fields.iter()))
    {
        if (ta - tb).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "sample times differ: {ta} vs {tb}"
            )));
        }
        let err = density_error_field(fa, fb)?;
        snapshots.push(SnapshotError {
            time: *ta,
            relative_l2_density_error: relative_l2_error(fa, fb)?,
            max_pointwise_density_error: err.iter().map(|e| e.abs()).fold(0.0, f64::max),
            norm_deficit_reference: 1.0 - fa.l2_norm(),
            norm_deficit_test: 1.0 - fb.l2_norm(),
        });
    }
    let last = *snapshots.last().expect("trajectories hold t = 0");
    Ok(ErrorReport {
        relative_l2_density_error: last.relative_l2_density_error,
        max_pointwise_density_error: last.max_pointwise_density_error,
        norm_deficit: last.norm_deficit_test,
        snapshots,
    })
}
