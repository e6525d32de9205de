//! Uniform periodic grids, FFT-ordered wavenumbers, complex fields, and the
//! unitary DFT pair shared by the classical and quantum solver paths.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * The DFT is unitary in both directions (1/sqrt(N) forward and inverse),
//!   so the classical spectral transform and the emulated QFT are the same
//!   matrix.
//! * Wavenumbers use FFT (wraparound) ordering:
//!   `k[l] = (2*pi/L) * l` for `l < N/2` and `(2*pi/L) * (l - N)` otherwise.
//! * 2D fields are stored row-major with axis 0 = x: flat index
//!   `l = lx * Ny + ly`. The statevector module maps qubits onto the same
//!   index with qubit 0 as the most significant bit.

use std::f64::consts::TAU;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Which space the samples of a [`ComplexField`] live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Spectral,
}

/// Uniform periodic grid in one or two dimensions with power-of-two axis sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    shape: Vec<usize>,
    lengths: Vec<f64>,
    origins: Vec<f64>,
}

impl Grid {
    /// Build a grid from per-axis point counts, domain lengths, and left endpoints.
    pub fn new(shape: &[usize], lengths: &[f64], origins: &[f64]) -> Result<Self> {
        let ndim = shape.len();
        if ndim == 0 || ndim > 2 {
            return Err(Error::InvalidGrid(format!(
                "{ndim} dimensions requested; only 1 and 2 are supported"
            )));
        }
        if lengths.len() != ndim || origins.len() != ndim {
            return Err(Error::InvalidGrid(format!(
                "shape/lengths/origins have mismatched dimension counts {}/{}/{}",
                ndim,
                lengths.len(),
                origins.len()
            )));
        }
        for (axis, &n) in shape.iter().enumerate() {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::NotPowerOfTwo { axis, len: n });
            }
        }
        for (axis, &len) in lengths.iter().enumerate() {
            if !len.is_finite() || len <= 0.0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis} has non-positive length {len}"
                )));
            }
        }
        Ok(Grid {
            shape: shape.to_vec(),
            lengths: lengths.to_vec(),
            origins: origins.to_vec(),
        })
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn origins(&self) -> &[f64] {
        &self.origins
    }

    /// Grid spacing along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.shape[axis] as f64
    }

    pub fn total_points(&self) -> usize {
        self.shape.iter().product()
    }

    /// Qubits needed to index `axis`: log2 of the axis size.
    pub fn qubits(&self, axis: usize) -> u32 {
        self.shape[axis].trailing_zeros()
    }

    pub fn total_qubits(&self) -> u32 {
        self.shape.iter().map(|n| n.trailing_zeros()).sum()
    }

    /// Physical coordinate of point `i` along `axis`.
    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        self.origins[axis] + i as f64 * self.spacing(axis)
    }

    /// FFT-ordered wavenumber vector for `axis`.
    pub fn wavenumbers(&self, axis: usize) -> Result<Vec<f64>> {
        if axis >= self.ndim() {
            return Err(Error::AxisOutOfRange {
                axis,
                ndim: self.ndim(),
            });
        }
        let n = self.shape[axis];
        let dk = TAU / self.lengths[axis];
        Ok((0..n)
            .map(|l| {
                if l < n / 2 {
                    dk * l as f64
                } else {
                    dk * (l as f64 - n as f64)
                }
            })
            .collect())
    }

    /// Row-major flat index of a multi-index.
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.ndim());
        match self.ndim() {
            1 => multi[0],
            _ => multi[0] * self.shape[1] + multi[1],
        }
    }

    /// Multi-index of a row-major flat index.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        match self.ndim() {
            1 => vec![flat],
            _ => vec![flat / self.shape[1], flat % self.shape[1]],
        }
    }
}

/// Discretized complex field on a [`Grid`], tagged with its representation.
#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
    representation: Representation,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<Complex64>, representation: Representation) -> Result<Self> {
        if values.len() != grid.total_points() {
            return Err(Error::LengthMismatch {
                expected: grid.total_points(),
                found: values.len(),
            });
        }
        Ok(ComplexField {
            grid,
            values,
            representation,
        })
    }

    pub fn zeros(grid: Grid, representation: Representation) -> Self {
        let n = grid.total_points();
        ComplexField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
            representation,
        }
    }

    /// Build a position-space field by evaluating `f` at every grid point.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.total_points());
        match grid.ndim() {
            1 => {
                for i in 0..grid.shape()[0] {
                    values.push(f(&[grid.coordinate(0, i)]));
                }
            }
            _ => {
                for ix in 0..grid.shape()[0] {
                    let x = grid.coordinate(0, ix);
                    for iy in 0..grid.shape()[1] {
                        values.push(f(&[x, grid.coordinate(1, iy)]));
                    }
                }
            }
        }
        ComplexField {
            grid,
            values,
            representation: Representation::Position,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Unit-norm copy of this field. Errors on an all-zero field.
    pub fn normalized(&self) -> Result<ComplexField> {
        let norm = self.l2_norm();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / norm;
        let values = self.values.iter().map(|v| v * inv).collect();
        Ok(ComplexField {
            grid: self.grid.clone(),
            values,
            representation: self.representation,
        })
    }

    /// Pointwise |psi|^2.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

/// L2 norm of a field.
pub fn l2_norm(field: &ComplexField) -> f64 {
    field.l2_norm()
}

/// Unit-norm copy of a field; errors on an all-zero field.
pub fn normalize(field: &ComplexField) -> Result<ComplexField> {
    field.normalized()
}

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().expect("fft planner poisoned");
    if inverse {
        p.plan_fft_inverse(len)
    } else {
        p.plan_fft_forward(len)
    }
}

fn transpose(src: &[Complex64], rows: usize, cols: usize, dst: &mut [Complex64]) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// In-place multidimensional DFT with no normalization applied.
fn raw_transform(values: &mut [Complex64], shape: &[usize], inverse: bool) {
    match shape.len() {
        1 => {
            plan(shape[0], inverse).process(values);
        }
        _ => {
            let (nx, ny) = (shape[0], shape[1]);
            // rows: contiguous length-ny transforms
            let row_fft = plan(ny, inverse);
            for row in values.chunks_exact_mut(ny) {
                row_fft.process(row);
            }
            // columns: transpose, transform the now-contiguous x lines, transpose back
            let mut scratch = vec![Complex64::new(0.0, 0.0); values.len()];
            transpose(values, nx, ny, &mut scratch);
            let col_fft = plan(nx, inverse);
            for line in scratch.chunks_exact_mut(nx) {
                col_fft.process(line);
            }
            transpose(&scratch, ny, nx, values);
        }
    }
}

fn transform(field: &ComplexField, inverse: bool) -> Result<ComplexField> {
    let expected = if inverse {
        Representation::Spectral
    } else {
        Representation::Position
    };
    if field.representation != expected {
        return Err(Error::RepresentationMismatch {
            expected,
            found: field.representation,
        });
    }
    let mut values = field.values.clone();
    raw_transform(&mut values, field.grid.shape(), inverse);
    let scale = 1.0 / (field.grid.total_points() as f64).sqrt();
    for v in values.iter_mut() {
        *v *= scale;
    }
    Ok(ComplexField {
        grid: field.grid.clone(),
        values,
        representation: if inverse {
            Representation::Position
        } else {
            Representation::Spectral
        },
    })
}

/// Unitary forward DFT: position -> spectral, norm preserved.
pub fn dft_forward(field: &ComplexField) -> Result<ComplexField> {
    transform(field, false)
}

/// Unitary inverse DFT: spectral -> position, norm preserved.
pub fn dft_inverse(field: &ComplexField) -> Result<ComplexField> {
    transform(field, true)
}

/// Unitary in-place transform of a raw amplitude buffer laid out on `grid`.
/// Shared by the field transforms above and the statevector spectral paths.
pub(crate) fn transform_values(values: &mut [Complex64], grid: &Grid, inverse: bool) {
    raw_transform(values, grid.shape(), inverse);
    let scale = 1.0 / (grid.total_points() as f64).sqrt();
    for v in values.iter_mut() {
        *v *= scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testsupport::{assert_close, dft_direct, random_field, unit_random_values};
    use proptest::prelude::*;

    #[test]
    fn make_grid_derives_spacing() {
        let g = Grid::new(&[256], &[40.0], &[-20.0]).unwrap();
        assert_eq!(g.spacing(0), 0.15625);
        assert_eq!(g.total_points(), 256);
        assert_eq!(g.total_qubits(), 8);
        assert_eq!(g.coordinate(0, 0), -20.0);
    }

    #[test]
    fn make_grid_cylinder_is_sixteen_qubits() {
        let g = Grid::new(&[512, 128], &[200.0, 50.0], &[-100.0, -25.0]).unwrap();
        assert_eq!(g.total_qubits(), 16);
        assert_eq!(g.qubits(0), 9);
        assert_eq!(g.qubits(1), 7);
    }

    #[test]
    fn make_grid_rejects_non_power_of_two() {
        match Grid::new(&[3], &[1.0], &[0.0]) {
            Err(Error::NotPowerOfTwo { axis: 0, len: 3 }) => {}
            other => panic!("expected NotPowerOfTwo, got {other:?}"),
        }
    }

    #[test]
    fn make_grid_rejects_bad_lengths_and_dims() {
        assert!(Grid::new(&[4], &[0.0], &[0.0]).is_err());
        assert!(Grid::new(&[4], &[-1.0], &[0.0]).is_err());
        assert!(Grid::new(&[4, 4, 4], &[1.0, 1.0, 1.0], &[0.0, 0.0, 0.0]).is_err());
        assert!(Grid::new(&[], &[], &[]).is_err());
    }

    #[test]
    fn wavenumbers_match_fft_ordering() {
        let g = Grid::new(&[4], &[TAU], &[0.0]).unwrap();
        assert_eq!(g.wavenumbers(0).unwrap(), vec![0.0, 1.0, -2.0, -1.0]);

        let g2 = Grid::new(&[2], &[TAU], &[0.0]).unwrap();
        assert_eq!(g2.wavenumbers(0).unwrap(), vec![0.0, -1.0]);

        // N=8, L=4*pi: dk = 0.5
        let g3 = Grid::new(&[8], &[2.0 * TAU], &[0.0]).unwrap();
        let k = g3.wavenumbers(0).unwrap();
        let expected = [0.0, 0.5, 1.0, 1.5, -2.0, -1.5, -1.0, -0.5];
        for (a, b) in k.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn wavenumbers_axis_out_of_range() {
        let g = Grid::new(&[4], &[1.0], &[0.0]).unwrap();
        assert!(matches!(
            g.wavenumbers(1),
            Err(Error::AxisOutOfRange { axis: 1, ndim: 1 })
        ));
    }

    #[test]
    fn wavenumber_endpoints() {
        for n in [2usize, 4, 16, 64] {
            let l = 3.7;
            let g = Grid::new(&[n], &[l], &[0.0]).unwrap();
            let k = g.wavenumbers(0).unwrap();
            assert_eq!(k[0], 0.0);
            assert_close(k[n / 2], -(TAU / l) * (n as f64 / 2.0), 1e-12);
        }
    }

    #[test]
    fn dft_of_delta_is_uniform() {
        let g = Grid::new(&[4], &[1.0], &[0.0]).unwrap();
        let mut f = ComplexField::zeros(g, Representation::Position);
        f.values_mut()[0] = Complex64::new(1.0, 0.0);
        let out = dft_forward(&f).unwrap();
        for v in out.values() {
            assert_close(v.re, 0.5, 1e-14);
            assert_close(v.im, 0.0, 1e-14);
        }
    }

    #[test]
    fn dft_of_uniform_is_delta() {
        let g = Grid::new(&[16], &[1.0], &[0.0]).unwrap();
        let amp = 1.0 / 4.0;
        let f = ComplexField::new(
            g.clone(),
            vec![Complex64::new(amp, 0.0); 16],
            Representation::Position,
        )
        .unwrap();
        let out = dft_forward(&f).unwrap();
        assert_close((out.values()[0] - Complex64::new(1.0, 0.0)).norm(), 0.0, 1e-13);
        for v in &out.values()[1..] {
            assert!(v.norm() < 1e-13);
        }
    }

    #[test]
    fn dft_matches_direct_summation() {
        let g = Grid::new(&[16], &[2.0], &[-1.0]).unwrap();
        let f = random_field(&g, 7);
        let fast = dft_forward(&f).unwrap();
        let slow = dft_direct(f.values(), g.shape(), false);
        for (a, b) in fast.values().iter().zip(slow.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
        let back = dft_inverse(&fast).unwrap();
        let slow_inv = dft_direct(fast.values(), g.shape(), true);
        for (a, b) in back.values().iter().zip(slow_inv.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn dft_matches_direct_summation_2d() {
        let g = Grid::new(&[8, 4], &[2.0, 1.0], &[0.0, 0.0]).unwrap();
        let f = random_field(&g, 11);
        let fast = dft_forward(&f).unwrap();
        let slow = dft_direct(f.values(), g.shape(), false);
        for (a, b) in fast.values().iter().zip(slow.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn dft_matrix_matches_direct_for_small_sizes() {
        for n in [2usize, 4, 8, 16, 32] {
            let g = Grid::new(&[n], &[1.0], &[0.0]).unwrap();
            for col in 0..n {
                let mut f = ComplexField::zeros(g.clone(), Representation::Position);
                f.values_mut()[col] = Complex64::new(1.0, 0.0);
                let fast = dft_forward(&f).unwrap();
                let slow = dft_direct(f.values(), g.shape(), false);
                for (a, b) in fast.values().iter().zip(slow.iter()) {
                    assert!((a - b).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn parseval_holds_at_large_n() {
        let g = Grid::new(&[4096], &[10.0], &[-5.0]).unwrap();
        let f = random_field(&g, 42);
        let norm_before = f.l2_norm();
        let out = dft_forward(&f).unwrap();
        assert_close(out.l2_norm(), norm_before, 1e-12);
    }

    #[test]
    fn round_trip_recovers_field() {
        let g = Grid::new(&[64, 8], &[4.0, 2.0], &[0.0, 0.0]).unwrap();
        let f = random_field(&g, 3);
        let back = dft_inverse(&dft_forward(&f).unwrap()).unwrap();
        for (a, b) in back.values().iter().zip(f.values().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(back.representation(), Representation::Position);
    }

    #[test]
    fn representation_tags_are_enforced() {
        let g = Grid::new(&[4], &[1.0], &[0.0]).unwrap();
        let f = ComplexField::zeros(g.clone(), Representation::Spectral);
        assert!(matches!(
            dft_forward(&f),
            Err(Error::RepresentationMismatch { .. })
        ));
        let p = ComplexField::zeros(g, Representation::Position);
        assert!(matches!(
            dft_inverse(&p),
            Err(Error::RepresentationMismatch { .. })
        ));
    }

    #[test]
    fn norm_and_normalize() {
        let g = Grid::new(&[2], &[1.0], &[0.0]).unwrap();
        let f = ComplexField::new(
            g.clone(),
            vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)],
            Representation::Position,
        )
        .unwrap();
        assert_close(f.l2_norm(), 5.0, 1e-15);
        let n = f.normalized().unwrap();
        assert_close(n.values()[0].re, 0.6, 1e-15);
        assert_close(n.values()[1].re, 0.8, 1e-15);

        let z = ComplexField::zeros(g, Representation::Position);
        assert!(matches!(z.normalized(), Err(Error::ZeroNorm)));
    }

    #[test]
    fn flat_index_contract_2d() {
        let g = Grid::new(&[4, 2], &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(g.flat_index(&[1, 0]), 2);
        assert_eq!(g.multi_index(7), vec![3, 1]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn prop_round_trip_and_parseval(exp in 1usize..8, seed in 0u64..1000) {
            let n = 1usize << exp;
            let g = Grid::new(&[n], &[1.5], &[0.0]).unwrap();
            let f = ComplexField::new(g, unit_random_values(n, seed), Representation::Position).unwrap();
            let fwd = dft_forward(&f).unwrap();
            prop_assert!((fwd.l2_norm() - f.l2_norm()).abs() < 1e-12);
            let back = dft_inverse(&fwd).unwrap();
            for (a, b) in back.values().iter().zip(f.values().iter()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
