//! Exact statevector emulation of the quantum circuit components: gate-level
//! QFT, diagonal kinetic/potential phase unitaries, Hadamard-test readout
//! with shot sampling, and a gate-cost ledger.
//!
//! Bit-to-index contract: basis index `l` of an n-qubit register has qubit 0
//! as the most significant bit, so a 2D grid's x-axis qubits occupy the high
//! bits and `l = lx * Ny + ly` matches the grid module's row-major layout.
//!
//! The forward QFT here realizes the same unitary as [`crate::grid::dft_forward`]
//! (matrix entries `exp(-2*pi*i*j*k/N) / sqrt(N)`); bit reversal is handled
//! internally so the two transforms agree index-for-index.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid, Representation};
use crate::ssfm;

/// Amplitudes of an n-qubit register, unit L2 norm.
#[derive(Debug, Clone)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0> on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    /// Wrap a raw amplitude vector; the length must be a power of two and the
    /// norm 1 within 1e-9.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::LengthMismatch {
                expected: amps.len().next_power_of_two().max(2),
                found: amps.len(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NonUnitNorm { norm });
        }
        Ok(StateVector {
            n_qubits: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        debug_assert!(qubit < self.n_qubits);
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Hadamard on one qubit.
    pub fn apply_hadamard(&mut self, qubit: usize) {
        let m = self.mask(qubit);
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let j = i | m;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[j] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    /// Controlled phase: multiply by exp(i*theta) where both qubits are 1.
    pub fn apply_controlled_phase(&mut self, control: usize, target: usize, theta: f64) {
        let mc = self.mask(control);
        let mt = self.mask(target);
        debug_assert_ne!(mc, mt);
        let factor = Complex64::from_polar(1.0, theta);
        let hi = mc.max(mt);
        let lo = mc.min(mt);
        let lo_below = lo - 1;
        let hi_below = hi - 1;
        // enumerate exactly the indices with both bits set
        for i in 0..self.amps.len() / 4 {
            let x = (((i & !lo_below) << 1) | (i & lo_below)) | lo;
            let y = (((x & !hi_below) << 1) | (x & hi_below)) | hi;
            self.amps[y] *= factor;
        }
    }

    /// Swap two qubits.
    pub fn apply_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let ma = self.mask(a);
        let mb = self.mask(b);
        for i in 0..self.amps.len() {
            if i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, i ^ ma ^ mb);
            }
        }
    }

    /// Gate-level QFT on a contiguous qubit block. `inverse` conjugates every
    /// rotation, which realizes the adjoint since the transform is symmetric.
    fn qft_block(&mut self, start: usize, len: usize, inverse: bool) {
        let sign = if inverse { 1.0 } else { -1.0 };
        for l in 0..len {
            self.apply_hadamard(start + l);
            for t in (l + 1)..len {
                let theta = sign * TAU / (1u64 << (t - l + 1)) as f64;
                self.apply_controlled_phase(start + t, start + l, theta);
            }
        }
        for i in 0..len / 2 {
            self.apply_swap(start + i, start + len - 1 - i);
        }
    }

    /// Full-register QFT acting as the unitary DFT matrix on the amplitudes.
    pub fn apply_qft(&mut self, ledger: &mut GateCostLedger) {
        self.qft_block(0, self.n_qubits, false);
        ledger.charge_qft(self.n_qubits);
    }

    /// Inverse of [`Self::apply_qft`].
    pub fn apply_iqft(&mut self, ledger: &mut GateCostLedger) {
        self.qft_block(0, self.n_qubits, true);
        ledger.charge_qft(self.n_qubits);
    }

    /// Per-axis QFT blocks matching a grid's multidimensional DFT. Each axis
    /// block is charged as one QFT on that axis's qubits.
    pub fn apply_qft_grid(&mut self, grid: &Grid, ledger: &mut GateCostLedger) -> Result<()> {
        self.check_grid(grid)?;
        let mut start = 0usize;
        for axis in 0..grid.ndim() {
            let len = grid.qubits(axis) as usize;
            self.qft_block(start, len, false);
            ledger.charge_qft(len);
            start += len;
        }
        Ok(())
    }

    pub fn apply_iqft_grid(&mut self, grid: &Grid, ledger: &mut GateCostLedger) -> Result<()> {
        self.check_grid(grid)?;
        let mut start = 0usize;
        for axis in 0..grid.ndim() {
            let len = grid.qubits(axis) as usize;
            self.qft_block(start, len, true);
            ledger.charge_qft(len);
            start += len;
        }
        Ok(())
    }

    /// Diagonal phase unitary: `amps[l] *= exp(i * phases[l])`.
    pub fn apply_diagonal_phase(&mut self, phases: &[f64]) -> Result<()> {
        if phases.len() != self.amps.len() {
            return Err(Error::LengthMismatch {
                expected: self.amps.len(),
                found: phases.len(),
            });
        }
        for (a, &p) in self.amps.iter_mut().zip(phases.iter()) {
            *a *= Complex64::from_polar(1.0, p);
        }
        Ok(())
    }

    /// Kinetic half-step exp(-i*tau*k^2/4) as the QFT / diagonal / inverse-QFT
    /// sandwich; equivalent to the classical spectral kinetic half-step.
    pub fn apply_kinetic(&mut self, grid: &Grid, tau: f64, ledger: &mut GateCostLedger) -> Result<()> {
        self.check_grid(grid)?;
        let phases = ssfm::kinetic_half_phase(grid, tau);
        self.apply_qft_grid(grid, ledger)?;
        self.apply_diagonal_phase(&phases)?;
        ledger.charge_kinetic_diag(self.n_qubits);
        self.apply_iqft_grid(grid, ledger)?;
        Ok(())
    }

    /// Nonlinear/potential phase gate. `mode_support` is the number of
    /// measured spectral modes backing the diagonal (the full register size
    /// for an exactly known potential); it only affects the depth charge.
    pub fn apply_potential(
        &mut self,
        phases: &[f64],
        mode_support: usize,
        ledger: &mut GateCostLedger,
    ) -> Result<()> {
        self.apply_diagonal_phase(phases)?;
        ledger.charge_potential(mode_support, self.amps.len());
        Ok(())
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.total_qubits() as usize != self.n_qubits {
            return Err(Error::QubitMismatch {
                state: self.n_qubits,
                grid: grid.total_qubits() as usize,
            });
        }
        Ok(())
    }
}

/// Encode a unit-norm field into register amplitudes (index contract shared
/// with the grid module). Rejects fields whose norm is off by more than 1e-9.
pub fn encode(field: &ComplexField) -> Result<StateVector> {
    let norm = field.l2_norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitNorm { norm });
    }
    StateVector::from_amplitudes(field.values().to_vec())
}

/// Decode register amplitudes back into a position-space field on `grid`.
pub fn decode(state: &StateVector, grid: &Grid) -> Result<ComplexField> {
    if grid.total_points() != state.len() {
        return Err(Error::QubitMismatch {
            state: state.n_qubits,
            grid: grid.total_qubits() as usize,
        });
    }
    ComplexField::new(grid.clone(), state.amplitudes().to_vec(), Representation::Position)
}

/// Basic-gate units charged per QFT or per kinetic diagonal on `n` qubits:
/// n(n+1)/2, the pairwise Pauli-Z rotation count of the k^2 decomposition.
pub fn gate_units(n_qubits: usize) -> u64 {
    (n_qubits as u64 * (n_qubits as u64 + 1)) / 2
}

/// Running count of circuit resources consumed by the emulated register.
///
/// Diagonal unitaries are applied exactly to the amplitudes; the ledger is
/// where the elementary-gate decompositions are accounted for. Every QFT and
/// every kinetic diagonal costs n(n+1)/2 basic-gate units; a potential
/// diagonal backed by M measured modes costs min(sparse_diag_factor*M, N)
/// phase-rotation depth units.
#[derive(Debug, Clone)]
pub struct GateCostLedger {
    pub qft_count: u64,
    pub diag_kinetic_count: u64,
    pub diag_potential_count: u64,
    pub basic_gate_units: u64,
    pub circuit_depth_units: u64,
    pub sparse_diag_factor: u64,
}

impl Default for GateCostLedger {
    fn default() -> Self {
        Self::new()
    }
}

impl GateCostLedger {
    pub fn new() -> Self {
        GateCostLedger {
            qft_count: 0,
            diag_kinetic_count: 0,
            diag_potential_count: 0,
            basic_gate_units: 0,
            circuit_depth_units: 0,
            sparse_diag_factor: 2,
        }
    }

    fn charge_qft(&mut self, n_qubits: usize) {
        self.qft_count += 1;
        self.basic_gate_units += gate_units(n_qubits);
        self.circuit_depth_units += gate_units(n_qubits);
    }

    /// Charge one kinetic diagonal (used directly by the hybrid loop, which
    /// interleaves measurement inside the QFT sandwich).
    pub(crate) fn charge_kinetic_diag(&mut self, n_qubits: usize) {
        self.diag_kinetic_count += 1;
        self.basic_gate_units += gate_units(n_qubits);
        self.circuit_depth_units += gate_units(n_qubits);
    }

    fn charge_potential(&mut self, mode_support: usize, register_len: usize) {
        self.diag_potential_count += 1;
        let units = (self.sparse_diag_factor * mode_support as u64).min(register_len as u64);
        self.circuit_depth_units += units;
    }

    /// Pure read of the counters.
    pub fn snapshot(&self) -> GateCostSnapshot {
        GateCostSnapshot {
            qft_count: self.qft_count,
            diag_kinetic_count: self.diag_kinetic_count,
            diag_potential_count: self.diag_potential_count,
            basic_gate_units: self.basic_gate_units,
            circuit_depth_units: self.circuit_depth_units,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateCostSnapshot {
    pub qft_count: u64,
    pub diag_kinetic_count: u64,
    pub diag_potential_count: u64,
    pub basic_gate_units: u64,
    pub circuit_depth_units: u64,
}

/// Which quadrature of the amplitude a Hadamard test estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurePart {
    Real,
    Imag,
}

/// Exact readout or binomial shot sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Exact,
    Shots(u64),
}

/// Shot count plus the seed of the readout's random stream.
#[derive(Debug, Clone, Copy)]
pub struct ShotBudget {
    pub sampling: Sampling,
    pub seed: u64,
}

impl ShotBudget {
    pub fn exact() -> Self {
        ShotBudget {
            sampling: Sampling::Exact,
            seed: 0,
        }
    }

    pub fn with_shots(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidParameter("shot count must be >= 1".into()));
        }
        Ok(ShotBudget {
            sampling: Sampling::Shots(shots),
            seed,
        })
    }

    /// Child budget with an independent stream, derived by counter splitting.
    /// Distinct (time-step, mode, part) tags give distinct streams, so
    /// concurrent readouts stay reproducible.
    pub fn derive(&self, tag: u64) -> ShotBudget {
        ShotBudget {
            sampling: self.sampling,
            seed: split_seed(self.seed, tag),
        }
    }
}

/// splitmix64-style seed mixing for counter-based stream splitting.
pub fn split_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e3779b97f4a7c15);
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Hadamard-test estimate of Re or Im of `<l|psi>` from the emulated register.
///
/// The readout circuits are decoupled from the evolution register, so the
/// input state is never mutated. Exact mode returns the amplitude quadrature
/// itself; shot mode draws the ancilla statistics from Binomial(shots, p)
/// with p = (1 + v)/2 and returns the unbiased estimator 2*s/shots - 1.
pub fn hadamard_test(
    state: &StateVector,
    index: usize,
    part: MeasurePart,
    budget: &ShotBudget,
) -> Result<f64> {
    if index >= state.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: state.len(),
        });
    }
    let amp = state.amplitudes()[index];
    let v = match part {
        MeasurePart::Real => amp.re,
        MeasurePart::Imag => amp.im,
    };
    match budget.sampling {
        Sampling::Exact => Ok(v),
        Sampling::Shots(shots) => {
            let p = (1.0 + v) / 2.0;
            if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                return Err(Error::CorruptProbability { p });
            }
            let p = p.clamp(0.0, 1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
            let dist = Binomial::new(shots, p)
                .map_err(|e| Error::InvalidParameter(format!("binomial: {e}")))?;
            let successes = dist.sample(&mut rng);
            Ok(2.0 * successes as f64 / shots as f64 - 1.0)
        }
    }
}

/// Diagonal of the FFT-ordered integer mode-index operator built from its
/// Pauli-Z decomposition:
///
/// `sum_l k_l |l><l| = -1/2 (I + sum_{j=1..n} 2^{n-j} Z_j) + 2^{n-1} Z_1`
///
/// where `Z_j` acts on qubit j-1 under this module's MSB-first indexing (the
/// j-th most significant qubit). That reading reproduces
/// `k = (0, 1, ..., N/2-1, -N/2, ..., -1)` exactly; the alternative
/// LSB-anchored reading does not.
pub fn pauli_z_mode_diagonal(n_qubits: usize) -> Vec<f64> {
    let n = n_qubits as u32;
    let len = 1usize << n_qubits;
    (0..len)
        .map(|l| {
            let mut acc = 1.0; // identity term
            for j in 1..=n {
                let bit = (l >> (n - j)) & 1;
                let z = if bit == 0 { 1.0 } else { -1.0 };
                acc += (1u64 << (n - j)) as f64 * z;
            }
            let z1 = if (l >> (n - 1)) & 1 == 0 { 1.0 } else { -1.0 };
            -0.5 * acc + (1u64 << (n - 1)) as f64 * z1
        })
        .collect()
}
