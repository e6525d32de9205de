//! The measurement-driven hybrid loop: propagate the statevector through the
//! split-step circuit, read out a filtered set of low-frequency spectral
//! coefficients with Hadamard tests, reconstruct the nonlinear potential on
//! the classical side, rebuild the phase gate, and iterate.
//!
//! Readout happens in the spectral frame immediately after the kinetic
//! diagonal, so the retained set is a fixed index set. The register itself is
//! never collapsed or filtered; truncation only enters through the
//! reconstructed potential. Estimates that leave the unit disc under shot
//! noise are kept unclipped (clipping would bias the estimator); downstream
//! normalization absorbs them.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, ComplexField, Grid, Representation};
use crate::qsim::{self, GateCostLedger, MeasurePart, ShotBudget, StateVector};
use crate::ssfm::{self, PotentialFn, SsfmConfig, Trajectory};

/// Per-axis retained-mode counts, parameterized by retained qubits
/// `m_d = log2 M_d`.
///
/// Along each axis the retained set is the first `M/2` (positive
/// low-frequency) and last `M/2` (negative low-frequency) FFT-ordered modes;
/// the multi-axis set is their tensor product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterSpec {
    m: Vec<u32>,
}

impl FilterSpec {
    pub fn new(m: &[u32]) -> Result<Self> {
        if m.is_empty() || m.len() > 2 {
            return Err(Error::InvalidParameter(format!(
                "filter needs 1 or 2 axes, got {}",
                m.len()
            )));
        }
        if m.iter().any(|&md| md == 0) {
            return Err(Error::InvalidParameter(
                "retained qubits must be >= 1 per axis".into(),
            ));
        }
        Ok(FilterSpec { m: m.to_vec() })
    }

    /// No filtering: keep every mode of `grid`.
    pub fn full(grid: &Grid) -> Self {
        FilterSpec {
            m: (0..grid.ndim()).map(|axis| grid.qubits(axis)).collect(),
        }
    }

    pub fn retained_qubits(&self) -> &[u32] {
        &self.m
    }

    /// Per-axis retained mode counts M_d.
    pub fn mode_counts(&self) -> Vec<usize> {
        self.m.iter().map(|&md| 1usize << md).collect()
    }

    /// Total retained modes |S|.
    pub fn total_modes(&self) -> usize {
        self.mode_counts().iter().product()
    }

    fn axis_set(&self, axis: usize, n: usize) -> Result<Vec<usize>> {
        let m = 1usize << self.m[axis];
        if m > n {
            return Err(Error::FilterTooWide {
                axis,
                retained: m,
                available: n,
            });
        }
        let half = m / 2;
        let mut set: Vec<usize> = (0..half).collect();
        set.extend(n - half..n);
        Ok(set)
    }
}

/// Ordered flat spectral indices retained by `filter` on `grid`.
pub fn retained_indices(filter: &FilterSpec, grid: &Grid) -> Result<Vec<usize>> {
    if filter.m.len() != grid.ndim() {
        return Err(Error::InvalidParameter(format!(
            "filter has {} axes but the grid has {}",
            filter.m.len(),
            grid.ndim()
        )));
    }
    match grid.ndim() {
        1 => filter.axis_set(0, grid.shape()[0]),
        _ => {
            let sx = filter.axis_set(0, grid.shape()[0])?;
            let sy = filter.axis_set(1, grid.shape()[1])?;
            let ny = grid.shape()[1];
            let mut out = Vec::with_capacity(sx.len() * sy.len());
            for &x in &sx {
                for &y in &sy {
                    out.push(x * ny + y);
                }
            }
            Ok(out)
        }
    }
}

/// Exact readout or logically simulated hardware readout with shot noise and
/// re-preparation accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityMode {
    Ideal,
    EmulatedHardware,
}

/// Full parameter set of one hybrid run.
#[derive(Clone)]
pub struct HybridConfig {
    pub tau: f64,
    pub g: f64,
    pub density_scale: f64,
    pub potential: PotentialFn,
    pub filter: FilterSpec,
    pub normalize_reconstruction: bool,
    pub fidelity_mode: FidelityMode,
    pub shot_budget: ShotBudget,
    pub merge_halves: bool,
}

impl HybridConfig {
    /// Ideal-readout config with no filtering on `grid`.
    pub fn ideal(grid: &Grid, tau: f64, g: f64) -> Self {
        HybridConfig {
            tau,
            g,
            density_scale: 1.0,
            potential: ssfm::zero_potential(),
            filter: FilterSpec::full(grid),
            normalize_reconstruction: false,
            fidelity_mode: FidelityMode::Ideal,
            shot_budget: ShotBudget::exact(),
            merge_halves: true,
        }
    }

    /// The classical config that evolves the same equation.
    pub fn classical(&self) -> SsfmConfig {
        SsfmConfig {
            tau: self.tau,
            g: self.g,
            potential: self.potential.clone(),
            density_scale: self.density_scale,
            merge_halves: self.merge_halves,
        }
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        if !self.tau.is_finite() || self.tau <= 0.0 {
            return Err(Error::InvalidParameter(format!("tau = {} must be > 0", self.tau)));
        }
        if !self.density_scale.is_finite() || self.density_scale <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "density_scale = {} must be > 0",
                self.density_scale
            )));
        }
        if self.fidelity_mode == FidelityMode::EmulatedHardware {
            if let qsim::Sampling::Exact = self.shot_budget.sampling {
                return Err(Error::InvalidParameter(
                    "emulated-hardware mode needs a finite shot budget".into(),
                ));
            }
        }
        retained_indices(&self.filter, grid).map(|_| ())
    }
}

/// Resource consumption of one hybrid step.
///
/// `depth_units` is the circuit depth of one preparation circuit for this
/// step's readouts: the plain per-step charge in Ideal mode (the persistent
/// register just advances), times the step number in EmulatedHardware mode
/// (each readout circuit re-prepares from t0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCost {
    pub step: usize,
    pub shots: u64,
    pub depth_units: u64,
    pub repreparations: u64,
    /// L2 norm of the raw reconstruction before optional renormalization;
    /// the per-step norm deficit induced by filtering.
    pub recon_norm: f64,
}

/// Accumulated cost of a hybrid run plus the analytic runtime model.
#[derive(Debug, Clone, Default)]
pub struct CostReport {
    pub total_shots: u64,
    pub total_repreparations: u64,
    pub cumulative_depth_units: u64,
    /// Closed-form runtime model `M * shots * n^2 * N_t (N_t + 1)` in
    /// unit-normalized model units, not wall-clock. Ideal runs evaluate it
    /// with one shot per circuit.
    pub predicted_runtime_units: f64,
    pub per_step: Vec<StepCost>,
}

impl CostReport {
    fn push(&mut self, cost: StepCost) {
        self.total_shots += cost.shots;
        self.total_repreparations += cost.repreparations;
        self.cumulative_depth_units += cost.depth_units * cost.repreparations.max(1);
        self.per_step.push(cost);
    }
}

/// Runtime model of the filtered method: summing `2 M shots t_j n^2` over
/// steps gives `M * shots * n^2 * N_t (N_t + 1)`; the factor 2 covers the
/// separate real and imaginary readout circuits.
pub fn predicted_runtime(n_t: u64, m: u64, n_qubits: u64, shots: u64) -> f64 {
    let exact = (m as u128)
        * (shots as u128)
        * (n_qubits as u128 * n_qubits as u128)
        * (n_t as u128)
        * (n_t as u128 + 1);
    exact as f64
}

/// Hadamard-test readout of the retained spectral coefficients.
///
/// The supplied state must already sit in the spectral frame (after the QFT
/// and kinetic diagonal). Ideal mode returns the exact amplitudes; hardware
/// mode samples two circuits per mode on independently derived streams.
pub fn measure_retained_modes(
    state: &StateVector,
    retained: &[usize],
    budget: &ShotBudget,
    mode: FidelityMode,
) -> Result<BTreeMap<usize, Complex64>> {
    if retained.is_empty() {
        return Err(Error::EmptyRetainedSet);
    }
    let mut coeffs = BTreeMap::new();
    for &l in retained {
        let (re, im) = match mode {
            FidelityMode::Ideal => {
                let exact = ShotBudget::exact();
                (
                    qsim::hadamard_test(state, l, MeasurePart::Real, &exact)?,
                    qsim::hadamard_test(state, l, MeasurePart::Imag, &exact)?,
                )
            }
            FidelityMode::EmulatedHardware => (
                qsim::hadamard_test(state, l, MeasurePart::Real, &budget.derive(2 * l as u64))?,
                qsim::hadamard_test(state, l, MeasurePart::Imag, &budget.derive(2 * l as u64 + 1))?,
            ),
        };
        coeffs.insert(l, Complex64::new(re, im));
    }
    Ok(coeffs)
}

/// Zero-pad the measured coefficients onto the full spectral grid, inverse
/// transform to position space, and optionally renormalize.
pub fn reconstruct_field(
    coeffs: &BTreeMap<usize, Complex64>,
    grid: &Grid,
    normalize: bool,
) -> Result<ComplexField> {
    let mut spectral = vec![Complex64::new(0.0, 0.0); grid.total_points()];
    for (&l, &c) in coeffs {
        if l >= spectral.len() {
            return Err(Error::IndexOutOfRange {
                index: l,
                len: spectral.len(),
            });
        }
        spectral[l] = c;
    }
    grid::transform_values(&mut spectral, grid, true);
    let field = ComplexField::new(grid.clone(), spectral, Representation::Position)?;
    if normalize {
        field.normalized()
    } else {
        Ok(field)
    }
}

/// Phase array of the reconstructed nonlinear gate:
/// `-tau (g C |recon|^2 + V(x, t))` at every grid point.
pub fn build_potential_phases(
    recon: &ComplexField,
    config: &HybridConfig,
    t: f64,
) -> Result<Vec<f64>> {
    if recon.representation() != Representation::Position {
        return Err(Error::RepresentationMismatch {
            expected: Representation::Position,
            found: recon.representation(),
        });
    }
    let v = (config.potential)(recon.grid(), t);
    let gc = config.g * config.density_scale;
    Ok(recon
        .values()
        .iter()
        .zip(v.iter())
        .map(|(a, v)| -config.tau * (gc * a.norm_sqr() + v))
        .collect())
}

struct StepPlan {
    opening_full: bool,
    defer_trailing: bool,
}

fn step_core(
    state: &mut StateVector,
    config: &HybridConfig,
    grid: &Grid,
    retained: &[usize],
    t: f64,
    step_index: usize,
    plan: &StepPlan,
    ledger: &mut GateCostLedger,
) -> Result<StepCost> {
    let half = ssfm::kinetic_half_phase(grid, config.tau);
    let depth_before = ledger.circuit_depth_units;

    // linear propagation into the spectral frame
    state.apply_qft_grid(grid, ledger)?;
    if plan.opening_full {
        let full: Vec<f64> = half.iter().map(|p| 2.0 * p).collect();
        state.apply_diagonal_phase(&full)?;
    } else {
        state.apply_diagonal_phase(&half)?;
    }
    ledger.charge_kinetic_diag(state.n_qubits());

    // filtered readout at the spectral point
    let step_budget = config.shot_budget.derive(step_index as u64);
    let coeffs = measure_retained_modes(state, retained, &step_budget, config.fidelity_mode)?;

    state.apply_iqft_grid(grid, ledger)?;

    // classical reconstruction drives the nonlinear gate
    let raw = reconstruct_field(&coeffs, grid, false)?;
    let recon_norm = raw.l2_norm();
    let recon = if config.normalize_reconstruction {
        raw.normalized()?
    } else {
        raw
    };
    let phases = build_potential_phases(&recon, config, t)?;
    state.apply_potential(&phases, retained.len(), ledger)?;

    if !plan.defer_trailing {
        state.apply_qft_grid(grid, ledger)?;
        state.apply_diagonal_phase(&half)?;
        ledger.charge_kinetic_diag(state.n_qubits());
        state.apply_iqft_grid(grid, ledger)?;
    }

    let step_depth = ledger.circuit_depth_units - depth_before;
    let m = retained.len() as u64;
    let (shots, repreparations, depth_units) = match config.fidelity_mode {
        FidelityMode::Ideal => (0, 0, step_depth),
        FidelityMode::EmulatedHardware => {
            let per_circuit = match config.shot_budget.sampling {
                qsim::Sampling::Shots(s) => s,
                qsim::Sampling::Exact => 0,
            };
            (
                2 * m * per_circuit,
                2 * m,
                (step_index as u64 + 1) * step_depth,
            )
        }
    };
    Ok(StepCost {
        step: step_index + 1,
        shots,
        depth_units,
        repreparations,
        recon_norm,
    })
}

/// One full hybrid step (plain half-kinetic opening and closing) starting at
/// time `t`. The register is advanced in place; the returned cost row records
/// the step's readout and depth consumption.
pub fn hybrid_step(
    state: &mut StateVector,
    config: &HybridConfig,
    grid: &Grid,
    t: f64,
    ledger: &mut GateCostLedger,
) -> Result<StepCost> {
    config.validate(grid)?;
    let retained = retained_indices(&config.filter, grid)?;
    let step_index = (t / config.tau).round().max(0.0) as usize;
    step_core(
        state,
        config,
        grid,
        &retained,
        t,
        step_index,
        &StepPlan {
            opening_full: false,
            defer_trailing: false,
        },
        ledger,
    )
}

/// Evolve `initial` with the hybrid loop, sampling decoded snapshots every
/// `sample_every` steps. Interior half-kinetic pairs fuse into full kinetic
/// steps when `merge_halves` is set; snapshots force the pending half closed.
pub fn evolve_hybrid(
    initial: &ComplexField,
    config: &HybridConfig,
    t_end: f64,
    sample_every: usize,
) -> Result<(Trajectory, CostReport)> {
    let grid = initial.grid().clone();
    config.validate(&grid)?;
    if sample_every == 0 {
        return Err(Error::InvalidParameter("sample_every must be >= 1".into()));
    }
    let retained = retained_indices(&config.filter, &grid)?;
    let n_steps = ssfm::steps_for(t_end, config.tau)?;

    let mut state = qsim::encode(initial)?;
    let mut ledger = GateCostLedger::new();
    let mut report = CostReport::default();
    let mut times = vec![0.0];
    let mut fields = vec![initial.clone()];

    let mut pending_half = false;
    for step in 0..n_steps {
        let t = step as f64 * config.tau;
        let is_last = step + 1 == n_steps;
        let sample_here = is_last || (step + 1) % sample_every == 0;
        let plan = StepPlan {
            opening_full: pending_half,
            defer_trailing: config.merge_halves && !sample_here,
        };
        let cost = step_core(
            &mut state,
            config,
            &grid,
            &retained,
            t,
            step,
            &plan,
            &mut ledger,
        )?;
        report.push(cost);
        pending_half = plan.defer_trailing;
        if !plan.defer_trailing {
            ssfm::check_norm(state.norm(), step + 1)?;
            if sample_here {
                times.push((step + 1) as f64 * config.tau);
                fields.push(qsim::decode(&state, &grid)?);
            }
        }
    }

    let shots_model = match config.shot_budget.sampling {
        qsim::Sampling::Shots(s) if config.fidelity_mode == FidelityMode::EmulatedHardware => s,
        _ => 1,
    };
    report.predicted_runtime_units = predicted_runtime(
        n_steps as u64,
        retained.len() as u64,
        grid.total_qubits() as u64,
        shots_model,
    );
    Ok((Trajectory { times, fields }, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testsupport::{assert_close, max_abs_diff, random_field};
    use std::sync::Arc;

    fn sech_soliton(grid: &Grid) -> ComplexField {
        ComplexField::from_fn(grid.clone(), |x| {
            let u = x[0] / std::f64::consts::SQRT_2;
            Complex64::from_polar(1.0 / (std::f64::consts::SQRT_2 * u.cosh()), x[0])
        })
    }

    fn soliton_grid() -> Grid {
        Grid::new(&[256], &[20.0], &[-10.0]).unwrap()
    }

    fn soliton_hybrid_config(grid: &Grid, m: u32) -> HybridConfig {
        let raw = sech_soliton(grid);
        let g = -raw.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
        let mut cfg = HybridConfig::ideal(grid, 0.001, g);
        cfg.filter = FilterSpec::new(&[m]).unwrap();
        cfg.normalize_reconstruction = true;
        cfg
    }

    #[test]
    fn retained_indices_1d_convention() {
        let g = Grid::new(&[8], &[1.0], &[0.0]).unwrap();
        let f = FilterSpec::new(&[2]).unwrap(); // M = 4
        assert_eq!(retained_indices(&f, &g).unwrap(), vec![0, 1, 6, 7]);
    }

    #[test]
    fn retained_indices_full_filter_keeps_everything() {
        let g = Grid::new(&[16], &[1.0], &[0.0]).unwrap();
        let f = FilterSpec::full(&g);
        assert_eq!(retained_indices(&f, &g).unwrap(), (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn retained_indices_2d_tensor_product() {
        let g = Grid::new(&[8, 4], &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let f = FilterSpec::new(&[2, 1]).unwrap(); // M = (4, 2)
        let s = retained_indices(&f, &g).unwrap();
        assert_eq!(s.len(), 8);
        let expected: Vec<usize> = [0usize, 1, 6, 7]
            .iter()
            .flat_map(|&x| [0usize, 3].iter().map(move |&y| x * 4 + y))
            .collect();
        assert_eq!(s, expected);
    }

    #[test]
    fn retained_indices_rejects_oversized_filter() {
        let g = Grid::new(&[8], &[1.0], &[0.0]).unwrap();
        let f = FilterSpec::new(&[4]).unwrap(); // M = 16 > 8
        assert!(matches!(
            retained_indices(&f, &g),
            Err(Error::FilterTooWide { .. })
        ));
    }

    #[test]
    fn filter_spec_rejects_zero_qubits() {
        assert!(FilterSpec::new(&[0]).is_err());
        assert!(FilterSpec::new(&[]).is_err());
    }

    #[test]
    fn measure_pure_retained_mode() {
        let g = Grid::new(&[8], &[1.0], &[0.0]).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[1] = Complex64::new(1.0, 0.0);
        let state = StateVector::from_amplitudes(amps).unwrap();
        let s = retained_indices(&FilterSpec::new(&[2]).unwrap(), &g).unwrap();
        let coeffs =
            measure_retained_modes(&state, &s, &ShotBudget::exact(), FidelityMode::Ideal).unwrap();
        assert_close(coeffs[&1].re, 1.0, 1e-15);
        for (&l, c) in &coeffs {
            if l != 1 {
                assert_close(c.norm(), 0.0, 1e-15);
            }
        }
    }

    #[test]
    fn measure_mode_outside_filter_sees_nothing() {
        let g = Grid::new(&[8], &[1.0], &[0.0]).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[3] = Complex64::new(1.0, 0.0); // outside {0,1,6,7}
        let state = StateVector::from_amplitudes(amps).unwrap();
        let s = retained_indices(&FilterSpec::new(&[2]).unwrap(), &g).unwrap();
        let coeffs =
            measure_retained_modes(&state, &s, &ShotBudget::exact(), FidelityMode::Ideal).unwrap();
        assert!(coeffs.values().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn measure_matches_spectrum_of_decoded_state() {
        let g = Grid::new(&[64], &[4.0], &[0.0]).unwrap();
        let f = random_field(&g, 8);
        let mut state = qsim::encode(&f).unwrap();
        let mut ledger = GateCostLedger::new();
        state.apply_qft_grid(&g, &mut ledger).unwrap();
        let s = retained_indices(&FilterSpec::new(&[3]).unwrap(), &g).unwrap();
        let coeffs =
            measure_retained_modes(&state, &s, &ShotBudget::exact(), FidelityMode::Ideal).unwrap();
        let spectrum = grid::dft_forward(&f).unwrap();
        for (&l, c) in &coeffs {
            assert!((c - spectrum.values()[l]).norm() < 1e-13);
        }
    }

    #[test]
    fn measure_rejects_empty_set() {
        let state = StateVector::zero_state(2);
        assert!(matches!(
            measure_retained_modes(&state, &[], &ShotBudget::exact(), FidelityMode::Ideal),
            Err(Error::EmptyRetainedSet)
        ));
    }

    #[test]
    fn reconstruct_full_set_round_trips() {
        let g = Grid::new(&[32], &[2.0], &[0.0]).unwrap();
        let f = random_field(&g, 14);
        let spectrum = grid::dft_forward(&f).unwrap();
        let coeffs: BTreeMap<usize, Complex64> = spectrum
            .values()
            .iter()
            .enumerate()
            .map(|(l, &c)| (l, c))
            .collect();
        let recon = reconstruct_field(&coeffs, &g, false).unwrap();
        assert!(max_abs_diff(recon.values(), f.values()) < 1e-12);
    }

    #[test]
    fn reconstruct_delta_normalized_is_uniform() {
        let g = Grid::new(&[16], &[1.0], &[0.0]).unwrap();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0usize, Complex64::new(0.3, 0.0));
        let recon = reconstruct_field(&coeffs, &g, true).unwrap();
        let expect = 1.0 / 4.0;
        for v in recon.values() {
            assert_close(v.norm(), expect, 1e-13);
        }
    }

    #[test]
    fn reconstruct_all_zero_normalize_errors() {
        let g = Grid::new(&[8], &[1.0], &[0.0]).unwrap();
        let coeffs = BTreeMap::new();
        assert!(matches!(
            reconstruct_field(&coeffs, &g, true),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn truncated_soliton_reconstruction_loses_norm() {
        let g = soliton_grid();
        let psi = sech_soliton(&g).normalized().unwrap();
        let spectrum = grid::dft_forward(&psi).unwrap();
        let s = retained_indices(&FilterSpec::new(&[4]).unwrap(), &g).unwrap();
        let coeffs: BTreeMap<usize, Complex64> =
            s.iter().map(|&l| (l, spectrum.values()[l])).collect();
        let recon = reconstruct_field(&coeffs, &g, false).unwrap();
        let norm = recon.l2_norm();
        assert!(norm < 1.0, "truncation must shed norm, got {norm}");
        assert!(norm > 0.9, "m=4 keeps the dominant modes, got {norm}");
    }

    #[test]
    fn potential_phases_match_classical_when_exact() {
        let g = soliton_grid();
        let psi = sech_soliton(&g).normalized().unwrap();
        let cfg = soliton_hybrid_config(&g, 8);
        let phases = build_potential_phases(&psi, &cfg, 0.0).unwrap();
        let classical = ssfm::nonlinear_phase(&psi, &cfg.classical(), 0.0).unwrap();
        for (a, b) in phases.iter().zip(classical.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn potential_phases_zero_cases() {
        let g = Grid::new(&[8], &[1.0], &[0.0]).unwrap();
        let zero = ComplexField::zeros(g.clone(), Representation::Position);
        let cfg = HybridConfig::ideal(&g, 0.1, 3.0);
        let phases = build_potential_phases(&zero, &cfg, 0.0).unwrap();
        assert!(phases.iter().all(|p| *p == 0.0));

        // g = 0 leaves only the external potential
        let f = random_field(&g, 3);
        let mut cfg = HybridConfig::ideal(&g, 0.1, 0.0);
        cfg.potential = Arc::new(|grid: &Grid, _| {
            (0..grid.total_points()).map(|i| i as f64).collect()
        });
        let phases = build_potential_phases(&f, &cfg, 0.0).unwrap();
        for (i, p) in phases.iter().enumerate() {
            assert_close(*p, -0.1 * i as f64, 1e-15);
        }
    }

    #[test]
    fn hybrid_step_equals_strang_step_when_unfiltered() {
        let g = soliton_grid();
        let psi = sech_soliton(&g).normalized().unwrap();
        let mut cfg = soliton_hybrid_config(&g, 8);
        cfg.normalize_reconstruction = false;

        let mut state = qsim::encode(&psi).unwrap();
        let mut ledger = GateCostLedger::new();
        hybrid_step(&mut state, &cfg, &g, 0.0, &mut ledger).unwrap();
        let classical = ssfm::strang_step(&psi, &cfg.classical(), 0.0).unwrap();
        assert!(max_abs_diff(state.amplitudes(), classical.values()) < 1e-12);
    }

    #[test]
    fn free_propagation_ignores_filtering() {
        let g = Grid::new(&[64], &[8.0], &[-4.0]).unwrap();
        let f = random_field(&g, 77);
        let mut cfg = HybridConfig::ideal(&g, 0.01, 0.0);
        cfg.filter = FilterSpec::new(&[2]).unwrap();
        let mut state = qsim::encode(&f).unwrap();
        let mut ledger = GateCostLedger::new();
        hybrid_step(&mut state, &cfg, &g, 0.0, &mut ledger).unwrap();
        let classical = ssfm::strang_step(&f, &cfg.classical(), 0.0).unwrap();
        assert!(max_abs_diff(state.amplitudes(), classical.values()) < 1e-12);
    }

    #[test]
    fn unfiltered_ideal_trajectory_matches_classical() {
        // primary oracle-equivalence property over 120 steps
        let g = soliton_grid();
        let psi = sech_soliton(&g).normalized().unwrap();
        let mut cfg = soliton_hybrid_config(&g, 8);
        cfg.normalize_reconstruction = false;
        let (traj, report) = evolve_hybrid(&psi, &cfg, 0.12, 20).unwrap();
        let classical = ssfm::evolve(&psi, &cfg.classical(), 0.12, 20).unwrap();
        assert_eq!(traj.times, classical.times);
        for (a, b) in traj.fields.iter().zip(classical.fields.iter()) {
            assert!(max_abs_diff(a.values(), b.values()) < 1e-10);
        }
        assert_eq!(report.total_repreparations, 0);
        assert_eq!(report.total_shots, 0);
    }

    #[test]
    fn evolve_zero_steps() {
        let g = Grid::new(&[8], &[1.0], &[0.0]).unwrap();
        let f = random_field(&g, 4);
        let cfg = HybridConfig::ideal(&g, 0.1, 0.0);
        let (traj, report) = evolve_hybrid(&f, &cfg, 0.0, 1).unwrap();
        assert_eq!(traj.times, vec![0.0]);
        assert!(report.per_step.is_empty());
        assert_eq!(report.total_shots, 0);
    }

    #[test]
    fn merged_and_unmerged_hybrid_agree() {
        let g = soliton_grid();
        let psi = sech_soliton(&g).normalized().unwrap();
        let cfg = soliton_hybrid_config(&g, 4);
        let mut unmerged = cfg.clone();
        unmerged.merge_halves = false;
        let (a, _) = evolve_hybrid(&psi, &cfg, 0.05, 10).unwrap();
        let (b, _) = evolve_hybrid(&psi, &unmerged, 0.05, 10).unwrap();
        for (x, y) in a.fields.iter().zip(b.fields.iter()) {
            assert!(max_abs_diff(x.values(), y.values()) < 1e-12);
        }
    }

    #[test]
    fn renormalization_keeps_argmax_and_phase_structure() {
        let g = soliton_grid();
        let psi = sech_soliton(&g).normalized().unwrap();
        let spectrum = grid::dft_forward(&psi).unwrap();
        let s = retained_indices(&FilterSpec::new(&[4]).unwrap(), &g).unwrap();
        let coeffs: BTreeMap<usize, Complex64> =
            s.iter().map(|&l| (l, spectrum.values()[l])).collect();
        let plain = reconstruct_field(&coeffs, &g, false).unwrap();
        let renorm = reconstruct_field(&coeffs, &g, true).unwrap();
        let argmax = |f: &ComplexField| {
            f.density()
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0
        };
        assert_eq!(argmax(&plain), argmax(&renorm));
        // uniform rescale: phases identical
        for (a, b) in plain.values().iter().zip(renorm.values().iter()) {
            if a.norm() > 1e-12 {
                let ratio = b / a;
                assert_close(ratio.im.atan2(ratio.re), 0.0, 1e-12);
            }
        }
    }

    #[test]
    fn emulated_hardware_accounting() {
        let g = Grid::new(&[32], &[4.0], &[0.0]).unwrap();
        let f = random_field(&g, 50);
        let mut cfg = HybridConfig::ideal(&g, 0.01, -1.0);
        cfg.filter = FilterSpec::new(&[3]).unwrap(); // M = 8
        cfg.fidelity_mode = FidelityMode::EmulatedHardware;
        cfg.shot_budget = ShotBudget::with_shots(200, 7).unwrap();
        cfg.normalize_reconstruction = true;
        let steps = 5usize;
        let (_, report) = evolve_hybrid(&f, &cfg, 0.05, 1).unwrap();
        assert_eq!(report.total_repreparations, (2 * 8 * steps) as u64);
        assert_eq!(report.total_shots, (2 * 8 * 200 * steps) as u64);
        assert_eq!(report.per_step.len(), steps);
        // re-preparation depth grows with the step index
        assert!(report.per_step[4].depth_units > report.per_step[0].depth_units);
    }

    #[test]
    fn emulated_hardware_converges_to_ideal_with_shots() {
        // per-step reconstructed-potential max error scales like 1/sqrt(shots)
        let g = soliton_grid();
        let psi = sech_soliton(&g).normalized().unwrap();
        let base = soliton_hybrid_config(&g, 4);
        let retained = retained_indices(&base.filter, &g).unwrap();

        let mut state = qsim::encode(&psi).unwrap();
        let mut ledger = GateCostLedger::new();
        state.apply_qft_grid(&g, &mut ledger).unwrap();
        let ideal =
            measure_retained_modes(&state, &retained, &ShotBudget::exact(), FidelityMode::Ideal)
                .unwrap();
        let ideal_recon = reconstruct_field(&ideal, &g, true).unwrap();
        let ideal_phases = build_potential_phases(&ideal_recon, &base, 0.0).unwrap();

        let mut errors = Vec::new();
        for &shots in &[1_000u64, 10_000, 100_000] {
            let mut worst: f64 = 0.0;
            for seed in 0..6u64 {
                let budget = ShotBudget::with_shots(shots, 1000 + seed).unwrap();
                let noisy = measure_retained_modes(
                    &state,
                    &retained,
                    &budget,
                    FidelityMode::EmulatedHardware,
                )
                .unwrap();
                let recon = reconstruct_field(&noisy, &g, true).unwrap();
                let phases = build_potential_phases(&recon, &base, 0.0).unwrap();
                let err = phases
                    .iter()
                    .zip(ideal_phases.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                worst = worst.max(err);
            }
            errors.push(worst);
        }
        let slope = (errors[2].ln() - errors[0].ln()) / ((100_000f64).ln() - (1_000f64).ln());
        assert!(
            (slope + 0.5).abs() < 0.15,
            "slope {slope}, errors {errors:?}"
        );
    }

    #[test]
    fn predicted_runtime_closed_form() {
        assert_eq!(predicted_runtime(1, 1, 1, 1), 2.0);
        assert_eq!(predicted_runtime(10, 16, 8, 1000), 112_640_000.0);
        // doubling N_t approaches a factor of 4
        let r = predicted_runtime(2000, 16, 8, 10) / predicted_runtime(1000, 16, 8, 10);
        assert!((r - 4.0).abs() < 0.01);
    }

    #[test]
    fn emulated_mode_requires_finite_shots() {
        let g = Grid::new(&[8], &[1.0], &[0.0]).unwrap();
        let f = random_field(&g, 1);
        let mut cfg = HybridConfig::ideal(&g, 0.1, 0.0);
        cfg.fidelity_mode = FidelityMode::EmulatedHardware;
        assert!(evolve_hybrid(&f, &cfg, 0.1, 1).is_err());
    }
}
