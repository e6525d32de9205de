//! Classical split-step Fourier solver: the symmetric Strang-split spectral
//! propagator used as the ground-truth reference for the hybrid method.
//!
//! One step applies `F^-1 exp(-i tau k^2/4) F`, then the nonlinear phase
//! `exp(-i tau (g C |a|^2 + V))` evaluated on the intermediate field, then a
//! second kinetic half-step. With `merge_halves` the trailing half of one
//! step fuses with the leading half of the next into a single full kinetic
//! step; the diagonal factors compose exactly, so results are unchanged.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, ComplexField, Grid, Representation};

/// External potential sampled on a grid at time t.
pub type PotentialFn = Arc<dyn Fn(&Grid, f64) -> Vec<f64> + Send + Sync>;

/// V = 0 everywhere.
pub fn zero_potential() -> PotentialFn {
    Arc::new(|grid: &Grid, _t: f64| vec![0.0; grid.total_points()])
}

/// Time step, coupling, potential, and density-scale convention for one run.
///
/// The nonlinear term is `g * density_scale * |a|^2` with `a` the unit-norm
/// amplitudes, so `density_scale * |a|^2` is the physical density. Scenarios
/// that absorb the scale into `g` (the soliton convention) use
/// `density_scale = 1`.
#[derive(Clone)]
pub struct SsfmConfig {
    pub tau: f64,
    pub g: f64,
    pub potential: PotentialFn,
    pub density_scale: f64,
    pub merge_halves: bool,
}

impl SsfmConfig {
    pub fn new(tau: f64, g: f64) -> Self {
        SsfmConfig {
            tau,
            g,
            potential: zero_potential(),
            density_scale: 1.0,
            merge_halves: true,
        }
    }

    pub fn with_potential(mut self, potential: PotentialFn) -> Self {
        self.potential = potential;
        self
    }

    pub fn with_density_scale(mut self, c: f64) -> Self {
        self.density_scale = c;
        self
    }

    pub fn with_merge(mut self, merge: bool) -> Self {
        self.merge_halves = merge;
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.tau.is_finite() || self.tau == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tau = {} must be finite and non-zero",
                self.tau
            )));
        }
        if !self.density_scale.is_finite() || self.density_scale <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "density_scale = {} must be > 0",
                self.density_scale
            )));
        }
        Ok(())
    }
}

/// Sampled times and field snapshots of one evolution.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<ComplexField>,
}

impl Trajectory {
    pub fn last(&self) -> &ComplexField {
        self.fields.last().expect("trajectory holds at least t = 0")
    }
}

/// Spectral phase of one kinetic half-step: `-(tau/4) * sum_d k_d^2` over
/// FFT-ordered flat indices.
pub fn kinetic_half_phase(grid: &Grid, tau: f64) -> Vec<f64> {
    let factor = -tau / 4.0;
    match grid.ndim() {
        1 => grid
            .wavenumbers(0)
            .expect("axis 0 exists")
            .iter()
            .map(|k| factor * k * k)
            .collect(),
        _ => {
            let kx = grid.wavenumbers(0).expect("axis 0 exists");
            let ky = grid.wavenumbers(1).expect("axis 1 exists");
            let mut out = Vec::with_capacity(grid.total_points());
            for x in &kx {
                let x2 = x * x;
                for y in &ky {
                    out.push(factor * (x2 + y * y));
                }
            }
            out
        }
    }
}

/// Nonlinear phase `-tau (g C |a|^2 + V(x, t))` over position indices, with
/// `a` the unit-norm amplitudes of `field`.
pub fn nonlinear_phase(field: &ComplexField, config: &SsfmConfig, t: f64) -> Result<Vec<f64>> {
    if field.representation() != Representation::Position {
        return Err(Error::RepresentationMismatch {
            expected: Representation::Position,
            found: field.representation(),
        });
    }
    let v = (config.potential)(field.grid(), t);
    let norm_sqr: f64 = field.values().iter().map(|a| a.norm_sqr()).sum();
    let gc = config.g * config.density_scale / norm_sqr.max(f64::MIN_POSITIVE);
    Ok(field
        .values()
        .iter()
        .zip(v.iter())
        .map(|(a, v)| -config.tau * (gc * a.norm_sqr() + v))
        .collect())
}

fn apply_phases(values: &mut [Complex64], phases: &[f64]) {
    for (v, &p) in values.iter_mut().zip(phases.iter()) {
        *v *= Complex64::from_polar(1.0, p);
    }
}

fn kinetic_round_trip(field: &mut ComplexField, phases: &[f64]) {
    let grid = field.grid().clone();
    let values = field.values_mut();
    grid::transform_values(values, &grid, false);
    apply_phases(values, phases);
    grid::transform_values(values, &grid, true);
}

/// One full Strang step from time `t`: kinetic half, nonlinear phase on the
/// intermediate field, kinetic half.
pub fn strang_step(field: &ComplexField, config: &SsfmConfig, t: f64) -> Result<ComplexField> {
    config.validate()?;
    if field.representation() != Representation::Position {
        return Err(Error::RepresentationMismatch {
            expected: Representation::Position,
            found: field.representation(),
        });
    }
    let norm = field.l2_norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitNorm { norm });
    }
    let half = kinetic_half_phase(field.grid(), config.tau);
    let mut psi = field.clone();
    kinetic_round_trip(&mut psi, &half);
    let phases = nonlinear_phase(&psi, config, t)?;
    apply_phases(psi.values_mut(), &phases);
    kinetic_round_trip(&mut psi, &half);
    Ok(psi)
}

pub(crate) fn steps_for(t_end: f64, tau: f64) -> Result<usize> {
    if t_end < 0.0 {
        return Err(Error::InvalidParameter(format!("t_end = {t_end} must be >= 0")));
    }
    let steps = (t_end / tau).round();
    if (steps * tau - t_end).abs() > 1e-9 * t_end.abs().max(1.0) {
        return Err(Error::NotTimeStepMultiple { t_end, tau });
    }
    Ok(steps as usize)
}

pub(crate) fn check_norm(norm: f64, step: usize) -> Result<()> {
    if !norm.is_finite() || (norm - 1.0).abs() > 0.1 {
        return Err(Error::Numerical { step, norm });
    }
    Ok(())
}

/// Evolve `initial` to `t_end`, recording a snapshot every `sample_every`
/// steps (t = 0 and the final step are always included).
pub fn evolve(
    initial: &ComplexField,
    config: &SsfmConfig,
    t_end: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    config.validate()?;
    if sample_every == 0 {
        return Err(Error::InvalidParameter("sample_every must be >= 1".into()));
    }
    let norm = initial.l2_norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitNorm { norm });
    }
    let n_steps = steps_for(t_end, config.tau)?;

    let mut times = vec![0.0];
    let mut fields = vec![initial.clone()];
    if n_steps == 0 {
        return Ok(Trajectory { times, fields });
    }

    let grid = initial.grid().clone();
    let half = kinetic_half_phase(&grid, config.tau);
    let full: Vec<f64> = half.iter().map(|p| 2.0 * p).collect();

    let mut psi = initial.clone();
    let mut pending_half = false;
    for step in 0..n_steps {
        let t = step as f64 * config.tau;
        // opening kinetic: full when the previous step deferred its trailing half
        kinetic_round_trip(&mut psi, if pending_half { &full } else { &half });
        let phases = nonlinear_phase(&psi, config, t)?;
        apply_phases(psi.values_mut(), &phases);

        let is_last = step + 1 == n_steps;
        let sample_here = is_last || (step + 1) % sample_every == 0;
        if config.merge_halves && !sample_here {
            pending_half = true;
        } else {
            kinetic_round_trip(&mut psi, &half);
            pending_half = false;
            check_norm(psi.l2_norm(), step + 1)?;
            if sample_here {
                times.push((step + 1) as f64 * config.tau);
                fields.push(psi.clone());
            }
        }
    }
    Ok(Trajectory { times, fields })
}
