//! Hybrid quantum-classical split-step Fourier solver for the nonlinear
//! Schrödinger equation.
//!
//! The crate provides three solver paths over the same periodic grids:
//!
//! * [`ssfm`] — the classical Strang-split spectral propagator, used as the
//!   ground-truth reference.
//! * [`qsim`] — an exact statevector emulation of the quantum circuit
//!   (gate-level QFT, diagonal phase unitaries, Hadamard-test readout) with a
//!   gate-cost ledger.
//! * [`hybrid`] — the measurement-driven loop: propagate the register, read
//!   out a filtered set of low-frequency spectral coefficients, reconstruct
//!   the nonlinear potential classically, rebuild the phase gate, iterate.
//!
//! [`scenarios`] packages the benchmark problems (1D bright soliton, 2D
//! Gaussian packet, 2D superfluid flow past a moving cylinder),
//! [`diagnostics`] the error/phase/vorticity probes, [`io`] the artifact
//! formats, and [`cli`] the run orchestration behind the `qssfm` binary.
//!
//! See the crate examples for one runnable program per capability.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod hybrid;
pub mod io;
pub mod qsim;
pub mod scenarios;
pub mod ssfm;

#[cfg(test)]
pub(crate) mod testsupport;

pub use error::{Error, Result};
pub use grid::{dft_forward, dft_inverse, ComplexField, Grid, Representation};
