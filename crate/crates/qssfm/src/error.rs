//! Crate-wide error type and `Result` alias.

use std::fmt;

use crate::grid::Representation;

#[derive(Debug)]
pub enum Error {
    /// A grid axis length is not a power of two (amplitude encoding needs 2^n points).
    NotPowerOfTwo { axis: usize, len: usize },
    /// Grid construction rejected (bad dimension count, non-positive length, ...).
    InvalidGrid(String),
    AxisOutOfRange { axis: usize, ndim: usize },
    /// A field carried the wrong representation tag for the requested transform.
    RepresentationMismatch {
        expected: Representation,
        found: Representation,
    },
    /// An array argument had the wrong number of entries.
    LengthMismatch { expected: usize, found: usize },
    /// Encoding requires a unit-norm field (within 1e-9).
    NonUnitNorm { norm: f64 },
    /// Normalization of an all-zero field.
    ZeroNorm,
    IndexOutOfRange { index: usize, len: usize },
    /// State register size does not match the grid.
    QubitMismatch { state: usize, grid: usize },
    EmptyRetainedSet,
    /// Per-axis retained mode count exceeds the grid axis size.
    FilterTooWide {
        axis: usize,
        retained: usize,
        available: usize,
    },
    /// Two fields live on different grids.
    GridMismatch,
    /// Evolution horizon is not an integer multiple of the time step.
    NotTimeStepMultiple { t_end: f64, tau: f64 },
    /// A Hadamard-test outcome probability left the unit interval; the
    /// register norm is corrupt.
    CorruptProbability { p: f64 },
    /// Circulation loop with zero extent.
    DegenerateLoop,
    InvalidParameter(String),
    /// CLI/config schema violation.
    Config(String),
    /// Norm blow-up detected during time stepping.
    Numerical { step: usize, norm: f64 },
    Io(std::io::Error),
    /// Malformed artifact file (bad magic, truncated payload, ...).
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPowerOfTwo { axis, len } => {
                write!(f, "axis {axis} has {len} points; grid sizes must be powers of two")
            }
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::AxisOutOfRange { axis, ndim } => {
                write!(f, "axis {axis} out of range for a {ndim}-dimensional grid")
            }
            Error::RepresentationMismatch { expected, found } => {
                write!(f, "expected a {expected:?} field, found {found:?}")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} entries, found {found}")
            }
            Error::NonUnitNorm { norm } => {
                write!(f, "field norm {norm} is not 1 within 1e-9; normalize before encoding")
            }
            Error::ZeroNorm => write!(f, "cannot normalize an all-zero field"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::QubitMismatch { state, grid } => {
                write!(f, "state register has {state} qubits but the grid needs {grid}")
            }
            Error::EmptyRetainedSet => write!(f, "retained mode set is empty"),
            Error::FilterTooWide {
                axis,
                retained,
                available,
            } => write!(
                f,
                "filter keeps {retained} modes on axis {axis} but the grid has only {available}"
            ),
            Error::GridMismatch => write!(f, "fields live on different grids"),
            Error::NotTimeStepMultiple { t_end, tau } => {
                write!(f, "t_end = {t_end} is not an integer multiple of tau = {tau}")
            }
            Error::CorruptProbability { p } => {
                write!(f, "measurement probability {p} outside [0,1]; register norm corrupt")
            }
            Error::DegenerateLoop => write!(f, "circulation loop has zero extent"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Numerical { step, norm } => {
                write!(f, "norm blew up to {norm} at step {step}")
            }
            Error::Io(e) => write!(f, "i/o error: {e}"),
            Error::Format(msg) => write!(f, "malformed file: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}
