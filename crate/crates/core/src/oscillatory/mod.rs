//! Van der Corput bounds with rough amplitudes, in one variable for phases
//! with a nonvanishing derivative and in several variables for polynomial
//! phases.

mod amplitude;
mod phase;
mod vdc;

pub use amplitude::{Amplitude, AmplitudeSpec, PiecewiseLinear};
pub use phase::{PhaseSpec, PolyTerm};
pub use vdc::{vdc_1d, vdc_multidim, Vdc1dReport, VdcMultiReport, QUADRATURE_TOL, WINDOW_GRID};
