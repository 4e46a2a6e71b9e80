//! Numerical toolkit for jump counting functions, variation seminorms and
//! the averaging, multiplier and oscillatory-integral estimates that control
//! them.
//!
//! The crate is organised by subsystem:
//!
//! * [`variation`]: exact jump counts, `r`-variations, jump quasi-seminorms,
//!   dyadic decompositions and exponent bookkeeping.
//! * [`fourier`]: periodic lattice fields, Poisson and Littlewood–Paley
//!   symbols, multiplier application and off-diagonal decay.
//! * [`averaging`]: convex-body and discrete-cube averages, Radon averages
//!   and truncated singular Radon transforms, moduli of continuity and
//!   Calderón–Zygmund kernels.
//! * [`oscillatory`]: van der Corput bounds with rough amplitudes.
//! * [`geometry`]: boundary-neighbourhood measures and homogeneous
//!   quasi-norms.
//! * [`harness`]: experiment configs, sweeps and report emission behind the
//!   `jumpvar` command line tool.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod harness;
pub mod numeric;
pub mod oscillatory;
pub mod variation;

pub use error::{Error, Result};
