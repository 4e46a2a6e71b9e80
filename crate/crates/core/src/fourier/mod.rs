//! Periodic lattice fields, Poisson and Littlewood–Paley symbols, multiplier
//! application and the off-diagonal square-function decay estimator.

mod decay;
mod envelope;
mod grid;
mod lattice;
mod multiplier;
mod symbols;

pub use decay::{off_diagonal_decay, off_diagonal_report, DecayReport, DEFAULT_K_RANGE};
pub use envelope::{lipschitz_constant, symbol_envelope_check, EnvelopeReport, Euclidean, QuasiNorm};
pub use grid::{directions, radial_grid, torus_grid};
pub use lattice::{dft_frequency, lattice_points, LatticeField, POINT_BUDGET};
pub use multiplier::{apply_multiplier, apply_multiplier_fn, convolve};
pub use symbols::{
    dirichlet_ratio, dyadic_envelope, euclidean_norm, littlewood_paley_symbol, poisson_symbol, sin_norm, sinc,
    FrequencyDomain, PoissonKind, SymbolFamily, SymbolFlavor,
};

pub(crate) use lattice::increment as increment_coords;
