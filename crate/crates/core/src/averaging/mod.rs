//! Convex-body and discrete-cube averages, Radon averages and truncated
//! singular Radon transforms, moduli of continuity and Calderón–Zygmund
//! kernels.

mod body;
mod convex;
mod cube;
mod dini;
mod kernel;
mod modulus;
mod radon;

pub use body::{lq_norm, BodyKind, ConvexBodySpec};
pub use convex::{avg_convex, avg_convex_with_info, convex_kernel, ConvexKernel, KernelInfo};
pub use cube::{avg_discrete_cube, cube_average_slice, discrete_symbol, discrete_symbol_bounds, DiscreteSymbolBounds, Sample};
pub use dini::{dini_norms, dini_norms_with_step, DiniNorms, Finiteness};
pub use kernel::{annulus_factor, kernel_smoothness_check, Cancellation, KernelKind, KernelSpec, SmoothnessReport};
pub use modulus::ModulusOfContinuity;
pub use radon::{
    psi_difference, radial_extent, radon_average, radon_average_symbol, radon_increment, radon_singular, Boundary,
    CanonicalMapSpec, RadonConfig, RadonReport,
};
