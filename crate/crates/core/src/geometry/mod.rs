//! Boundary-neighbourhood measures of convex bodies and the homogeneous
//! quasi-norm attached to a monomial map.

mod boundary;
mod quasi;

pub use boundary::{
    boundary_distance, boundary_neighborhood_exact, boundary_neighborhood_measure, BoundaryEstimate, SHARD_SAMPLES,
};
pub use quasi::{quasi_norm, quasi_triangle_constant, QuasiNormSpec, QuasiTriangleReport};
