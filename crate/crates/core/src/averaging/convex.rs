use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::body::ConvexBodySpec;
use crate::error::{invalid, Result};
use crate::fourier::{convolve, LatticeField};

/// Points whose gauge lies within this relative distance of 1 count as
/// boundary points and are excluded from the open body.
const BOUNDARY_SLACK: f64 = 1e-12;

/// The sampled, mass-one indicator of `tG` on `h Z_M^d`.
#[derive(Debug, Clone)]
pub struct ConvexKernel {
    pub field: LatticeField,
    /// Lattice points inside `tG`.
    pub points: usize,
    pub info: KernelInfo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelInfo {
    pub t: f64,
    pub spacing: f64,
    /// `points h^d / |tG| - 1`, the discretisation error of the indicator.
    pub volume_error: f64,
}

fn check_aliasing(field_dims: usize, side: usize, body: &ConvexBodySpec, t: f64, spacing: f64) -> Result<()> {
    body.validate()?;
    if body.dim != field_dims {
        return Err(invalid!("body is {}-dimensional, field is {field_dims}-dimensional", body.dim));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid!("scale must be positive and finite, got {t}"));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(invalid!("lattice spacing must be positive and finite, got {spacing}"));
    }
    let reach = t * body.circumradius();
    let half_period = side as f64 * spacing / 2.0;
    if reach >= half_period {
        return Err(invalid!(
            "t * circumradius = {reach} reaches half the period {half_period}; the average would wrap around"
        ));
    }
    Ok(())
}

/// Builds the normalised indicator of `tG` sampled at lattice points
/// `n h`, stored at the wrapped index of `n`.
pub fn convex_kernel(dims: usize, side: usize, body: &ConvexBodySpec, t: f64, spacing: f64) -> Result<ConvexKernel> {
    check_aliasing(dims, side, body, t, spacing)?;
    let (lo, hi) = body.bounding_box();
    let ranges: Vec<(isize, isize)> = lo
        .iter()
        .zip(&hi)
        .map(|(&l, &u)| ((t * l / spacing).floor() as isize, (t * u / spacing).ceil() as isize))
        .collect();
    let mut kernel = LatticeField::zeros(dims, side)?;
    let mut n: Vec<isize> = ranges.iter().map(|r| r.0).collect();
    let mut x = vec![0.0; dims];
    let mut inside = Vec::new();
    'outer: loop {
        for (xi, &ni) in x.iter_mut().zip(&n) {
            *xi = ni as f64 * spacing / t;
        }
        if body.gauge(&x) < 1.0 - BOUNDARY_SLACK {
            inside.push(kernel.index_of(&n));
        }
        for (i, r) in ranges.iter().enumerate() {
            if n[i] < r.1 {
                n[i] += 1;
                continue 'outer;
            }
            n[i] = r.0;
        }
        break;
    }
    let points = inside.len();
    let w = Complex64::new(1.0 / points as f64, 0.0);
    let vals = kernel.values_mut();
    for i in inside {
        vals[i] += w;
    }
    let exact = body.volume() * t.powi(dims as i32);
    let volume_error = points as f64 * spacing.powi(dims as i32) / exact - 1.0;
    Ok(ConvexKernel {
        field: kernel,
        points,
        info: KernelInfo {
            t,
            spacing,
            volume_error,
        },
    })
}

/// Average of `field` over `x - tG` on the lattice `h Z_M^d`, realised as a
/// periodic convolution with the sampled indicator of `tG`.
pub fn avg_convex(field: &LatticeField, body: &ConvexBodySpec, t: f64, spacing: f64) -> Result<LatticeField> {
    Ok(avg_convex_with_info(field, body, t, spacing)?.0)
}

/// [`avg_convex`] together with the indicator's discretisation error.
pub fn avg_convex_with_info(
    field: &LatticeField,
    body: &ConvexBodySpec,
    t: f64,
    spacing: f64,
) -> Result<(LatticeField, KernelInfo)> {
    let k = convex_kernel(field.dims(), field.side(), body, t, spacing)?;
    Ok((convolve(field, &k.field)?, k.info))
}
