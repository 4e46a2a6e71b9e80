use std::ops::{AddAssign, Mul, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fourier::{dirichlet_ratio, euclidean_norm, LatticeField};

/// Values that can be averaged by sliding windows.
pub trait Sample: Copy + Default + AddAssign + SubAssign + Mul<f64, Output = Self> {}

impl Sample for f64 {}
impl Sample for Complex64 {}

/// Average over `x - Q_N`, `Q_N = [-N, N]^d`, of a row-major periodic array
/// with `side^dims` entries.
pub fn cube_average_slice<T: Sample>(values: &[T], dims: usize, side: usize, n: usize) -> Result<Vec<T>> {
    let width = 2 * n + 1;
    if width > side {
        return Err(invalid!("cube width 2N+1 = {width} exceeds the period {side}"));
    }
    if values.len() != side.pow(dims as u32) {
        return Err(invalid!("array has {} entries, expected {side}^{dims}", values.len()));
    }
    let mut cur = values.to_vec();
    let scale = 1.0 / width as f64;
    let mut out = vec![T::default(); cur.len()];
    for axis in 0..dims {
        let stride = side.pow((dims - 1 - axis) as u32);
        let block = stride * side;
        // each block is a side x stride matrix; slide whole rows at once
        let mut sum = vec![T::default(); stride];
        for (src, dst) in cur.chunks_exact(block).zip(out.chunks_exact_mut(block)) {
            let row = |i: usize| &src[i * stride..(i + 1) * stride];
            sum.fill(T::default());
            for j in 0..width {
                for (s, &v) in sum.iter_mut().zip(row((side + j - n) % side)) {
                    *s += v;
                }
            }
            for i in 0..side {
                for (o, &s) in dst[i * stride..(i + 1) * stride].iter_mut().zip(&sum) {
                    *o = s * scale;
                }
                let (add, sub) = (row((i + n + 1) % side), row((side + i - n) % side));
                for ((s, &a), &b) in sum.iter_mut().zip(add).zip(sub) {
                    *s += a;
                    *s -= b;
                }
            }
        }
        std::mem::swap(&mut cur, &mut out);
    }
    Ok(cur)
}

/// Periodic average over the `(2N+1)^d` lattice points of `x - Q_N`.
pub fn avg_discrete_cube(field: &LatticeField, n: usize) -> Result<LatticeField> {
    let out = cube_average_slice(field.values(), field.dims(), field.side(), n)?;
    LatticeField::new(field.dims(), field.side(), out)
}

/// Multiplier of the discrete cube average,
/// `prod_j sin((2N+1) pi xi_j) / ((2N+1) sin(pi xi_j))`.
pub fn discrete_symbol(n: u32, xi: &[f64]) -> f64 {
    xi.iter().map(|&x| dirichlet_ratio(n, x)).product()
}

/// Measured constants of the three discrete-cube symbol bounds:
/// `|m_N| <= c1 (N|xi|)^-1`, `|m_N - 1| <= c2 N|xi|` and
/// `|m_N1 - m_N2| <= c3 |N1 - N2| max(1/N1, 1/N2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSymbolBounds {
    pub dims: usize,
    pub n_max: u32,
    pub frequencies: usize,
    pub decay: f64,
    pub small_frequency: f64,
    pub scale_difference: f64,
}

/// Grid suprema of the three bound ratios over `N in 1..=n_max` and the
/// supplied torus frequencies.
pub fn discrete_symbol_bounds(n_max: u32, xi_grid: &[Vec<f64>]) -> Result<DiscreteSymbolBounds> {
    if n_max == 0 || xi_grid.is_empty() {
        return Err(invalid!("need N_max >= 1 and a nonempty frequency grid"));
    }
    let dims = xi_grid[0].len();
    let mut out = DiscreteSymbolBounds {
        dims,
        n_max,
        frequencies: xi_grid.len(),
        decay: 0.0,
        small_frequency: 0.0,
        scale_difference: 0.0,
    };
    let mut m = vec![0.0; n_max as usize + 1];
    for xi in xi_grid {
        if xi.len() != dims || xi.iter().any(|&x| !(-0.5..0.5).contains(&x)) {
            return Err(invalid!("frequencies must lie in [-1/2, 1/2)^{dims}"));
        }
        let r = euclidean_norm(xi);
        if r == 0.0 {
            continue;
        }
        for n in 1..=n_max {
            let v = discrete_symbol(n, xi);
            m[n as usize] = v;
            let nr = n as f64 * r;
            out.decay = out.decay.max(v.abs() * nr);
            out.small_frequency = out.small_frequency.max((v - 1.0).abs() / nr);
        }
        for n1 in 1..=n_max {
            for n2 in (n1 + 1)..=n_max {
                let den = (n2 - n1) as f64 / n1 as f64;
                out.scale_difference = out.scale_difference.max((m[n1 as usize] - m[n2 as usize]).abs() / den);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn matches_direct_summation() {
        let mut rng = crate::numeric::shard_rng(11, 0);
        let side = 16;
        let f = LatticeField::from_fn(2, side, |_| Complex64::new(rng.random(), rng.random())).unwrap();
        let n = 3isize;
        let g = avg_discrete_cube(&f, n as usize).unwrap();
        for x in 0..side as isize {
            for y in 0..side as isize {
                let mut s = Complex64::new(0.0, 0.0);
                for a in -n..=n {
                    for b in -n..=n {
                        s += f.values()[f.index_of(&[x - a, y - b])];
                    }
                }
                let got = g.values()[g.index_of(&[x, y])];
                assert!((got - s / 49.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn full_period_gives_the_mean() {
        let mut rng = crate::numeric::shard_rng(5, 0);
        let f = LatticeField::from_fn(3, 5, |_| Complex64::new(rng.random(), 0.0)).unwrap();
        let g = avg_discrete_cube(&f, 2).unwrap();
        let mean = f.mean();
        assert!(g.values().iter().all(|v| (v - mean).norm() < 1e-14));
        assert!(avg_discrete_cube(&f, 3).is_err());
    }

    #[test]
    fn symbol_is_the_multiplier() {
        let mut rng = crate::numeric::shard_rng(8, 0);
        let f = LatticeField::from_fn(2, 12, |_| Complex64::new(rng.random(), 0.0)).unwrap();
        let g = avg_discrete_cube(&f, 2).unwrap();
        let h = crate::fourier::apply_multiplier_fn(&f, |xi| Complex64::new(discrete_symbol(2, xi), 0.0));
        assert!(g.max_abs_diff(&h) < 1e-12);
    }

    #[test]
    fn symbol_examples() {
        assert_eq!(discrete_symbol(3, &[0.0, 0.0]), 1.0);
        assert!((discrete_symbol(1, &[0.25]) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bounds_are_finite() {
        let grid = crate::fourier::torus_grid(2, 200, 1);
        let b = discrete_symbol_bounds(16, &grid).unwrap();
        assert!(b.decay.is_finite() && b.small_frequency.is_finite() && b.scale_difference.is_finite());
        assert!(b.scale_difference > 0.0 && b.scale_difference < 10.0);
    }
}
