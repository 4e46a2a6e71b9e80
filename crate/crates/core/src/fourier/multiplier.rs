use num_complex::Complex64;

use super::lattice::{increment, transform_in_place, LatticeField};
use super::symbols::SymbolFamily;
use crate::error::{invalid, Result};

/// `IDFT(m * DFT(f))` where `m(xi)` is evaluated at the lattice frequencies
/// in `[-1/2, 1/2)^d`.
pub fn apply_multiplier_fn<F>(field: &LatticeField, mut symbol: F) -> LatticeField
where
    F: FnMut(&[f64]) -> Complex64,
{
    let (dims, side) = (field.dims(), field.side());
    let mut values = field.values().to_vec();
    transform_in_place(&mut values, dims, side, false);
    let freqs: Vec<f64> = (0..side).map(|m| super::lattice::dft_frequency(m, side)).collect();
    let mut coords = vec![0usize; dims];
    let mut xi = vec![0.0; dims];
    for v in values.iter_mut() {
        for (x, &c) in xi.iter_mut().zip(&coords) {
            *x = freqs[c];
        }
        *v *= symbol(&xi);
        increment(&mut coords, side);
    }
    transform_in_place(&mut values, dims, side, true);
    let scale = 1.0 / values.len() as f64;
    values.iter_mut().for_each(|v| *v *= scale);
    LatticeField::new(dims, side, values).expect("shape preserved")
}

/// Applies `family` at parameter `param` as a Fourier multiplier on the
/// torus.
pub fn apply_multiplier(field: &LatticeField, family: &SymbolFamily, param: f64) -> Result<LatticeField> {
    if let Some(d) = family.dims() {
        if d != field.dims() {
            return Err(invalid!(
                "symbol '{}' is {d}-dimensional, field is {}-dimensional",
                family.label(),
                field.dims()
            ));
        }
    }
    Ok(apply_multiplier_fn(field, |xi| family.eval(param, xi)))
}

/// Periodic convolution `f * k` computed through the DFT.
pub fn convolve(field: &LatticeField, kernel: &LatticeField) -> Result<LatticeField> {
    if field.dims() != kernel.dims() || field.side() != kernel.side() {
        return Err(invalid!("convolution operands live on different lattices"));
    }
    let (dims, side) = (field.dims(), field.side());
    let mut a = field.values().to_vec();
    let mut b = kernel.values().to_vec();
    transform_in_place(&mut a, dims, side, false);
    transform_in_place(&mut b, dims, side, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    transform_in_place(&mut a, dims, side, true);
    let scale = 1.0 / a.len() as f64;
    a.iter_mut().for_each(|v| *v *= scale);
    LatticeField::new(dims, side, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::symbols::PoissonKind;

    fn field() -> LatticeField {
        LatticeField::from_fn(2, 6, |c| Complex64::new((c[0] * 7 + c[1] * 3) as f64 % 5.0, c[1] as f64 * 0.5))
            .unwrap()
    }

    #[test]
    fn identity_and_zero_symbols() {
        let f = field();
        let g = apply_multiplier_fn(&f, |_| Complex64::new(1.0, 0.0));
        assert!(g.max_abs_diff(&f) < 1e-12);
        let z = apply_multiplier_fn(&f, |_| Complex64::new(0.0, 0.0));
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn probability_symbol_preserves_mean() {
        let f = field();
        let fam = SymbolFamily::poisson(PoissonKind::Discrete);
        let g = apply_multiplier(&f, &fam, 0.7).unwrap();
        assert!((g.mean() - f.mean()).norm() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let fam = SymbolFamily::poisson(PoissonKind::Discrete).with_dims(3);
        assert!(apply_multiplier(&field(), &fam, 1.0).is_err());
    }

    #[test]
    fn convolution_with_delta_is_identity() {
        let f = field();
        let d = LatticeField::delta(2, 6).unwrap();
        assert!(convolve(&f, &d).unwrap().max_abs_diff(&f) < 1e-12);
    }
}
