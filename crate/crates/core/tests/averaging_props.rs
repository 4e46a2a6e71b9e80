use jumpvar::averaging::*;
use jumpvar::fourier::{dft_frequency, LatticeField};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_real(dims: usize, side: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..side.pow(dims as u32)).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn brute_cube_average(v: &[f64], dims: usize, side: usize, n: usize) -> Vec<f64> {
    let len = v.len();
    let w = (2 * n + 1).pow(dims as u32) as f64;
    (0..len)
        .map(|x| {
            let mut s = 0.0;
            let mut off = vec![0usize; dims];
            loop {
                let mut idx = 0;
                let mut rem = x;
                let mut stride = len;
                for &o in &off {
                    stride /= side;
                    let c = rem / stride;
                    rem %= stride;
                    idx += ((c + side + o - n) % side) * stride;
                }
                s += v[idx];
                let mut k = 0;
                while k < dims && off[k] == 2 * n {
                    off[k] = 0;
                    k += 1;
                }
                if k == dims {
                    break;
                }
                off[k] += 1;
            }
            s / w
        })
        .collect()
}

#[test]
fn sliding_cube_average_matches_direct_summation() {
    for (dims, side, n) in [(1, 11, 3), (2, 9, 2), (3, 6, 1)] {
        let v = random_real(dims, side, 1);
        let fast = cube_average_slice(&v, dims, side, n).unwrap();
        let slow = brute_cube_average(&v, dims, side, n);
        let err = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "d={dims}: {err}");
    }
    assert!(cube_average_slice(&[0.0; 4], 1, 4, 2).is_err());
}

#[test]
fn discrete_symbol_is_the_dft_of_the_cube_average() {
    let (side, n) = (16, 3);
    let f = LatticeField::from_real(1, side, &random_real(1, side, 2)).unwrap();
    let a = avg_discrete_cube(&f, n).unwrap().dft();
    let fh = f.dft();
    for m in 0..side {
        let expect = fh.values()[m] * discrete_symbol(n as u32, &[dft_frequency(m, side)]);
        assert!((a.values()[m] - expect).norm() < 1e-10);
    }
}

#[test]
fn convex_averages_preserve_constants_and_positivity() {
    let body = ConvexBodySpec::lq_ball(2.0, 2).unwrap();
    let c = LatticeField::constant(2, 32, Complex64::new(2.5, 0.0)).unwrap();
    let a = avg_convex(&c, &body, 3.0, 1.0).unwrap();
    assert!(a.values().iter().all(|v| (v - Complex64::new(2.5, 0.0)).norm() < 1e-12));
    let pos: Vec<f64> = random_real(2, 32, 3).iter().map(|x| x.abs()).collect();
    let a = avg_convex(&LatticeField::from_real(2, 32, &pos).unwrap(), &body, 3.0, 1.0).unwrap();
    assert!(a.values().iter().all(|v| v.re >= -1e-12 && v.im.abs() < 1e-12));
}

#[test]
fn averages_that_would_wrap_are_rejected() {
    let f = LatticeField::zeros(1, 8).unwrap();
    assert!(avg_convex(&f, &ConvexBodySpec::cube(1), 4.0, 1.0).is_err());
    assert!(avg_convex(&f, &ConvexBodySpec::cube(2), 1.0, 1.0).is_err());
}

#[test]
fn body_measurements() {
    let sq = ConvexBodySpec::cube(2);
    assert!((sq.volume() - 4.0).abs() < 1e-12);
    assert!((sq.diameter() - 8f64.sqrt()).abs() < 1e-12);
    let disc = ConvexBodySpec::lq_ball(2.0, 2).unwrap();
    assert!((disc.volume() - std::f64::consts::PI).abs() < 1e-9);
    assert!(disc.contains(&[0.6, 0.6]) && !disc.contains(&[0.8, 0.8]));
    assert!(ConvexBodySpec::lq_ball(0.5, 2).is_err());
}

#[test]
fn dini_norms_of_powers() {
    for theta in [0.25, 0.5, 1.0] {
        let d = dini_norms(&ModulusOfContinuity::power(2.0, theta));
        assert!((d.dini.value().unwrap() - 2.0 / theta).abs() < 1e-8);
        assert!((d.log_dini.value().unwrap() - 2.0 / (theta * theta)).abs() < 1e-8);
    }
}

#[test]
fn log_decay_modulus_is_dini_only_for_large_exponents() {
    assert!(!dini_norms(&ModulusOfContinuity::log_decay(0.5)).dini.is_finite());
    let d = dini_norms(&ModulusOfContinuity::log_decay(3.0));
    assert!(d.dini.is_finite() && d.log_dini.is_finite());
}

#[test]
fn hilbert_kernel_is_an_odd_standard_kernel() {
    let k = KernelSpec::hilbert();
    assert!(k.is_odd());
    assert!(k.validate(1000, 1).is_ok());
}

proptest! {
    #[test]
    fn moduli_stay_subadditive_under_composition(c in 0.1f64..5.0, a in 0.1f64..1.0, b in 0.1f64..1.0) {
        let m = ModulusOfContinuity::compose(
            ModulusOfContinuity::power(c, a),
            ModulusOfContinuity::sum(vec![ModulusOfContinuity::power(1.0, b), ModulusOfContinuity::linear(0.5)]),
        );
        prop_assert!(m.violation(1e-6, 1e3, 41) <= 1e-9 * (1.0 + m.eval(2e3)));
    }

    #[test]
    fn cube_average_is_a_contraction_in_sup(seed in 0u64..1000, n in 0usize..4) {
        let v = random_real(2, 9, seed);
        let a = cube_average_slice(&v, 2, 9, n).unwrap();
        let sup = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        prop_assert!(a.iter().all(|x| x.abs() <= sup + 1e-12));
    }

    #[test]
    fn dirichlet_symbol_is_bounded_by_one(n in 0u32..64, x in -0.5f64..0.5) {
        prop_assert!(discrete_symbol(n, &[x]).abs() <= 1.0 + 1e-12);
    }
}
