use jumpvar::variation::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn subsequences(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << n)).map(move |mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
}

fn brute_jump(v: &[Complex64], lambda: f64) -> usize {
    subsequences(v.len())
        .filter(|s| s.windows(2).all(|w| (v[w[1]] - v[w[0]]).norm() >= lambda))
        .map(|s| s.len() - 1)
        .max()
        .unwrap_or(0)
}

fn brute_variation(v: &[Complex64], r: f64) -> f64 {
    subsequences(v.len())
        .map(|s| {
            let incs = s.windows(2).map(|w| (v[w[1]] - v[w[0]]).norm());
            if r.is_infinite() {
                incs.fold(0.0, f64::max)
            } else {
                incs.map(|x| x.powf(r)).sum::<f64>().powf(1.0 / r)
            }
        })
        .fold(0.0, f64::max)
}

fn path_of(v: &[f64]) -> SampledPath {
    SampledPath::from_real(v).unwrap()
}

#[test]
fn jump_count_matches_exhaustive_search_on_random_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let alphabet = [0.0, 1.0, -1.0, 2.0, -2.0];
    for _ in 0..1000 {
        let v: Vec<f64> = (0..8).map(|_| alphabet[rng.random_range(0..5)]).collect();
        let p = path_of(&v);
        for lambda in [0.5, 1.0, 1.5] {
            assert_eq!(jump_count(&p, lambda).unwrap(), brute_jump(p.values(), lambda), "{v:?} {lambda}");
        }
    }
}

#[test]
fn complex_paths_match_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let values: Vec<Complex64> = (0..7)
            .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let p = SampledPath::from_values(values).unwrap();
        for lambda in [0.4, 1.0, 2.2] {
            assert_eq!(jump_count(&p, lambda).unwrap(), brute_jump(p.values(), lambda));
        }
        for r in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let got = variation(&p, r).unwrap();
            let want = brute_variation(p.values(), r);
            assert!((got - want).abs() <= 1e-12 * want.max(1.0));
        }
    }
}

#[test]
fn breakpoints_reproduce_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..300 {
        let v: Vec<f64> = (0..10).map(|_| rng.random_range(-3.0..3.0)).collect();
        let p = path_of(&v);
        let prof = jump_breakpoints(&p);
        let bps = prof.breakpoints();
        for w in bps.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].1 > w[1].1);
        }
        let mut probes: Vec<f64> = bps.iter().flat_map(|&(m, _)| [m, m * 0.999, m * 1.001]).collect();
        probes.extend([1e-3, 0.5, 1.0, 10.0]);
        for lambda in probes {
            assert_eq!(prof.count(lambda), jump_count(&p, lambda).unwrap());
        }
        // sup over a fine lambda grid never beats the breakpoint sup
        let sup = prof.sup_scaled();
        for k in 1..400 {
            let lambda = k as f64 * 0.02;
            let val = lambda * (jump_count(&p, lambda).unwrap() as f64).sqrt();
            assert!(val <= sup * (1.0 + 1e-12));
        }
    }
}

#[test]
fn seminorm_matches_fine_lambda_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..40 {
        let atoms: Vec<Atom> = (0..5)
            .map(|_| Atom {
                weight: rng.random_range(0.1..2.0),
                path: path_of(&(0..6).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<_>>()),
            })
            .collect();
        let field = FieldOfPaths::new(atoms).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let exact = jump_seminorm(&field, p).unwrap();
            // candidates: every pairwise magnitude of every atom
            let mut best: f64 = 0.0;
            for a in field.atoms() {
                let v = a.path.values();
                for j in 0..v.len() {
                    for i in 0..j {
                        let lambda = (v[j] - v[i]).norm();
                        if lambda == 0.0 {
                            continue;
                        }
                        let s: f64 = field
                            .atoms()
                            .iter()
                            .map(|b| {
                                let n = jump_count(&b.path, lambda).unwrap() as f64;
                                b.weight * lambda.powf(p) * n.powf(p / 2.0)
                            })
                            .sum();
                        best = best.max(s.powf(1.0 / p));
                    }
                }
            }
            assert!((exact - best).abs() <= 1e-12 * best.max(1.0), "{exact} vs {best}");
        }
    }
}

#[test]
fn lewko_bound_on_random_dyadic_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..500 {
        let levels = rng.random_range(0..6u32);
        let n = 1usize << levels;
        let shift = rng.random_range(0..4u32);
        let times = (0..=n as i64).map(|u| Time::dyadic(u, shift).unwrap()).collect();
        let values: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p = SampledPath::from_real_with_times(times, &values).unwrap();
        for r in [1.0, 1.5, 2.0, 3.0] {
            let (lhs, rhs) = lewko_bound(&p, r).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}

fn arb_path(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bridge_inequality(v in arb_path(16), lambda in 0.01f64..4.0, r in 0.2f64..6.0) {
        let p = path_of(&v);
        let n = jump_count(&p, lambda).unwrap() as f64;
        let var = variation(&p, r).unwrap();
        prop_assert!(lambda * n.powf(1.0 / r) <= var * (1.0 + 1e-9));
    }

    #[test]
    fn variation_nonincreasing_in_r(v in arb_path(12), r in 1.0f64..4.0, dr in 0.0f64..3.0) {
        let p = path_of(&v);
        let a = variation(&p, r).unwrap();
        let b = variation(&p, r + dr).unwrap();
        let inf = variation(&p, f64::INFINITY).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12) + 1e-15);
        prop_assert!(inf <= b * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn jump_count_nonincreasing_in_lambda(v in arb_path(12), lambda in 0.01f64..3.0, dl in 0.0f64..2.0) {
        let p = path_of(&v);
        prop_assert!(jump_count(&p, lambda + dl).unwrap() <= jump_count(&p, lambda).unwrap());
    }

    #[test]
    fn deleting_samples_never_increases(v in arb_path(12), idx in 0usize..12, lambda in 0.1f64..3.0, r in 0.5f64..4.0) {
        let p = path_of(&v);
        if let Some(q) = p.without(idx % p.len()) {
            prop_assert!(jump_count(&q, lambda).unwrap() <= jump_count(&p, lambda).unwrap());
            prop_assert!(variation(&q, r).unwrap() <= variation(&p, r).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn small_r_variation_is_full_grid_sum(v in arb_path(8), r in 0.1f64..=1.0) {
        let p = path_of(&v);
        let direct: f64 = v.windows(2).map(|w| (w[1] - w[0]).abs().powf(r)).sum::<f64>().powf(1.0 / r);
        let got = variation(&p, r).unwrap();
        prop_assert!((got - direct).abs() <= 1e-12 * direct.max(1.0));
        let brute = brute_variation(p.values(), r);
        prop_assert!((got - brute).abs() <= 1e-9 * brute.max(1.0));
    }

    #[test]
    fn single_atom_seminorm_is_profile_sup(v in arb_path(10), p in 1.01f64..8.0) {
        let path = path_of(&v);
        let sup = jump_breakpoints(&path).sup_scaled();
        let field = FieldOfPaths::unit_weights(vec![path]).unwrap();
        let s = jump_seminorm(&field, p).unwrap();
        prop_assert!((s - sup).abs() <= 1e-12 * sup.max(1.0));
    }

    #[test]
    fn exponent_identities(q0 in 1.0f64..1.99, t in 0.001f64..1.0) {
        let q1 = q0 + t * (2.0 - q0);
        if q1 > q0 {
            let rec = interpolation_exponents(q0, q1).unwrap();
            prop_assert!(rec.max_residual() < 1e-12);
        }
    }

    #[test]
    fn path_json_round_trip(v in arb_path(6), im in prop::collection::vec(-1.0f64..1.0, 6), shift in 0u32..5) {
        let times = (1..=v.len() as i64).map(|u| Time::dyadic(u, shift).unwrap()).collect();
        let values = v.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let p = SampledPath::new(times, values).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: SampledPath = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(p, back);
    }
}

#[test]
fn exponent_identities_on_grid() {
    let mut checked = 0;
    for i in 0..10 {
        for j in 1..=10 {
            let q0 = 1.0 + 0.099 * i as f64;
            let q1 = q0 + (2.0 - q0) * j as f64 / 10.0;
            let rec = interpolation_exponents(q0, q1).unwrap();
            assert!(rec.max_residual() < 1e-12);
            checked += 1;
        }
    }
    assert_eq!(checked, 100);
}
