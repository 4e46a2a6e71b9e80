use jumpvar::oscillatory::*;
use proptest::prelude::*;

fn lhs_1d(phase: &PhaseSpec, psi: &AmplitudeSpec) -> f64 {
    vdc_1d(phase, psi).unwrap().lhs
}

#[test]
fn linear_phase_with_a_hat_matches_the_fejer_closed_form() {
    for lambda in [3.0, 40.0, 700.0] {
        let (c, w) = (0.4, 0.3);
        let got = lhs_1d(&PhaseSpec::monomial(lambda, 1, 0.0, 1.0), &AmplitudeSpec::hat_1d(c, w));
        let u: f64 = lambda * w / 2.0;
        let expect = w * (u.sin() / u).powi(2);
        assert!((got - expect).abs() < 1e-9, "lambda {lambda}: {got} vs {expect}");
    }
}

#[test]
fn quadratic_phase_rescales() {
    for lambda in [5.0, 50.0] {
        let wide = lhs_1d(&PhaseSpec::monomial(lambda, 2, 0.0, 2.0), &AmplitudeSpec::indicator_1d(0.0, 2.0));
        let unit = lhs_1d(&PhaseSpec::monomial(4.0 * lambda, 2, 0.0, 1.0), &AmplitudeSpec::indicator_1d(0.0, 1.0));
        assert!((wide - 2.0 * unit).abs() < 1e-9);
    }
}

#[test]
fn degenerate_phases_are_rejected() {
    let psi = AmplitudeSpec::indicator_1d(0.0, 1.0);
    assert!(vdc_1d(&PhaseSpec::monomial(0.0, 1, 0.0, 1.0), &psi).is_err());
    assert!(vdc_1d(&PhaseSpec::monomial(1.0, 0, 0.0, 1.0), &psi).is_err());
    let zero = PhaseSpec::polynomial([(vec![0, 0], 3.0)]);
    let boxed = AmplitudeSpec::Indicator { lower: vec![0.0, 0.0], upper: vec![0.5, 0.5] };
    assert!(vdc_multidim(&zero, &boxed, 2.0).is_err());
}

#[test]
fn multidimensional_linear_phase_factorises() {
    let l = 30.0;
    let phase = PhaseSpec::polynomial([(vec![1, 0], l), (vec![0, 1], 2.0 * l)]);
    let boxed = AmplitudeSpec::Indicator { lower: vec![0.0, 0.0], upper: vec![0.5, 0.25] };
    let got = vdc_multidim(&phase, &boxed, 2.0).unwrap().lhs;
    let side = |a: f64, s: f64| 2.0 * (a * s / 2.0).sin().abs() / a;
    let expect = side(l, 0.5) * side(2.0 * l, 0.25);
    assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
}

#[test]
fn amplitudes_measure_their_integrals_exactly() {
    let hat = PiecewiseLinear::hat(0.0, 2.0).unwrap();
    assert!((hat.integral(-5.0, 5.0) - 2.0).abs() < 1e-15);
    assert!((hat.dilate(3.0).integral(-10.0, 10.0) - 6.0).abs() < 1e-12);
    assert_eq!(PiecewiseLinear::indicator(1.0, 2.0).unwrap().support(), Some((1.0, 2.0)));
}

proptest! {
    #[test]
    fn lhs_never_exceeds_the_l1_norm(lambda in 1.0f64..500.0, k in 1u32..4, lo in 0.0f64..0.5, len in 0.05f64..0.5) {
        let psi = AmplitudeSpec::indicator_1d(lo, lo + len);
        let r = vdc_1d(&PhaseSpec::monomial(lambda, k, 0.0, 1.0), &psi).unwrap();
        prop_assert!(r.lhs <= r.l1_norm + 1e-12);
        prop_assert!((r.l1_norm - len).abs() < 1e-12);
    }

    #[test]
    fn hat_ratios_stay_bounded(lambda in 10.0f64..1e3, k in 1u32..4, c in 0.3f64..0.7) {
        let r = vdc_1d(&PhaseSpec::monomial(lambda, k, 0.0, 1.0), &AmplitudeSpec::hat_1d(c, 0.25)).unwrap();
        prop_assert!(r.ratio().is_finite() && r.ratio() < 10.0);
    }
}
