use bbm_core::limit::{H0Evaluator, SpatialQuad};
use bbm_core::luxemburg::{
    check_modular_norm_equivalence, gradient_norm, luxemburg, orlicz_norm, ModularSample, NormQuery, NormTarget,
};
use bbm_core::modular::{local_modular_amp, LocalModular};
use bbm_core::sphere::SphereRule;
use bbm_core::test_functions::by_id;
use bbm_core::young::preset;
use bbm_core::Error;
use proptest::prelude::*;

fn query() -> NormQuery {
    NormQuery::new(NormTarget::Gradient)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // m(u/λ) = A λ^{-p} has norm A^{1/p}
    #[test]
    fn bisection_recovers_power_law_norm(a in 1e-3f64..1e3, p in 1.1f64..5.0) {
        let r = luxemburg(&query(), p, |l| Ok(ModularSample { value: a * l.powf(-p), error: 0.0 })).unwrap();
        let exact = a.powf(1.0 / p);
        prop_assert!((r.value - exact).abs() <= 2.0 * query().tol * exact);
        prop_assert!(r.bracket.0 <= exact && exact <= r.bracket.1);
    }

    #[test]
    fn norm_is_positively_homogeneous(amp in 0.05f64..20.0) {
        let spec = preset("doublephase", &Default::default()).unwrap();
        let u = by_id("polybump", 1).unwrap();
        let ev = H0Evaluator::preferred(spec, SphereRule::new(1, 1).unwrap()).unwrap();
        let quad = SpatialQuad::default();
        let base = gradient_norm(&ev, &u, &quad, &query()).unwrap().value;
        let scaled = luxemburg(&query(), 2.0, |l| {
            let value = local_modular_amp(LocalModular::Limit(&ev), &u, amp / l, &quad)?;
            Ok(ModularSample { value, error: 0.0 })
        })
        .unwrap()
        .value;
        prop_assert!((scaled - amp * base).abs() <= 1e-7 * amp * base);
    }
}

#[test]
fn unit_ball_boundary() {
    // at the computed norm the modular of u/‖u‖ equals one
    let spec = preset("power", &Default::default()).unwrap();
    let u = by_id("cosbump", 1).unwrap();
    let quad = SpatialQuad::default();
    let n = orlicz_norm(&spec, &u, &quad, &NormQuery::new(NormTarget::LebesgueOrlicz)).unwrap();
    let l2: f64 = quad.integrate(&u, |x| Ok(u.value(x).powi(2))).unwrap().sqrt();
    assert!((n.value - l2).abs() <= 1e-7 * l2);
}

#[test]
fn increasing_modular_is_rejected() {
    let r = luxemburg(&query(), 2.0, |l| Ok(ModularSample { value: l, error: 0.0 }));
    assert!(matches!(r, Err(Error::NonMonotone { .. })));
}

#[test]
fn vanishing_modular_has_zero_norm() {
    let r = luxemburg(&query(), 2.0, |_| Ok(ModularSample { value: 0.0, error: 0.0 })).unwrap();
    assert_eq!(r.value, 0.0);
}

#[test]
fn equivalence_holds_for_several_amplitudes() {
    let spec = preset("log", &Default::default()).unwrap();
    let u = by_id("cosbump", 1).unwrap();
    let ev = H0Evaluator::preferred(spec, SphereRule::new(1, 1).unwrap()).unwrap();
    let quad = SpatialQuad::default();
    for amp in [0.1, 1.0, 7.0] {
        for c in [1.0, 3.0] {
            let r = check_modular_norm_equivalence(&ev, &u, amp, c, &quad, 1e-8).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
