use hnag::diagnostics::{check_certificates, EnvelopeKind, RateEnvelope};
use hnag::flow::{vector_field, BetaSchedule, FlowParams, FlowState};
use hnag::objectives::{
    prox_l1, random_lasso, random_logistic, random_quadratic, subgradient_from_prox,
    validate_objective, Quadratic, SmoothObjective, Vector,
};
use hnag::solvers::{run, Problem, SolverParams, Variant};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn vector(n: usize) -> impl Strategy<Value = Vector> {
    proptest::collection::vec(-10.0..10.0f64, n).prop_map(Vector::from_vec)
}

fn l1(x: &Vector) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sandwich_holds_on_random_fixtures(seed in any::<u64>(), mu in 0.0..2.0f64, spread in 1.0..1e3f64) {
        let q = random_quadratic(5, mu, mu + spread, seed).unwrap();
        prop_assert!(validate_objective(&q, 20, seed).passed());
        let f = random_logistic(30, 4, mu, seed).unwrap();
        prop_assert!(validate_objective(&f, 20, seed).passed());
    }

    #[test]
    fn prox_l1_is_nonexpansive(x in vector(6), y in vector(6), lambda in 0.0..5.0f64) {
        let (px, py) = (prox_l1(&x, lambda).unwrap(), prox_l1(&y, lambda).unwrap());
        prop_assert!((&px - &py).norm() <= (&x - &y).norm() * (1.0 + 1e-15));
    }

    #[test]
    fn recovered_subgradient_supports_l1(x in vector(5), ys in proptest::collection::vec(vector(5), 100), lambda in 1e-3..5.0f64) {
        let xp = prox_l1(&x, lambda).unwrap();
        let p = subgradient_from_prox(&x, &xp, lambda).unwrap();
        for y in &ys {
            let lower = l1(&xp) + p.dot(&(y - &xp));
            prop_assert!(l1(y) >= lower - 1e-12 * (1.0 + l1(y)));
        }
    }

    #[test]
    fn composite_value_is_h_plus_g(seed in 0u64..50, x in vector(6)) {
        let lasso = random_lasso(12, 6, 0.3, seed).unwrap();
        let expected = lasso.smooth().value(&x) + lasso.nonsmooth().value(&x);
        prop_assert_eq!(lasso.value(&x), expected);
    }

    #[test]
    fn flow_field_vanishes_at_equilibrium(
        diag in proptest::collection::vec(1u8..20, 4),
        xs in proptest::collection::vec(-8i8..8, 4),
        mu in 0.0..1.0f64,
        beta in 0.0..3.0f64,
    ) {
        let d: Vec<f64> = diag.iter().map(|&v| v as f64).collect();
        let xs = Vector::from_iterator(4, xs.iter().map(|&v| v as f64));
        let b = Vector::from_iterator(4, d.iter().zip(xs.iter()).map(|(a, x)| a * x));
        let q = Quadratic::new(DMatrix::from_diagonal(&Vector::from_vec(d)), b).unwrap();
        let params = FlowParams::new(&q, mu, BetaSchedule::Constant(beta)).unwrap();
        let state = FlowState::new(xs.clone(), xs, mu.max(1e-3)).unwrap();
        let field = vector_field(&state, &params, 0.0).unwrap();
        prop_assert!(field.dx.iter().chain(field.dv.iter()).all(|&c| c == 0.0));
        prop_assert_eq!(field.dgamma, mu - state.gamma);
    }

    #[test]
    fn smooth_variants_certify_on_random_quadratics(
        seed in 0u64..1000,
        mu in prop_oneof![Just(0.0), 1e-3..1.0f64],
        l in 1.0..1e3f64,
        gamma0 in 1e-3..1e3f64,
        variant in proptest::sample::select(vec![Variant::Explicit, Variant::ExtraGradient, Variant::NagFlowA, Variant::NagFlowB]),
    ) {
        let f = random_quadratic(5, mu, l, seed).unwrap();
        let params = SolverParams::new(variant, gamma0, mu, l).with_max_iter(150);
        let x0 = f.minimizer().unwrap() + Vector::from_element(5, 1.0);
        let (_, trace) = run(&x0, &-&x0, Problem::Smooth(&f), &params).unwrap();
        let report = check_certificates(&trace, &RateEnvelope::for_params(&params));
        prop_assert!(report.passed(), "{:?}", report.first_violation);
    }

    #[test]
    fn semi_implicit_contracts_for_any_step(
        seed in 0u64..1000,
        mu in prop_oneof![Just(0.0), 1e-3..2.0f64],
        alpha in 1e-2..1e3f64,
        gamma0 in 1e-2..1e2f64,
    ) {
        let f = random_quadratic(4, mu, 100.0, seed).unwrap();
        let params = SolverParams::new(Variant::SemiImplicit, gamma0, mu, 100.0)
            .with_alpha(alpha)
            .with_max_iter(60);
        let x0 = Vector::from_element(4, 3.0);
        let (_, trace) = run(&x0, &x0, Problem::Proximal(&f), &params).unwrap();
        let report = check_certificates(&trace, &RateEnvelope::for_params(&params));
        prop_assert!(report.passed(), "{:?}", report.first_violation);
    }

    #[test]
    fn composite_variants_certify_on_random_lasso(
        seed in 0u64..200,
        gamma0 in 1e-2..1e2f64,
        variant in proptest::sample::select(vec![Variant::CompositeSplit, Variant::CompositeAlt, Variant::GradientMapping]),
    ) {
        let lasso = random_lasso(16, 8, 0.4, seed).unwrap();
        let params = SolverParams::new(variant, gamma0, 0.0, lasso.lipschitz()).with_max_iter(150);
        let x0 = Vector::from_element(8, 1.0);
        let (_, trace) = run(&x0, &x0, Problem::Composite(&lasso), &params).unwrap();
        let report = check_certificates(&trace, &RateEnvelope::for_params(&params));
        prop_assert!(report.passed(), "{:?}", report.first_violation);
    }

    #[test]
    fn envelopes_are_nonincreasing(
        l in 1e-2..1e4f64,
        mu_frac in prop_oneof![Just(0.0), 0.0..1.0f64],
        gamma0 in 1e-4..1e4f64,
        alpha in 1e-2..1e2f64,
    ) {
        let mu = mu_frac * l;
        let kinds = [
            EnvelopeKind::Explicit,
            EnvelopeKind::ExtraGradient,
            EnvelopeKind::Composite,
            EnvelopeKind::CompositeAlt,
            EnvelopeKind::NagFlow,
            EnvelopeKind::NagFlowB,
            EnvelopeKind::SemiImplicit { alpha },
        ];
        for kind in kinds {
            let env = RateEnvelope::new(kind, l, mu, gamma0);
            let mut prev = env.value(0);
            prop_assert_eq!(prev, 1.0);
            for k in 1..300 {
                let v = env.value(k);
                prop_assert!(v <= prev && v >= 0.0, "{:?} k={}", kind, k);
                prev = v;
            }
        }
    }
}
