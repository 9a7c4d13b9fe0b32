use proptest::prelude::*;

use wsplab::bounds::{evaluate, node_stochasticity_alpha, BoundIngredients, BoundKind};

fn kind() -> impl Strategy<Value = BoundKind> {
    prop_oneof![
        Just(BoundKind::LemmaGeneric),
        Just(BoundKind::Prop1),
        Just(BoundKind::Prop2),
        Just(BoundKind::Lemma1),
        Just(BoundKind::Thm1),
        Just(BoundKind::Thm2),
        Just(BoundKind::Thm3),
        Just(BoundKind::Thm4),
    ]
}

prop_compose! {
    fn ingredients()(
        outer in 0.0f64..3.0,
        inner_frac in 0.0f64..=1.0,
        c in 0.01f64..=1.0,
        signal_norm in 0.0f64..5.0,
        n in 50usize..5000,
        n2 in 50usize..5000,
        chi in 0.08f64..=0.3,
        band in 0usize..6,
        margin in 0.01f64..1.0,
        layers in 1usize..4,
        width in 1usize..5,
        a_w in 0.0f64..3.0,
        a_x in 0.0f64..3.0,
        measured in any::<bool>(),
        errs in (0.0f64..0.5, 0.0f64..0.5),
    ) -> BoundIngredients {
        BoundIngredients {
            graphon_lipschitz: Some(a_w),
            signal_lipschitz: Some(a_x),
            outer_lipschitz: outer,
            inner_lipschitz: outer * inner_frac,
            c,
            signal_norm,
            n: Some(n),
            n2: Some(n2),
            chi1: chi,
            chi2: chi,
            chi3: chi,
            band_cardinality: band as f64,
            eigenvalue_margin: Some(margin),
            layers,
            width,
            graphon_error: Some(errs.0),
            signal_error: Some(errs.1),
            graphon_error2: measured.then_some(errs.0 * 0.5),
            signal_error2: measured.then_some(errs.1 * 0.5),
            ..BoundIngredients::default()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reports_are_the_sum_of_their_terms(kind in kind(), ing in ingredients()) {
        if let Ok(r) = evaluate(kind, &ing) {
            prop_assert_eq!(r.kind, kind);
            prop_assert_eq!(r.value, r.terms.total());
            prop_assert!(r.terms.transferability >= 0.0);
            prop_assert!(r.terms.discretization >= 0.0);
            prop_assert!(r.terms.non_transferable >= 0.0);
            prop_assert!((0.0..=1.0).contains(&r.confidence));
        }
    }

    #[test]
    fn inner_constant_never_exceeds_outer_without_a_flag(kind in kind(), ing in ingredients()) {
        if let Ok(r) = evaluate(kind, &ing) {
            prop_assert_ne!(r.assumptions.filter_response, Some(false));
        }
    }
}

/// `alpha(n, chi)/n` stops increasing after a handful of nodes; beyond that
/// every `1/n` term must shrink as `n` doubles.
#[test]
fn size_terms_decrease_along_doublings() {
    let chi = 0.1;
    for n in [32usize, 64, 128, 256, 512, 1024, 2048] {
        let (a, b) = (
            node_stochasticity_alpha(n, chi).unwrap() / n as f64,
            node_stochasticity_alpha(2 * n, chi).unwrap() / (2 * n) as f64,
        );
        assert!(b < a, "alpha/n rose from {a} to {b} at n = {n}");
    }
    let base = BoundIngredients {
        graphon_lipschitz: Some(1.0),
        signal_lipschitz: Some(1.0),
        outer_lipschitz: 1.2,
        inner_lipschitz: 0.4,
        c: 0.3,
        signal_norm: 1.0,
        chi1: chi,
        chi2: chi,
        chi3: chi,
        band_cardinality: 2.0,
        eigenvalue_margin: Some(0.1),
        layers: 2,
        width: 3,
        ..BoundIngredients::default()
    };
    for kind in [
        BoundKind::Prop1,
        BoundKind::Prop2,
        BoundKind::Thm1,
        BoundKind::Thm3,
    ] {
        let mut prev: Option<(f64, f64)> = None;
        for n in [64usize, 128, 256, 512, 1024, 2048, 4096] {
            let r = evaluate(
                kind,
                &BoundIngredients {
                    n: Some(n),
                    ..base.clone()
                },
            )
            .unwrap();
            if let Some((t, d)) = prev {
                assert!(r.terms.transferability < t, "{kind:?} n = {n}");
                assert!(r.terms.discretization < d, "{kind:?} n = {n}");
            }
            prev = Some((r.terms.transferability, r.terms.discretization));
        }
    }
    for kind in [BoundKind::Thm2, BoundKind::Thm4] {
        let mut prev = f64::INFINITY;
        for n in [64usize, 128, 256, 512, 1024, 2048, 4096] {
            let ing = BoundIngredients {
                n: Some(n),
                n2: Some(2 * n),
                ..base.clone()
            };
            let r = evaluate(kind, &ing).unwrap();
            assert!(
                r.terms.transferability + r.terms.discretization < prev,
                "{kind:?} n = {n}"
            );
            prev = r.terms.transferability + r.terms.discretization;
        }
    }
}
