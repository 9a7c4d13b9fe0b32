use proptest::prelude::*;

use wsplab::bounds::{bound_generic_filter, BoundIngredients};
use wsplab::filters::{
    apply_graph_filter, apply_graphon_filter, estimate_spectral_profile,
    induced_graphon_filter_output, shift_commutation_check, PROFILE_GRID,
};
use wsplab::graphon::{
    graphon_l2_distance, induced_graphon, induced_graphon_signal, signal_l2_distance,
};
use wsplab::linalg::DenseMatrix;
use wsplab::sampling::{sample_graph_signal, sample_template};
use wsplab::spectral::{
    c_band_cardinality, c_eigenvalue_margin, graph_spectrum, operator_spectrum,
};
use wsplab::{FilterCoeffs, Graph, GraphSignal, Graphon, GraphonSignal, Provenance, Scale};

fn graph_and_signals(max_n: usize) -> impl Strategy<Value = (Graph, Vec<f64>, Vec<f64>)> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0f64..=1.0, n * n),
            prop::collection::vec(-1.0f64..1.0, n),
            prop::collection::vec(-1.0f64..1.0, n),
        )
            .prop_map(move |(flat, x, y)| {
                let s = DenseMatrix::from_fn(n, |i, j| flat[i.min(j) * n + i.max(j)]);
                (Graph::unlabeled(s, Provenance::External).unwrap(), x, y)
            })
    })
}

fn taps() -> impl Strategy<Value = FilterCoeffs> {
    prop::collection::vec(-1.0f64..1.0, 1..6).prop_map(|t| FilterCoeffs::new(t).unwrap())
}

fn scale() -> impl Strategy<Value = Scale> {
    prop_oneof![Just(Scale::Raw), Just(Scale::Normalized)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn filters_commute_with_the_shift((g, x, _) in graph_and_signals(8), h in taps()) {
        let residual = shift_commutation_check(&h, &g, &GraphSignal::new(x)).unwrap();
        prop_assert!(residual < 1e-8, "{}", residual);
    }

    #[test]
    fn filters_are_linear(
        (g, x, y) in graph_and_signals(20),
        h in taps(),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let f = |v: Vec<f64>| apply_graph_filter(&h, &g, &GraphSignal::new(v), Scale::Normalized).unwrap().into_values();
        let lhs = f(combo);
        let (fx, fy) = (f(x), f(y));
        for (i, l) in lhs.iter().enumerate() {
            prop_assert!((l - (a * fx[i] + b * fy[i])).abs() <= 1e-10);
        }
    }

    #[test]
    fn filters_are_permutation_equivariant(
        (g, x, _) in graph_and_signals(20),
        h in taps(),
        scale in scale(),
        key in prop::collection::vec(any::<u32>(), 20),
    ) {
        let n = g.n();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&i| key[i]);
        let gp = Graph::unlabeled(g.gso().permuted(&perm), Provenance::External).unwrap();
        let xp: Vec<f64> = perm.iter().map(|&i| x[i]).collect();
        let y = apply_graph_filter(&h, &g, &GraphSignal::new(x), scale).unwrap();
        let yp = apply_graph_filter(&h, &gp, &GraphSignal::new(xp), scale).unwrap();
        let tol = 1e-12 * (1.0 + y.values().iter().fold(0.0f64, |m, v| m.max(v.abs())));
        for (a, &i) in perm.iter().enumerate() {
            prop_assert!((yp.values()[a] - y.values()[i]).abs() <= tol);
        }
    }
}

#[test]
fn template_filter_outputs_stay_within_the_generic_bound() {
    let w = Graphon::product();
    let x = GraphonSignal::identity();
    let c = 0.2;
    let h = FilterCoeffs::new(vec![0.1, 0.5, 0.25]).unwrap();
    let profile = estimate_spectral_profile(&h, c, PROFILE_GRID).unwrap();
    assert!(profile.satisfies_as2);
    let limit = apply_graphon_filter(&h, &w, &x, 2048).unwrap();
    let limit_spectrum = operator_spectrum(&w).unwrap();
    for n in [8usize, 16, 32, 64, 128] {
        let g = sample_template(&w, n).unwrap();
        let xn = sample_graph_signal(&x, &g);
        let out = induced_graphon_filter_output(&h, &g, &xn).unwrap();
        let spectrum = graph_spectrum(&g, Scale::Normalized).unwrap();
        let band = c_band_cardinality(&limit_spectrum, c)
            .unwrap()
            .max(c_band_cardinality(&spectrum, c).unwrap());
        let ing = BoundIngredients {
            outer_lipschitz: profile.outer_lipschitz,
            inner_lipschitz: profile.inner_lipschitz,
            c,
            signal_norm: x.norm(),
            band_cardinality: band as f64,
            eigenvalue_margin: Some(c_eigenvalue_margin(&limit_spectrum, &spectrum, c).unwrap()),
            graphon_error: Some(graphon_l2_distance(&w, &induced_graphon(&g))),
            signal_error: Some(signal_l2_distance(
                &x,
                &induced_graphon_signal(&xn, &g).unwrap(),
            )),
            ..BoundIngredients::default()
        };
        let bound = bound_generic_filter(&ing).unwrap().value;
        let err = signal_l2_distance(&limit, &out);
        assert!(err <= bound, "n = {n}: error {err} exceeds bound {bound}");
    }
}
