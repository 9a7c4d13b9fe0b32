use proptest::prelude::*;

use wsplab::graph::regular_labels;
use wsplab::graphon::{
    graphon_l2_distance, induced_graphon, induced_graphon_signal, signal_l2_distance,
};
use wsplab::sampling::{sample_graph_signal, sample_template};
use wsplab::{Graphon, GraphonSignal};

fn symmetric_values(k: usize, flat: &[f64]) -> Vec<Vec<f64>> {
    let mut v = vec![vec![0.0; k]; k];
    let mut it = flat.iter().cycle();
    for i in 0..k {
        for j in i..k {
            let x = *it.next().unwrap();
            v[i][j] = x;
            v[j][i] = x;
        }
    }
    v
}

fn step_graphon() -> impl Strategy<Value = Graphon> {
    (
        1usize..5,
        prop::collection::vec(0.05f64..0.95, 4),
        prop::collection::vec(0.0f64..=1.0, 15),
    )
        .prop_map(|(k, cuts, vals)| {
            let mut inner: Vec<f64> = cuts[..k - 1].to_vec();
            inner.sort_by(f64::total_cmp);
            inner.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            let mut bp = vec![0.0];
            bp.extend(inner);
            bp.push(1.0);
            let cells = bp.len() - 1;
            Graphon::step(bp, symmetric_values(cells, &vals)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn template_of_aligned_step_graphon_is_exact(
        k in 1usize..5,
        r in 1usize..5,
        vals in prop::collection::vec(0.0f64..=1.0, 10),
    ) {
        let n = k * r;
        let labels = regular_labels(n);
        let mut bp: Vec<f64> = (0..k).map(|j| labels[j * r]).collect();
        bp.push(1.0);
        let w = Graphon::step(bp, symmetric_values(k, &vals)).unwrap();
        let g = sample_template(&w, n).unwrap();
        prop_assert_eq!(graphon_l2_distance(&w, &induced_graphon(&g)), 0.0);
    }

    #[test]
    fn l2_distance_is_a_metric_on_step_graphons(
        a in step_graphon(),
        b in step_graphon(),
        c in step_graphon(),
    ) {
        let (ab, ba) = (graphon_l2_distance(&a, &b), graphon_l2_distance(&b, &a));
        prop_assert!((ab - ba).abs() <= 1e-15);
        prop_assert_eq!(graphon_l2_distance(&a, &a), 0.0);
        prop_assert!(ab >= 0.0);
        let (bc, ac) = (graphon_l2_distance(&b, &c), graphon_l2_distance(&a, &c));
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn signal_norm_is_nonnegative(amplitude in -2.0f64..2.0, frequency in 0.0f64..4.0) {
        prop_assert!(GraphonSignal::cosine(amplitude, frequency).norm() >= 0.0);
    }
}

#[test]
fn lipschitz_kernels_meet_template_bound_at_rate_one_over_n() {
    let kernels = [
        Graphon::product(),
        Graphon::average(),
        Graphon::exponential(2.0, 1.0).unwrap(),
    ];
    let sizes = [8usize, 16, 32, 64, 128, 256];
    for w in &kernels {
        let a_w = w.lipschitz().unwrap();
        let errs: Vec<f64> = sizes
            .iter()
            .map(|&n| {
                let e = graphon_l2_distance(w, &induced_graphon(&sample_template(w, n).unwrap()));
                assert!(
                    e <= 2.0 * a_w / n as f64,
                    "n = {n}: {e} > {}",
                    2.0 * a_w / n as f64
                );
                e
            })
            .collect();
        for p in errs.windows(2) {
            let ratio = p[0] / p[1];
            assert!((1.7..=2.3).contains(&ratio), "doubling ratio {ratio}");
        }
    }
}

#[test]
fn lipschitz_signals_meet_template_bound() {
    let w = Graphon::product();
    for x in [
        GraphonSignal::identity(),
        GraphonSignal::cosine(1.0, 2.0),
        GraphonSignal::affine(0.5, -0.3),
    ] {
        let a_x = x.lipschitz().unwrap();
        for n in [4usize, 16, 64, 256] {
            let g = sample_template(&w, n).unwrap();
            let xn = induced_graphon_signal(&sample_graph_signal(&x, &g), &g).unwrap();
            let e = signal_l2_distance(&x, &xn);
            assert!(e <= a_x / n as f64 + 1e-12, "{:?} n = {n}: {e}", x.shape());
        }
    }
}
