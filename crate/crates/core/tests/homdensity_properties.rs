use proptest::prelude::*;

use wsplab::homdensity::{hom_density_graph, Motif};
use wsplab::linalg::DenseMatrix;
use wsplab::sampling::{sample, SampleMode, SampleSpec};
use wsplab::{Graph, Graphon, Provenance};

fn motif() -> impl Strategy<Value = Motif> {
    prop_oneof![
        Just(Motif::node()),
        Just(Motif::edge()),
        Just(Motif::path2()),
        Just(Motif::triangle()),
        Just(Motif::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()),
    ]
}

fn weighted_graph() -> impl Strategy<Value = Graph> {
    (1usize..12).prop_flat_map(|n| {
        prop::collection::vec(0.0f64..=1.0, n * n).prop_map(move |flat| {
            let s = DenseMatrix::from_fn(n, |i, j| flat[i.min(j) * n + i.max(j)]);
            Graph::unlabeled(s, Provenance::External).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_is_a_probability(f in motif(), g in weighted_graph()) {
        let t = hom_density_graph(&f, &g).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&t));
    }

    #[test]
    fn density_ignores_relabeling(
        f in motif(),
        g in weighted_graph(),
        key in prop::collection::vec(any::<u32>(), 12),
    ) {
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.sort_by_key(|&i| key[i]);
        let gp = Graph::unlabeled(g.gso().permuted(&perm), Provenance::External).unwrap();
        let (a, b) = (hom_density_graph(&f, &g).unwrap(), hom_density_graph(&f, &gp).unwrap());
        prop_assert!((a - b).abs() <= 1e-12);
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Edge and two-path densities of the two-block graphon are `0.45` and
/// `(0.5^2 + 0.4^2)/2 = 0.205`. Label noise only shrinks by `1/sqrt(2)` per
/// doubling, so 20 graphs per size leave the medians too noisy to order
/// reliably; 100 graphs per size do.
#[test]
fn stochastic_densities_converge_to_the_graphon() {
    let w = Graphon::builtin("sbm2").unwrap();
    for (f, limit) in [(Motif::edge(), 0.45), (Motif::path2(), 0.205)] {
        let mut prev = f64::INFINITY;
        for n in [50usize, 100, 200, 400] {
            let devs: Vec<f64> = (0..100)
                .map(|t| {
                    let spec = SampleSpec {
                        trial: t,
                        ..SampleSpec::new(n, SampleMode::Stochastic, 77)
                    };
                    (hom_density_graph(&f, &sample(&w, &spec).unwrap()).unwrap() - limit).abs()
                })
                .collect();
            let m = median(devs);
            assert!(
                m < prev,
                "{} nodes: median deviation {m} !< {prev}",
                f.nodes()
            );
            prev = m;
        }
    }
}
