//! End-to-end checks of the analytic machinery and the experiment harness.
//!
//! Runs without the libtest harness so every check prints exactly one
//! `PASS`/`FAIL` line, in order, even when stdout is not captured.

use std::time::{Duration, Instant};

use rand::Rng;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wsplab::bounds::{mc_verify_edge_norm, mc_verify_spacing};
use wsplab::experiments::{
    emit_report, run_train_transfer, run_transfer_sweep, run_transfer_sweep_with, ExperimentConfig,
};
use wsplab::filters::{apply_graph_filter, apply_spectral};
use wsplab::gnn::{gnn_forward, loss_and_gradient, wnn_forward};
use wsplab::graphon::{
    graphon_l2_distance, graphon_l2_distance_with, induced_graphon, induced_graphon_signal,
    signal_l2_distance_with, GridPoints, StepFunction,
};
use wsplab::homdensity::{hom_density_graph, hom_density_graphon, Motif};
use wsplab::linalg::{norm2, DenseMatrix};
use wsplab::sampling::{sample, sample_graph_signal, sample_template, SampleMode, SampleSpec};
use wsplab::spectral::{
    eigendecompose, gft, graph_spectrum, graphon_spectrum, inverse_gft, operator_spectrum,
};
use wsplab::{
    CoefficientTensor, FilterCoeffs, GnnConfig, Graph, GraphSignal, Graphon, GraphonSignal,
    Nonlinearity, Provenance, Scale,
};

const TRANSFER_FILTER: &str = include_str!("../../../configs/transfer_filter.json");
const TRANSFER_GNN: &str = include_str!("../../../configs/transfer_gnn.json");
const TRAIN_TRANSFER: &str = include_str!("../../../configs/train_transfer.json");

/// Exact triangle density of the two-block graphon: `tr(P^3) / 8`.
const SBM_TRIANGLE_DENSITY: f64 = 0.112;
/// Target quoted in the task statement, which does not match the graphon.
const QUOTED_TRIANGLE_DENSITY: f64 = 0.1144;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_graph(rng: &mut impl Rng, n: usize) -> Graph {
    let mut s = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = rng.random::<f64>();
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    Graph::unlabeled(s, Provenance::External).unwrap()
}

fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn relative(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm2(&diff) / norm2(a).max(f64::MIN_POSITIVE)
}

fn filter_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=64);
        let k = rng.random_range(1..=8);
        let g = random_graph(&mut rng, n);
        let h = FilterCoeffs::new(random_vec(&mut rng, k)).unwrap();
        let x = GraphSignal::new(random_vec(&mut rng, n));
        let d = eigendecompose(&g, Scale::Normalized).unwrap();
        let vertex = apply_graph_filter(&h, &g, &x, Scale::Normalized).unwrap();
        let spectral = apply_spectral(&h, &d, &x, Scale::Normalized).unwrap();
        worst = worst.max(relative(vertex.values(), spectral.values()));
    }
    outcome(
        worst <= 1e-9,
        format!("max relative difference {worst:.2e} (tol 1e-9)"),
    )
}

fn gft_parseval() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let (mut energy, mut round_trip) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.random_range(2..=64);
        let g = random_graph(&mut rng, n);
        let d = eigendecompose(&g, Scale::Raw).unwrap();
        let x = GraphSignal::new(random_vec(&mut rng, n));
        let coeffs = gft(&x, &d).unwrap();
        energy = energy.max((norm2(&coeffs) - x.norm()).abs() / x.norm());
        round_trip = round_trip.max(relative(
            x.values(),
            inverse_gft(&coeffs, &d).unwrap().values(),
        ));
    }
    outcome(
        energy <= 1e-10 && round_trip <= 1e-10,
        format!("energy {energy:.2e}, round trip {round_trip:.2e} (tol 1e-10)"),
    )
}

fn template_discretization() -> Outcome {
    let m = 2048;
    let w = Graphon::product();
    let x = GraphonSignal::identity();
    let sizes = [8, 16, 32, 64, 128, 256, 512];
    let mut errors = Vec::new();
    let mut pass = true;
    for &n in &sizes {
        let g = sample_template(&w, n).unwrap();
        let xn = induced_graphon_signal(&sample_graph_signal(&x, &g), &g).unwrap();
        let ew = graphon_l2_distance_with(&w, &induced_graphon(&g), m);
        let ex = signal_l2_distance_with(&x, &xn, m);
        pass &= ew <= 2.0 / n as f64 && ex <= 1.0 / n as f64;
        errors.push((ew, ex));
    }
    let ratios: Vec<(f64, f64)> = errors
        .windows(2)
        .map(|p| (p[0].0 / p[1].0, p[0].1 / p[1].1))
        .collect();
    pass &= ratios
        .iter()
        .all(|&(a, b)| (1.7..=2.3).contains(&a) && (1.7..=2.3).contains(&b));
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(a, b)| {
            (lo.min(a).min(b), hi.max(a).max(b))
        });
    outcome(
        pass,
        format!(
            "n=512 errors {:.2e} / {:.2e}; doubling ratios in [{lo:.3}, {hi:.3}]",
            errors[6].0, errors[6].1
        ),
    )
}

fn random_step_graphon(rng: &mut impl Rng) -> Graphon {
    let cells = rng.random_range(1..=5);
    let mut cuts: Vec<f64> = (1..cells).map(|_| rng.random_range(0.05..0.95)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let mut breakpoints = vec![0.0];
    breakpoints.extend(cuts);
    breakpoints.push(1.0);
    let k = breakpoints.len() - 1;
    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let v = rng.random::<f64>();
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    Graphon::step(breakpoints, values).unwrap()
}

fn eigenvalue_facts() -> Outcome {
    let constant = Graphon::constant(0.4).unwrap();
    let constant_err = [1, 2, 7, 50, 300]
        .iter()
        .map(|&n| {
            let g = sample_template(&constant, n).unwrap();
            (graph_spectrum(&g, Scale::Normalized)
                .unwrap()
                .get_or_zero(1)
                - 0.4)
                .abs()
        })
        .fold(0.0f64, f64::max);

    let sbm = Graphon::builtin("sbm2").unwrap();
    let spec = graphon_spectrum(&sbm, 2048).unwrap();
    let root = 0.05f64.sqrt();
    let (l1, l2) = ((0.7 + root) / 2.0, (0.7 - root) / 2.0);
    let sbm_err = (spec.spectrum().get_or_zero(1) - l1)
        .abs()
        .max((spec.spectrum().get_or_zero(2) - l2).abs());

    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut slack = f64::INFINITY;
    for _ in 0..50 {
        let (a, b) = (random_step_graphon(&mut rng), random_step_graphon(&mut rng));
        let (sa, sb) = (
            operator_spectrum(&a).unwrap(),
            operator_spectrum(&b).unwrap(),
        );
        let dist = graphon_l2_distance(&a, &b);
        let pos = sa.max_positive_index().max(sb.max_positive_index());
        let neg = sa.max_negative_index().max(sb.max_negative_index());
        for i in (1..=pos).chain((1..=neg).map(|i| -i)) {
            slack = slack.min(dist - (sa.get_or_zero(i) - sb.get_or_zero(i)).abs());
        }
    }
    outcome(
        constant_err <= 1e-12 && sbm_err <= 1e-3 && slack >= -1e-12,
        format!(
            "constant {constant_err:.1e}; two-block {sbm_err:.2e}; min perturbation slack {slack:.3e}"
        ),
    )
}

fn spacing_bound() -> Outcome {
    let r = mc_verify_spacing(100, 0.1, 0.1, 2000, 505).unwrap();
    outcome(
        r.passes(),
        format!(
            "frequency {:.4} vs {:.2} - 3 x {:.4}",
            r.frequency, r.stated_confidence, r.std_error
        ),
    )
}

fn edge_norm_bound() -> Outcome {
    let w = Graphon::constant(0.4).unwrap();
    let r = mc_verify_edge_norm(&w, 200, 0.1, 200, 606).unwrap();
    outcome(
        r.passes(),
        format!(
            "frequency {:.4} vs {:.2} - 3 x {:.4}",
            r.frequency, r.stated_confidence, r.std_error
        ),
    )
}

fn gradient_check() -> Outcome {
    let cfg = GnnConfig::new(vec![3, 3, 3], 3, Nonlinearity::Tanh).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let g = random_graph(&mut rng, 12);
    let x: Vec<Vec<f64>> = (0..3).map(|_| random_vec(&mut rng, 12)).collect();
    let target: Vec<Vec<f64>> = (0..3).map(|_| random_vec(&mut rng, 12)).collect();
    let h = CoefficientTensor::random(&cfg, 708, false);
    let (_, grad) = loss_and_gradient(&h, &cfg, &g, &x, &target).unwrap();
    let step = 1e-6;
    let mut worst = 0.0f64;
    for l in 0..cfg.layers() {
        let mut fd = vec![0.0; h.layer(l).len()];
        for (p, slot) in fd.iter_mut().enumerate() {
            let mut up = h.clone();
            up.layer_mut(l)[p] += step;
            let mut down = h.clone();
            down.layer_mut(l)[p] -= step;
            let lu = loss_and_gradient(&up, &cfg, &g, &x, &target).unwrap().0;
            let ld = loss_and_gradient(&down, &cfg, &g, &x, &target).unwrap().0;
            *slot = (lu - ld) / (2.0 * step);
        }
        worst = worst.max(relative(grad.layer(l), &fd));
    }
    outcome(
        worst < 1e-5,
        format!("max relative error per layer {worst:.2e} (tol 1e-5)"),
    )
}

fn wnn_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let n = 10;
    let template = sample_template(&Graphon::product(), n).unwrap();
    let s = random_graph(&mut rng, n).gso().clone();
    let g = Graph::new(template.labels().to_vec(), s, Provenance::Template).unwrap();
    let w = induced_graphon(&g);
    let cfg = GnnConfig::new(vec![2, 3, 2], 3, Nonlinearity::Relu).unwrap();
    let h = CoefficientTensor::random(&cfg, 809, false);
    let x: Vec<Vec<f64>> = (0..2).map(|_| random_vec(&mut rng, n)).collect();
    let xw: Vec<GraphonSignal> = x
        .iter()
        .map(|v| GraphonSignal::from_step(StepFunction::regular(v.clone())))
        .collect();
    let y = gnn_forward(&h, &cfg, &g, &x).unwrap();
    let mut worst = 0.0f64;
    for m in [n, 3 * n] {
        let yw = wnn_forward(&h, &cfg, &w, &xw, m).unwrap();
        let pts = GridPoints::Midpoint.points(m);
        for (yg, ywf) in y.iter().zip(&yw) {
            let induced = induced_graphon_signal(&GraphSignal::new(yg.clone()), &g).unwrap();
            for &u in &pts {
                worst = worst.max((induced.eval(u) - ywf.eval(u)).abs());
            }
        }
    }
    outcome(
        worst <= 1e-9,
        format!("max pointwise difference {worst:.2e} (tol 1e-9)"),
    )
}

fn transfer_trend() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, json) in [("filter", TRANSFER_FILTER), ("gnn", TRANSFER_GNN)] {
        let cfg = ExperimentConfig::from_json(json).unwrap();
        let report = run_transfer_sweep(&cfg).unwrap();
        let check = report.violation_check();
        let monotone = report.mean_error_non_increasing();
        pass &= monotone && check.passes();
        let means: Vec<String> = report
            .summary
            .iter()
            .map(|s| format!("{:.4}", s.mean_error))
            .collect();
        lines.push(format!(
            "{name}: means [{}], violations {}/{} (limit {:.3})",
            means.join(", "),
            check.violations,
            check.rows,
            check.limit
        ));
    }
    outcome(pass, lines.join("; "))
}

fn training_ordering() -> Outcome {
    let cfg = ExperimentConfig::from_json(TRAIN_TRANSFER).unwrap();
    let report = run_train_transfer(&cfg).unwrap();
    let order = ["penalized", "gnn", "filter"];
    let ordering = report.ordering(&order);
    let held = ordering.iter().filter(|(_, ok)| *ok).count();
    let per_size: Vec<String> = ordering
        .iter()
        .map(|&(n, ok)| {
            let v: Vec<String> = order
                .iter()
                .map(|s| {
                    format!(
                        "{:.3}",
                        report.mean_relative_difference(s, n).unwrap_or(f64::NAN)
                    )
                })
                .collect();
            format!("n={n} {} {}", v.join("/"), if ok { "ok" } else { "no" })
        })
        .collect();
    outcome(
        held >= 3,
        format!("ordering holds at {held}/4: {}", per_size.join(", ")),
    )
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

fn homomorphism_convergence() -> Outcome {
    let w = Graphon::builtin("sbm2").unwrap();
    let triangle = Motif::triangle();
    let densities: Vec<Vec<f64>> = [50, 100, 200, 400]
        .iter()
        .map(|&n| {
            (0..20)
                .map(|t| {
                    let spec = SampleSpec {
                        trial: t,
                        ..SampleSpec::new(n, SampleMode::Stochastic, 1111)
                    };
                    hom_density_graph(&triangle, &sample(&w, &spec).unwrap()).unwrap()
                })
                .collect()
        })
        .collect();
    let deviation = |target: f64| -> Vec<f64> {
        densities
            .iter()
            .map(|d| median(d.iter().map(|t| (t - target).abs()).collect()))
            .collect()
    };
    let exact = deviation(SBM_TRIANGLE_DENSITY);
    let quoted = deviation(QUOTED_TRIANGLE_DENSITY);
    let decreasing = |v: &[f64]| v.windows(2).all(|p| p[1] < p[0]);
    let edge = hom_density_graphon(&Motif::edge(), &Graphon::constant(0.4).unwrap(), 1000, 0)
        .unwrap()
        .value;
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    outcome(
        decreasing(&exact) && edge == 0.4,
        format!(
            "median |t - {SBM_TRIANGLE_DENSITY}| [{}]; edge density {edge}; \
             against {QUOTED_TRIANGLE_DENSITY} (informational): [{}] decreasing {}",
            fmt(&exact),
            fmt(&quoted),
            decreasing(&quoted)
        ),
    )
}

fn determinism() -> Outcome {
    let cfg = ExperimentConfig::from_json(TRANSFER_GNN).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let csv = |threads: usize| -> Vec<u8> {
        let out = dir.path().join(format!("t{threads}"));
        let report = run_transfer_sweep_with(&cfg, Some(threads)).unwrap();
        let files = emit_report(&report, &out).unwrap();
        std::fs::read(&files.csv).unwrap()
    };
    let (one, four) = (csv(1), csv(4));
    outcome(
        one == four && !one.is_empty(),
        format!(
            "{} bytes with 1 worker, {} bytes with 4 workers",
            one.len(),
            four.len()
        ),
    )
}

fn main() {
    // `cargo test -- --list` style probes must not run the slow checks.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let checks: [(&str, fn() -> Outcome, Duration); 12] = [
        (
            "spectral and vertex-domain filters agree",
            filter_equivalence,
            Duration::from_secs(5),
        ),
        (
            "GFT preserves energy and inverts",
            gft_parseval,
            Duration::from_secs(60),
        ),
        (
            "template discretization error",
            template_discretization,
            Duration::from_secs(30),
        ),
        (
            "eigenvalue facts",
            eigenvalue_facts,
            Duration::from_secs(120),
        ),
        (
            "label spacing concentration",
            spacing_bound,
            Duration::from_secs(5),
        ),
        (
            "edge noise spectral norm",
            edge_norm_bound,
            Duration::from_secs(60),
        ),
        (
            "GNN gradient matches finite differences",
            gradient_check,
            Duration::from_secs(10),
        ),
        (
            "WNN equals induced GNN on a step graphon",
            wnn_exactness,
            Duration::from_secs(60),
        ),
        (
            "transfer error trend and bound",
            transfer_trend,
            Duration::from_secs(600),
        ),
        (
            "trained transfer ordering",
            training_ordering,
            Duration::from_secs(900),
        ),
        (
            "homomorphism density convergence",
            homomorphism_convergence,
            Duration::from_secs(120),
        ),
        (
            "sweep determinism across worker counts",
            determinism,
            Duration::from_secs(600),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let pass = result.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "{} {:>2} {name}: {} [{:.1}s / {}s{}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
    }
    println!(
        "{} of {} checks passed",
        checks.len() - failed,
        checks.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
