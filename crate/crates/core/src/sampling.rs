//! Template, weighted and stochastic graphs sampled from a graphon.
//!
//! Labels and edges come from independent seeded streams, and edges are drawn
//! over the upper triangle (diagonal included) in row-major order, one uniform
//! per pair. Hence `sample_stochastic(w, n, s)` is exactly
//! `bernoulli_from_weighted(&sample_weighted(w, n, s), s)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{regular_labels, Graph, GraphSignal, Provenance};
use crate::graphon::{Graphon, GraphonSignal};
use crate::linalg::DenseMatrix;
use crate::rng::{derive_seed, stream, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    Template,
    Weighted,
    Stochastic,
    /// Weighted graph first, then one Bernoulli draw per entry.
    StochasticFromWeighted,
}

impl std::str::FromStr for SampleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "template" => Self::Template,
            "weighted" => Self::Weighted,
            "stochastic" => Self::Stochastic,
            "stochastic-from-weighted" | "stochastic_from_weighted" => Self::StochasticFromWeighted,
            _ => return Err(Error::Parse(format!("unknown sampling mode {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub n: usize,
    pub mode: SampleMode,
    pub seed: u64,
    pub trial: u64,
    pub self_loops: bool,
}

impl SampleSpec {
    pub fn new(n: usize, mode: SampleMode, seed: u64) -> Self {
        Self {
            n,
            mode,
            seed,
            trial: 0,
            self_loops: true,
        }
    }

    /// Seed actually used for the draws of this trial.
    pub fn trial_seed(&self) -> u64 {
        derive_seed(self.seed, &[self.trial])
    }
}

pub fn sample(w: &Graphon, spec: &SampleSpec) -> Result<Graph> {
    let seed = spec.trial_seed();
    let g = match spec.mode {
        SampleMode::Template => sample_template(w, spec.n)?,
        SampleMode::Weighted => sample_weighted(w, spec.n, seed)?,
        SampleMode::Stochastic | SampleMode::StochasticFromWeighted => {
            sample_stochastic(w, spec.n, seed)?
        }
    };
    Ok(if spec.self_loops {
        g
    } else {
        g.without_self_loops()
    })
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            range: ">= 1",
        });
    }
    Ok(())
}

fn kernel_matrix(w: &Graphon, labels: &[f64]) -> DenseMatrix {
    let n = labels.len();
    let mut s = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = w.eval(labels[i], labels[j]);
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    s
}

/// Labels `(i-1)/n`, entries `W(u_i, u_j)`.
pub fn sample_template(w: &Graphon, n: usize) -> Result<Graph> {
    check_n(n)?;
    let labels = regular_labels(n);
    let s = kernel_matrix(w, &labels);
    Graph::new(labels, s, Provenance::Template)
}

pub fn sample_labels(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, Purpose::Labels);
    let mut labels: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    labels.sort_by(f64::total_cmp);
    labels
}

/// Sorted i.i.d. uniform labels, entries `W(u_i, u_j)`.
pub fn sample_weighted(w: &Graphon, n: usize, seed: u64) -> Result<Graph> {
    check_n(n)?;
    let labels = sample_labels(n, seed);
    let s = kernel_matrix(w, &labels);
    Graph::new(labels, s, Provenance::Weighted)
}

pub fn sample_stochastic(w: &Graphon, n: usize, seed: u64) -> Result<Graph> {
    bernoulli_from_weighted(&sample_weighted(w, n, seed)?, seed)
}

/// One Bernoulli draw per unordered pair, mirrored; labels preserved.
pub fn bernoulli_from_weighted(g: &Graph, seed: u64) -> Result<Graph> {
    let s = g.gso();
    if let Some(v) = s.as_slice().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidGraph(format!(
            "edge probability {v} outside [0,1]"
        )));
    }
    let n = g.n();
    let mut rng = stream(seed, Purpose::Edges);
    let mut out = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let draw: f64 = rng.random();
            if draw < s.get(i, j) {
                out.set(i, j, 1.0);
                out.set(j, i, 1.0);
            }
        }
    }
    Graph::new(g.labels().to_vec(), out, Provenance::Stochastic)
}

/// `[x]_i = X(u_i)`.
pub fn sample_graph_signal(x: &GraphonSignal, g: &Graph) -> GraphSignal {
    GraphSignal::new(x.sample(g.labels()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn off_diagonal_density(g: &Graph) -> f64 {
        let n = g.n();
        let s = g.gso();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    sum += s.get(i, j);
                }
            }
        }
        sum / (n * (n - 1)) as f64
    }

    #[test]
    fn template_examples() {
        let g = sample_template(&Graphon::constant(0.4).unwrap(), 2).unwrap();
        assert_eq!(g.labels(), &[0.0, 0.5]);
        assert_eq!(g.gso().to_rows(), vec![vec![0.4, 0.4], vec![0.4, 0.4]]);
        let one = sample_template(&Graphon::average(), 1).unwrap();
        assert_eq!(one.gso().get(0, 0), 0.0);
        let p = sample_template(&Graphon::product(), 3).unwrap();
        assert_eq!(p.gso().get(2, 2), (2.0 / 3.0) * (2.0 / 3.0));
        assert!(sample_template(&Graphon::product(), 0).is_err());
    }

    #[test]
    fn weighted_examples() {
        let c = sample_weighted(&Graphon::constant(0.4).unwrap(), 7, 3).unwrap();
        assert!(c.gso().as_slice().iter().all(|&v| v == 0.4));
        let a = sample_weighted(&Graphon::product(), 20, 11).unwrap();
        let b = sample_weighted(&Graphon::product(), 20, 11).unwrap();
        assert_eq!(a, b);
        let g = sample_weighted(&Graphon::product(), 2, 5).unwrap();
        let (u, v) = (g.labels()[0], g.labels()[1]);
        assert!(u <= v);
        assert_eq!(
            g.gso().to_rows(),
            vec![vec![u * u, u * v], vec![u * v, v * v]]
        );
    }

    #[test]
    fn stochastic_extremes() {
        let z = sample_stochastic(&Graphon::constant(0.0).unwrap(), 30, 1).unwrap();
        assert!(z.gso().as_slice().iter().all(|&v| v == 0.0));
        let o = sample_stochastic(&Graphon::constant(1.0).unwrap(), 30, 1).unwrap();
        assert!(o.gso().as_slice().iter().all(|&v| v == 1.0));
        assert_eq!(o.provenance(), Provenance::Stochastic);
    }

    #[test]
    fn stochastic_density_concentrates() {
        let w = Graphon::constant(0.4).unwrap();
        let hits = (0..100u64)
            .filter(|&s| {
                (off_diagonal_density(&sample_stochastic(&w, 200, s).unwrap()) - 0.4).abs() <= 0.03
            })
            .count();
        assert!(hits >= 99, "{hits}");
    }

    #[test]
    fn stochastic_is_bernoulli_of_weighted() {
        let w = Graphon::product();
        let a = sample_stochastic(&w, 40, 9).unwrap();
        let b = bernoulli_from_weighted(&sample_weighted(&w, 40, 9).unwrap(), 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bernoulli_examples() {
        let zeros = Graph::unlabeled(DenseMatrix::zeros(5), Provenance::Weighted).unwrap();
        assert_eq!(
            bernoulli_from_weighted(&zeros, 1).unwrap().gso(),
            zeros.gso()
        );
        let ones =
            Graph::unlabeled(DenseMatrix::from_fn(5, |_, _| 1.0), Provenance::Weighted).unwrap();
        assert_eq!(bernoulli_from_weighted(&ones, 1).unwrap().gso(), ones.gso());
        let bad =
            Graph::unlabeled(DenseMatrix::from_fn(2, |_, _| 1.5), Provenance::External).unwrap();
        assert!(bernoulli_from_weighted(&bad, 1).is_err());
        let g = sample_template(&Graphon::constant(0.4).unwrap(), 200).unwrap();
        let d = off_diagonal_density(&bernoulli_from_weighted(&g, 4).unwrap());
        assert!((d - 0.4).abs() < 0.03);
    }

    #[test]
    fn expected_adjacency_matches_weights() {
        let w = Graphon::product();
        let g = sample_weighted(&w, 10, 2).unwrap();
        let reps = 2000;
        let mut acc = DenseMatrix::zeros(10);
        for r in 0..reps {
            let s = bernoulli_from_weighted(&g, derive_seed(77, &[r])).unwrap();
            for i in 0..10 {
                for j in 0..10 {
                    acc.set(i, j, acc.get(i, j) + s.gso().get(i, j));
                }
            }
        }
        let dev = acc
            .scaled(1.0 / reps as f64)
            .sub(g.gso())
            .unwrap()
            .max_abs();
        assert!(dev < 0.05, "{dev}");
    }

    #[test]
    fn graph_signal_sampling() {
        let w = Graphon::product();
        let t = sample_template(&w, 4).unwrap();
        assert_eq!(
            sample_graph_signal(&GraphonSignal::identity(), &t).values(),
            &[0.0, 0.25, 0.5, 0.75]
        );
        assert_eq!(
            sample_graph_signal(&GraphonSignal::constant(1.0), &t).values(),
            &[1.0; 4]
        );
        let g = sample_weighted(&w, 6, 8).unwrap();
        assert_eq!(
            sample_graph_signal(&GraphonSignal::identity(), &g).values(),
            g.labels()
        );
    }

    #[test]
    fn spec_trial_seeds_and_self_loops() {
        let w = Graphon::constant(0.5).unwrap();
        let mut spec = SampleSpec::new(20, SampleMode::Stochastic, 1);
        let a = sample(&w, &spec).unwrap();
        spec.trial = 1;
        let b = sample(&w, &spec).unwrap();
        assert_ne!(a, b);
        spec.self_loops = false;
        let c = sample(&w, &spec).unwrap();
        assert!((0..20).all(|i| c.gso().get(i, i) == 0.0));
    }
}
