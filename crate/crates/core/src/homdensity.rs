//! Homomorphism counts and densities of small motifs.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphon::{Graphon, Kernel};
use crate::rng::{stream, Purpose};

pub const MAX_MOTIF_NODES: usize = 6;
pub const MAX_MAPS: f64 = 1e8;

/// Simple undirected motif on nodes `0..nodes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MotifJson", into = "MotifJson")]
pub struct Motif {
    nodes: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct MotifJson {
    nodes: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<MotifJson> for Motif {
    type Error = Error;

    fn try_from(j: MotifJson) -> Result<Self> {
        Motif::new(j.nodes, j.edges.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<Motif> for MotifJson {
    fn from(m: Motif) -> Self {
        MotifJson {
            nodes: m.nodes,
            edges: m.edges.into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl Motif {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if nodes == 0 || nodes > MAX_MOTIF_NODES {
            return Err(Error::OutOfRange {
                name: "motif nodes",
                value: nodes as f64,
                range: "1..=6",
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b) in &edges {
            if a >= nodes || b >= nodes {
                return Err(Error::Parse(format!("motif edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::Parse("motifs may not have self-loops".into()));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Parse(format!("duplicate motif edge ({a},{b})")));
            }
        }
        Ok(Self { nodes, edges })
    }

    pub fn node() -> Self {
        Self {
            nodes: 1,
            edges: vec![],
        }
    }

    pub fn edge() -> Self {
        Self {
            nodes: 2,
            edges: vec![(0, 1)],
        }
    }

    /// Path with two edges.
    pub fn path2() -> Self {
        Self {
            nodes: 3,
            edges: vec![(0, 1), (1, 2)],
        }
    }

    pub fn triangle() -> Self {
        Self {
            nodes: 3,
            edges: vec![(0, 1), (1, 2), (0, 2)],
        }
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "node" => Ok(Self::node()),
            "edge" => Ok(Self::edge()),
            "path2" => Ok(Self::path2()),
            "triangle" => Ok(Self::triangle()),
            _ => Err(Error::Parse(format!("unknown motif {name:?}"))),
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// For each node, its neighbours with a smaller index.
    fn back_neighbours(&self) -> Vec<Vec<usize>> {
        let mut back = vec![Vec::new(); self.nodes];
        for &(a, b) in &self.edges {
            back[a.max(b)].push(a.min(b));
        }
        back
    }
}

fn extend(
    s: &crate::linalg::DenseMatrix,
    back: &[Vec<usize>],
    assigned: &mut Vec<usize>,
    weight: f64,
) -> f64 {
    let v = assigned.len();
    if v == back.len() {
        return weight;
    }
    let mut total = 0.0;
    for a in 0..s.n() {
        let row = s.row(a);
        let factor: f64 = back[v].iter().map(|&u| row[assigned[u]]).product();
        if factor == 0.0 {
            continue;
        }
        assigned.push(a);
        total += extend(s, back, assigned, weight * factor);
        assigned.pop();
    }
    total
}

/// `sum_beta prod_{(i,j) in E'} [S]_{beta(i) beta(j)}` over all maps
/// `beta: V' -> V`; self-loop weights take part.
pub fn hom_count(f: &Motif, g: &Graph) -> Result<f64> {
    let n = g.n();
    let maps = (n as f64).powi(f.nodes as i32);
    if maps > MAX_MAPS {
        return Err(Error::SizeExplosion {
            maps,
            limit: MAX_MAPS,
        });
    }
    let back = f.back_neighbours();
    let s = g.gso();
    let partial: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut assigned = Vec::with_capacity(f.nodes);
            assigned.push(first);
            extend(s, &back, &mut assigned, 1.0)
        })
        .collect();
    Ok(partial.iter().sum())
}

/// `hom(F, G) / n^{|V'|}`.
pub fn hom_density_graph(f: &Motif, g: &Graph) -> Result<f64> {
    Ok(hom_count(f, g)? / (g.n() as f64).powi(f.nodes as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of `t(F, W)`; exact `p^{|E'|}` for constant graphons.
pub fn hom_density_graphon(
    f: &Motif,
    w: &Graphon,
    samples: usize,
    seed: u64,
) -> Result<DensityEstimate> {
    if let Some(Kernel::Constant { p }) = w.kernel() {
        return Ok(DensityEstimate {
            value: p.powi(f.edges.len() as i32),
            std_error: 0.0,
        });
    }
    if samples < 1000 {
        return Err(Error::Precondition(format!(
            "at least 1000 samples required, got {samples}"
        )));
    }
    let mut rng = stream(seed, Purpose::MonteCarlo);
    let mut u = vec![0.0; f.nodes];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        u.iter_mut().for_each(|x| *x = rng.random::<f64>());
        let v: f64 = f.edges.iter().map(|&(a, b)| w.eval(u[a], u[b])).product();
        sum += v;
        sum_sq += v * v;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = ((sum_sq / m - mean * mean) * m / (m - 1.0)).max(0.0);
    Ok(DensityEstimate {
        value: mean,
        std_error: (var / m).sqrt(),
    })
}
