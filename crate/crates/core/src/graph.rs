//! Graphs with node labels in `[0,1]`, graph signals, and their CSV formats.
//!
//! Edge lists are CSV with header `i,j,w` (0-based, upper triangle including
//! the diagonal). Labels live next to the edge list in `<stem>.labels.txt`,
//! one value per line. Signals are CSV with one row per node and one column
//! per feature.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{norm2, DenseMatrix};

/// Asymmetry tolerated in user-supplied matrices before symmetrization.
const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Template,
    Weighted,
    Stochastic,
    External,
}

/// Graph with sorted node labels and a dense symmetric shift operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<f64>,
    gso: DenseMatrix,
    provenance: Provenance,
}

impl Graph {
    /// Sorts nodes by label (stable), permuting `gso` to match.
    pub fn new(labels: Vec<f64>, gso: DenseMatrix, provenance: Provenance) -> Result<Self> {
        let n = gso.n();
        check_len(n, labels.len())?;
        if n == 0 {
            return Err(Error::InvalidGraph(
                "graph must have at least one node".into(),
            ));
        }
        if let Some(u) = labels.iter().find(|u| !(0.0..=1.0).contains(*u)) {
            return Err(Error::InvalidGraph(format!("label {u} outside [0,1]")));
        }
        if gso.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGraph("non-finite GSO entry".into()));
        }
        let asym = gso.max_asymmetry();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        if provenance != Provenance::External {
            if let Some(v) = gso.as_slice().iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::InvalidGraph(format!(
                    "sampled graph has entry {v} outside [0,1]"
                )));
            }
        }
        let gso = if asym > 0.0 {
            DenseMatrix::from_fn(n, |i, j| 0.5 * (gso.get(i, j) + gso.get(j, i)))
        } else {
            gso
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| labels[a].total_cmp(&labels[b]));
        if order.iter().enumerate().all(|(k, &i)| k == i) {
            return Ok(Self {
                labels,
                gso,
                provenance,
            });
        }
        Ok(Self {
            labels: order.iter().map(|&i| labels[i]).collect(),
            gso: gso.permuted(&order),
            provenance,
        })
    }

    /// Graph with the regular labels `(i-1)/n`.
    pub fn unlabeled(gso: DenseMatrix, provenance: Provenance) -> Result<Self> {
        let n = gso.n();
        Self::new(regular_labels(n), gso, provenance)
    }

    pub fn n(&self) -> usize {
        self.gso.n()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn gso(&self) -> &DenseMatrix {
        &self.gso
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Partition `[0, u_2, ..., u_n, 1]` of the induced step functions.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.n() + 1);
        b.push(0.0);
        b.extend_from_slice(&self.labels[1..]);
        b.push(1.0);
        b
    }

    /// Subgraph on the given nodes, which must be strictly increasing.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Self> {
        if nodes.is_empty() || nodes.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidGraph(
                "subgraph nodes must be nonempty and strictly increasing".into(),
            ));
        }
        if let Some(&i) = nodes.iter().find(|&&i| i >= self.n()) {
            return Err(Error::InvalidGraph(format!(
                "node {i} out of range for {} nodes",
                self.n()
            )));
        }
        Ok(Self {
            labels: nodes.iter().map(|&i| self.labels[i]).collect(),
            gso: DenseMatrix::from_fn(nodes.len(), |a, b| self.gso.get(nodes[a], nodes[b])),
            provenance: self.provenance,
        })
    }

    /// Maximum row sum of the GSO.
    pub fn max_degree(&self) -> f64 {
        (0..self.n())
            .map(|i| self.gso.row(i).iter().sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn without_self_loops(&self) -> Self {
        let mut gso = self.gso.clone();
        for i in 0..self.n() {
            gso.set(i, i, 0.0);
        }
        Self {
            labels: self.labels.clone(),
            gso,
            provenance: self.provenance,
        }
    }

    /// Writes the edge list to `path` and the labels to the sibling label file.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["i", "j", "w"])?;
        let n = self.n();
        for i in 0..n {
            for j in i..n {
                let v = self.gso.get(i, j);
                if v != 0.0 {
                    w.write_record([i.to_string(), j.to_string(), v.to_string()])?;
                }
            }
        }
        w.flush()?;
        let mut f = BufWriter::new(File::create(labels_path(path))?);
        for u in &self.labels {
            writeln!(f, "{u}")?;
        }
        f.flush()?;
        Ok(())
    }

    /// Reads an edge list; labels come from `labels` if given, else the
    /// sibling label file if present, else the regular labels.
    pub fn load_csv(path: &Path, labels: Option<&Path>) -> Result<Self> {
        let mut edges = Vec::new();
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)?;
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["i", "j", "w"] {
            return Err(Error::Parse(format!(
                "expected header i,j,w in {}",
                path.display()
            )));
        }
        for rec in rdr.deserialize() {
            let (i, j, w): (usize, usize, f64) = rec?;
            edges.push((i, j, w));
        }
        let sibling = labels_path(path);
        let labels = match labels {
            Some(p) => Some(read_column(p)?),
            None if sibling.exists() => Some(read_column(&sibling)?),
            None => None,
        };
        let n = match &labels {
            Some(l) => l.len(),
            None => edges
                .iter()
                .map(|&(i, j, _)| i.max(j) + 1)
                .max()
                .unwrap_or(0),
        };
        let mut gso = DenseMatrix::zeros(n);
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i},{j}) out of range for {n} nodes"
                )));
            }
            gso.set(i, j, w);
            gso.set(j, i, w);
        }
        match labels {
            Some(l) => Self::new(l, gso, Provenance::External),
            None => Self::unlabeled(gso, Provenance::External),
        }
    }
}

pub fn regular_labels(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / n as f64).collect()
}

/// `graph.csv` -> `graph.labels.txt`.
pub fn labels_path(edges: &Path) -> PathBuf {
    let stem = edges
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    edges.with_file_name(format!("{stem}.labels.txt"))
}

fn read_column(path: &Path) -> Result<Vec<f64>> {
    let f = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in f.lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        out.push(
            t.parse()
                .map_err(|e| Error::Parse(format!("{t:?} in {}: {e}", path.display())))?,
        );
    }
    Ok(out)
}

/// Real vector indexed by nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GraphSignal(Vec<f64>);

impl GraphSignal {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.0)
    }
}

impl From<Vec<f64>> for GraphSignal {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Reads a node-major CSV into feature-major vectors.
pub fn read_features_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut features: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if features.is_empty() {
            features = vec![Vec::new(); rec.len()];
        } else if rec.len() != features.len() {
            return Err(Error::Parse(format!(
                "ragged signal rows in {}",
                path.display()
            )));
        }
        for (f, field) in features.iter_mut().zip(rec.iter()) {
            f.push(
                field
                    .parse()
                    .map_err(|e| Error::Parse(format!("{field:?}: {e}")))?,
            );
        }
    }
    Ok(features)
}

pub fn write_features_csv(path: &Path, features: &[Vec<f64>]) -> Result<()> {
    let n = features.first().map_or(0, Vec::len);
    for f in features {
        check_len(n, f.len())?;
    }
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    for i in 0..n {
        w.write_record(features.iter().map(|f| f[i].to_string()))?;
    }
    w.flush()?;
    Ok(())
}
