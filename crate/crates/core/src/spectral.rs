//! Eigendecompositions with signed eigenvalue indices, GFT/WFT, and the band
//! constants used by the transferability bounds.
//!
//! Positive eigenvalues get indices `1, 2, ...` in decreasing order, zeros
//! continue the positive indices, and negative eigenvalues get `-1, -2, ...`
//! starting from the most negative. Storage order is by decreasing magnitude,
//! positive before negative on ties, zeros last.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::graph::{Graph, GraphSignal};
use crate::graphon::{Graphon, GraphonSignal, GridPoints, StepFunction, StepKernel, DEFAULT_GRID};
use crate::linalg::{dot, symmetric_eigen, symmetric_eigenvalues, DenseMatrix};

/// Eigenvalues at or below this magnitude are indexed as zeros.
pub const ZERO_EIGENVALUE: f64 = 1e-10;

/// Whether eigenvalues are those of `S` or of `S/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Raw,
    Normalized,
}

impl Scale {
    /// Multiplier applied to `S` on an `n`-node graph.
    pub fn factor(self, n: usize) -> f64 {
        match self {
            Scale::Raw => 1.0,
            Scale::Normalized => 1.0 / n as f64,
        }
    }
}

impl std::fmt::Display for Scale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scale::Raw => "raw",
            Scale::Normalized => "normalized",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub index: i64,
    pub value: f64,
}

/// Eigenvalues with signed indices, in storage order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum {
    entries: Vec<Eigenvalue>,
}

fn storage_cmp(a: f64, b: f64) -> Ordering {
    let za = a.abs() <= ZERO_EIGENVALUE;
    let zb = b.abs() <= ZERO_EIGENVALUE;
    za.cmp(&zb)
        .then(b.abs().total_cmp(&a.abs()))
        .then((b > 0.0).cmp(&(a > 0.0)))
}

impl Spectrum {
    /// Indexes arbitrary eigenvalues; returns the spectrum and, for each
    /// storage slot, the position of its value in `values`.
    fn index(values: &[f64]) -> (Self, Vec<usize>) {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| storage_cmp(values[a], values[b]).then(a.cmp(&b)));

        let mut pos: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&k| values[k] > ZERO_EIGENVALUE)
            .collect();
        pos.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        pos.extend(
            order
                .iter()
                .copied()
                .filter(|&k| values[k].abs() <= ZERO_EIGENVALUE),
        );
        let mut neg: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&k| values[k] < -ZERO_EIGENVALUE)
            .collect();
        neg.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

        let mut idx = vec![0i64; values.len()];
        for (r, &k) in pos.iter().enumerate() {
            idx[k] = r as i64 + 1;
        }
        for (r, &k) in neg.iter().enumerate() {
            idx[k] = -(r as i64) - 1;
        }
        let entries = order
            .iter()
            .map(|&k| Eigenvalue {
                index: idx[k],
                value: values[k],
            })
            .collect();
        (Self { entries }, order)
    }

    pub fn from_values(values: &[f64]) -> Self {
        Self::index(values).0
    }

    /// Eigenvalues of a symmetric matrix times `factor`.
    pub fn of_matrix(s: &DenseMatrix, factor: f64) -> Result<Self> {
        check_symmetric(s)?;
        let vals = symmetric_eigenvalues(s)?;
        Ok(Self::from_values(
            &vals.iter().map(|v| v * factor).collect::<Vec<_>>(),
        ))
    }

    pub fn entries(&self) -> &[Eigenvalue] {
        &self.entries
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: i64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.index == index)
            .map(|e| e.value)
    }

    /// `lambda_i`, with indices beyond the computed set read as 0.
    pub fn get_or_zero(&self, index: i64) -> f64 {
        self.get(index).unwrap_or(0.0)
    }

    pub fn max_positive_index(&self) -> i64 {
        self.entries
            .iter()
            .map(|e| e.index)
            .max()
            .unwrap_or(0)
            .max(0)
    }

    pub fn max_negative_index(&self) -> i64 {
        self.entries
            .iter()
            .map(|e| -e.index)
            .max()
            .unwrap_or(0)
            .max(0)
    }
}

fn check_symmetric(s: &DenseMatrix) -> Result<()> {
    let asym = s.max_asymmetry();
    if asym > 1e-9 * s.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Orthonormal eigenvectors aligned with the storage order of `spectrum`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub spectrum: Spectrum,
    pub vectors: Vec<Vec<f64>>,
    pub scale: Scale,
}

impl SpectralDecomposition {
    /// Decomposes `factor * s`; `scale` records what `factor` means.
    pub fn of_matrix(s: &DenseMatrix, factor: f64, scale: Scale) -> Result<Self> {
        check_symmetric(s)?;
        let raw = symmetric_eigen(s)?;
        let values: Vec<f64> = raw.values.iter().map(|v| v * factor).collect();
        let (spectrum, order) = Spectrum::index(&values);
        let vectors = order
            .iter()
            .map(|&k| {
                let mut v = raw.vectors[k].clone();
                let lead = v
                    .iter()
                    .fold(0.0f64, |m, &x| if x.abs() > m.abs() { x } else { m });
                if lead < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
                v
            })
            .collect();
        Ok(Self {
            spectrum,
            vectors,
            scale,
        })
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum.values()
    }

    /// Eigenvector with signed index `index`.
    pub fn vector(&self, index: i64) -> Option<&[f64]> {
        self.spectrum
            .entries
            .iter()
            .position(|e| e.index == index)
            .map(|k| self.vectors[k].as_slice())
    }

    /// `V diag(f(lambda)) V^T`, applied to `x`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), x.len())?;
        let mut y = vec![0.0; x.len()];
        for (e, v) in self.spectrum.entries.iter().zip(&self.vectors) {
            let c = f(e.value) * dot(v, x);
            for (yi, vi) in y.iter_mut().zip(v) {
                *yi += c * vi;
            }
        }
        Ok(y)
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.n();
        let mut m = DenseMatrix::zeros(n);
        for (e, v) in self.spectrum.entries.iter().zip(&self.vectors) {
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, m.get(i, j) + e.value * v[i] * v[j]);
                }
            }
        }
        m
    }
}

pub fn eigendecompose(g: &Graph, scale: Scale) -> Result<SpectralDecomposition> {
    SpectralDecomposition::of_matrix(g.gso(), scale.factor(g.n()), scale)
}

/// Eigenvalues of `S/n` (or `S`) without eigenvectors.
pub fn graph_spectrum(g: &Graph, scale: Scale) -> Result<Spectrum> {
    Spectrum::of_matrix(g.gso(), scale.factor(g.n()))
}

/// Spectrum of the operator discretized on the template grid `k/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphonSpectrum {
    pub decomposition: SpectralDecomposition,
    pub m: usize,
}

impl GraphonSpectrum {
    pub fn spectrum(&self) -> &Spectrum {
        &self.decomposition.spectrum
    }

    /// Eigenfunction as a step function on the regular `m`-partition,
    /// `L2`-normalized.
    pub fn eigenfunction(&self, index: i64) -> Option<GraphonSignal> {
        let scale = (self.m as f64).sqrt();
        self.decomposition.vector(index).map(|v| {
            GraphonSignal::from_step(StepFunction::regular(v.iter().map(|x| x * scale).collect()))
        })
    }
}

pub fn graphon_spectrum(w: &Graphon, m: usize) -> Result<GraphonSpectrum> {
    if m < 2 {
        return Err(Error::OutOfRange {
            name: "m",
            value: m as f64,
            range: ">= 2",
        });
    }
    let s = w.grid_matrix(m, GridPoints::Template);
    let decomposition = SpectralDecomposition::of_matrix(&s, 1.0 / m as f64, Scale::Normalized)?;
    Ok(GraphonSpectrum { decomposition, m })
}

/// Exact eigenvalues of the integral operator of a step kernel: those of
/// `D^{1/2} B D^{1/2}` with `D` the cell widths.
pub fn step_operator_spectrum(k: &StepKernel) -> Result<Spectrum> {
    let w: Vec<f64> = k.widths().iter().map(|x| x.sqrt()).collect();
    let m = DenseMatrix::from_fn(k.cells(), |i, j| w[i] * k.block(i, j) * w[j]);
    Spectrum::of_matrix(&m, 1.0)
}

/// Operator spectrum: exact for step-representable graphons, otherwise the
/// default grid discretization.
pub fn operator_spectrum(w: &Graphon) -> Result<Spectrum> {
    match w.as_step() {
        Some(k) => step_operator_spectrum(&k),
        None => Spectrum::of_matrix(
            &w.grid_matrix(DEFAULT_GRID, GridPoints::Template),
            1.0 / DEFAULT_GRID as f64,
        ),
    }
}

/// `V^T x`, aligned with the storage order.
pub fn gft(x: &GraphSignal, d: &SpectralDecomposition) -> Result<Vec<f64>> {
    check_len(d.n(), x.len())?;
    Ok(d.vectors.iter().map(|v| dot(v, x.values())).collect())
}

pub fn inverse_gft(coeffs: &[f64], d: &SpectralDecomposition) -> Result<GraphSignal> {
    check_len(d.vectors.len(), coeffs.len())?;
    let mut y = vec![0.0; d.n()];
    for (c, v) in coeffs.iter().zip(&d.vectors) {
        for (yi, vi) in y.iter_mut().zip(v) {
            *yi += c * vi;
        }
    }
    Ok(GraphSignal::new(y))
}

/// `[X^]_i = \int X phi_i`, with `X` sampled at cell midpoints.
pub fn wft(x: &GraphonSignal, s: &GraphonSpectrum) -> Vec<f64> {
    let samples = x.sample(&GridPoints::Midpoint.points(s.m));
    let norm = 1.0 / (s.m as f64).sqrt();
    s.decomposition
        .vectors
        .iter()
        .map(|v| dot(v, &samples) * norm)
        .collect()
}

fn check_band(c: f64) -> Result<()> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::OutOfRange {
            name: "c",
            value: c,
            range: "(0, 1]",
        });
    }
    Ok(())
}

/// `#{i : |lambda_i| >= c}`.
pub fn c_band_cardinality(eigs: &Spectrum, c: f64) -> Result<usize> {
    check_band(c)?;
    Ok(eigs.entries.iter().filter(|e| e.value.abs() >= c).count())
}

/// Minimum over in-band `i` of `lambda'` and all `j != i` of `lambda` of
/// `|lambda'_i - lambda_j|`. An implicit zero eigenvalue stands for the
/// uncomputed tail of `lambda`.
pub fn c_eigenvalue_margin(eigs_w: &Spectrum, eigs_w_prime: &Spectrum, c: f64) -> Result<f64> {
    check_band(c)?;
    let mut margin = f64::INFINITY;
    let mut any = false;
    for ei in eigs_w_prime.entries.iter().filter(|e| e.value.abs() >= c) {
        any = true;
        margin = margin.min(ei.value.abs());
        for ej in eigs_w.entries.iter().filter(|e| e.index != ei.index) {
            margin = margin.min((ei.value - ej.value).abs());
        }
    }
    if !any {
        return Err(Error::EmptyBand { c });
    }
    Ok(margin)
}
