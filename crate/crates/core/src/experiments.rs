//! Seeded experiment sweeps and their report files.
//!
//! Two experiments share one JSON configuration:
//!
//! - [`run_transfer_sweep`] samples graphs of every size in the grid, runs a
//!   fixed model on each, and compares the induced output against a reference
//!   (a larger graph, or the graphon itself on a fine grid). Each row carries
//!   the matching closed-form bound evaluated from measured spectra.
//! - [`run_train_transfer`] trains models on small graphs against a hidden
//!   teacher and evaluates them on a large graph from the same graphon.
//!
//! Every random draw is keyed by `(master seed, trial, size, ...)`, so rows do
//! not depend on the number of worker threads or on execution order.

use std::fs;
use std::path::{Path, PathBuf};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, AssumptionFlags, BoundIngredients, BoundKind, BoundReport};
use crate::error::{Error, Result};
use crate::filters::{estimate_spectral_profile, FilterCoeffs, PROFILE_GRID};
use crate::gnn::{
    gnn_forward, mse, nonlinearity_check, train_adam, wnn_forward_on_grid, CoefficientTensor,
    Dataset, Features, GnnConfig, LipschitzPenalty, Nonlinearity, TrainHyper, TrainSample,
};
use crate::graph::{Graph, GraphSignal};
use crate::graphon::{
    graphon_l2_distance, induced_graphon, induced_graphon_signal, signal_l2_distance_with, Graphon,
    GraphonSignal, GridPoints, DEFAULT_GRID,
};
use crate::rng::{derive_seed, stream, Purpose};
use crate::sampling::{
    bernoulli_from_weighted, sample_graph_signal, sample_template, sample_weighted, SampleMode,
};
use crate::spectral::{
    c_band_cardinality, c_eigenvalue_margin, graph_spectrum, operator_spectrum, Scale, Spectrum,
};

/// Grid of the graphon reference output.
pub const REFERENCE_GRID: usize = 4096;
/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "WSPLAB_THREADS";

const TRAIN_STREAM: u64 = 1;
const TEST_STREAM: u64 = 2;

/// A builtin graphon name (see [`Graphon::builtin`]) or an inline definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphonSource {
    Builtin(String),
    Inline(Graphon),
}

impl GraphonSource {
    pub fn resolve(&self) -> Result<Graphon> {
        match self {
            Self::Builtin(name) => Graphon::builtin(name),
            Self::Inline(w) => {
                w.validate()?;
                Ok(w.clone())
            }
        }
    }
}

/// The model shared by every graph of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Filter {
        taps: FilterCoeffs,
    },
    /// Coefficients are `parameters` when given, otherwise a random
    /// initialization from `init_seed` shrunk to satisfy the filter assumption.
    Gnn {
        config: GnnConfig,
        #[serde(default)]
        init_seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        parameters: Option<Vec<f64>>,
    },
}

impl ModelSpec {
    pub fn is_filter(&self) -> bool {
        matches!(self, Self::Filter { .. })
    }

    /// A filter is the one-layer linear GNN with one feature.
    pub fn config(&self) -> Result<GnnConfig> {
        let cfg = match self {
            Self::Filter { taps } => GnnConfig {
                widths: vec![1, 1],
                taps: taps.len(),
                nonlinearity: Nonlinearity::Identity,
                scale: Scale::Normalized,
                readout: None,
            },
            Self::Gnn { config, .. } => config.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn instantiate(&self) -> Result<(GnnConfig, CoefficientTensor)> {
        self.instantiate_with_seed(None)
    }

    /// Like [`instantiate`](Self::instantiate), replacing the initialization
    /// seed of a randomly initialized GNN.
    pub fn instantiate_with_seed(
        &self,
        seed: Option<u64>,
    ) -> Result<(GnnConfig, CoefficientTensor)> {
        let cfg = self.config()?;
        let h = match self {
            Self::Filter { taps } => CoefficientTensor::from_flat(&cfg, taps.taps())?,
            Self::Gnn {
                parameters: Some(p),
                ..
            } => CoefficientTensor::from_flat(&cfg, p)?,
            Self::Gnn {
                init_seed,
                parameters: None,
                ..
            } => CoefficientTensor::random(&cfg, seed.unwrap_or(*init_seed), true),
        };
        Ok((cfg, h))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// A second graph of this size sampled like the others.
    Size(usize),
    /// The graphon itself, discretized on `grid` template points.
    Graphon {
        #[serde(default = "reference_grid")]
        grid: usize,
    },
}

fn reference_grid() -> usize {
    REFERENCE_GRID
}

/// Where the graphon and signal discretization errors of a bound come from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorSource {
    /// Lipschitz constants when both are known, measurements otherwise.
    #[default]
    Auto,
    Lipschitz,
    Measured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graphon: GraphonSource,
    pub signal: GraphonSignal,
    pub model: ModelSpec,
    #[serde(default = "stochastic")]
    pub mode: SampleMode,
    /// Ascending graph sizes.
    pub sizes: Vec<usize>,
    pub reference: Reference,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_chi")]
    pub chi1: f64,
    #[serde(default = "default_chi")]
    pub chi2: f64,
    #[serde(default = "default_chi")]
    pub chi3: f64,
    /// Spectral band threshold.
    pub c: f64,
    /// Quadrature resolution for distances that are not exact.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "yes")]
    pub self_loops: bool,
    #[serde(default)]
    pub main_text_constants: bool,
    #[serde(default)]
    pub errors: ErrorSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<TrainTransferSpec>,
}

fn stochastic() -> SampleMode {
    SampleMode::Stochastic
}
fn one() -> usize {
    1
}
fn default_chi() -> f64 {
    0.05
}
fn default_grid() -> usize {
    DEFAULT_GRID
}
fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(Error::Precondition(
                "sizes must be a nonempty list of positive sizes".into(),
            ));
        }
        if self.sizes.windows(2).any(|p| p[0] > p[1]) {
            return Err(Error::Precondition("sizes must be sorted ascending".into()));
        }
        if self.trials == 0 {
            return Err(Error::OutOfRange {
                name: "trials",
                value: 0.0,
                range: ">= 1",
            });
        }
        if !(self.c > 0.0 && self.c <= 1.0) {
            return Err(Error::OutOfRange {
                name: "c",
                value: self.c,
                range: "(0, 1]",
            });
        }
        for (name, v) in [
            ("chi1", self.chi1),
            ("chi2", self.chi2),
            ("chi3", self.chi3),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: "(0, 1)",
                });
            }
        }
        if self.grid < 2 {
            return Err(Error::OutOfRange {
                name: "grid",
                value: self.grid as f64,
                range: ">= 2",
            });
        }
        match self.reference {
            Reference::Size(0) => {
                return Err(Error::OutOfRange {
                    name: "reference size",
                    value: 0.0,
                    range: ">= 1",
                })
            }
            Reference::Graphon { grid } if grid < 4 => {
                return Err(Error::OutOfRange {
                    name: "reference grid",
                    value: grid as f64,
                    range: ">= 4",
                })
            }
            _ => {}
        }
        let cfg = self.model.config()?;
        check_model_shape(&cfg)?;
        if let Some(t) = &self.train {
            t.validate(&self.sizes)?;
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Bound matching the sampling mode, model and reference, if any.
    pub fn bound_kind(&self) -> Option<BoundKind> {
        let graphon_ref = matches!(self.reference, Reference::Graphon { .. });
        let filter = self.model.is_filter();
        match (self.mode, graphon_ref, filter) {
            (SampleMode::Stochastic | SampleMode::StochasticFromWeighted, true, true) => {
                Some(BoundKind::Thm1)
            }
            (SampleMode::Stochastic | SampleMode::StochasticFromWeighted, false, true) => {
                Some(BoundKind::Thm2)
            }
            (SampleMode::Stochastic | SampleMode::StochasticFromWeighted, true, false) => {
                Some(BoundKind::Thm3)
            }
            (SampleMode::Stochastic | SampleMode::StochasticFromWeighted, false, false) => {
                Some(BoundKind::Thm4)
            }
            (SampleMode::Template, true, true) => Some(BoundKind::Prop1),
            (SampleMode::Weighted, true, true) => Some(BoundKind::Prop2),
            _ => None,
        }
    }
}

fn check_model_shape(cfg: &GnnConfig) -> Result<()> {
    if cfg.input_width() != 1 {
        return Err(Error::Precondition(format!(
            "models take one input feature, got {}",
            cfg.input_width()
        )));
    }
    if cfg.scale != Scale::Normalized {
        return Err(Error::Precondition(
            "transfer experiments need the normalized shift S/n".into(),
        ));
    }
    Ok(())
}

/// Size of the worker pool: the argument, else `WSPLAB_THREADS`, else rayon's default.
pub fn worker_count(threads: Option<usize>) -> usize {
    threads
        .or_else(|| {
            std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.trim().parse().ok())
        })
        .filter(|&t| t > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(threads))
        .build()
        .map_err(|e| Error::Precondition(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// One sampled graph with the weighted graph it was drawn from.
struct Sampled {
    n: usize,
    weighted: Graph,
    graph: Graph,
}

fn sample_pair(w: &Graphon, cfg: &ExperimentConfig, n: usize, trial: usize) -> Result<Sampled> {
    let seed = derive_seed(cfg.seed, &[trial as u64, n as u64]);
    let (weighted, graph) = match cfg.mode {
        SampleMode::Template => {
            let g = sample_template(w, n)?;
            (g.clone(), g)
        }
        SampleMode::Weighted => {
            let g = sample_weighted(w, n, seed)?;
            (g.clone(), g)
        }
        SampleMode::Stochastic | SampleMode::StochasticFromWeighted => {
            let weighted = sample_weighted(w, n, seed)?;
            let graph = bernoulli_from_weighted(&weighted, seed)?;
            (weighted, graph)
        }
    };
    if cfg.self_loops {
        Ok(Sampled { n, weighted, graph })
    } else {
        Ok(Sampled {
            n,
            weighted: weighted.without_self_loops(),
            graph: graph.without_self_loops(),
        })
    }
}

/// Model output on one graph, as induced graphon signals.
fn induced_outputs(
    h: &CoefficientTensor,
    cfg: &GnnConfig,
    x: &GraphonSignal,
    g: &Graph,
) -> Result<Vec<GraphonSignal>> {
    let input = vec![sample_graph_signal(x, g).into_values()];
    gnn_forward(h, cfg, g, &input)?
        .into_iter()
        .map(|y| induced_graphon_signal(&GraphSignal::new(y), g))
        .collect()
}

fn feature_distance(a: &[GraphonSignal], b: &[GraphonSignal], m: usize) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| signal_l2_distance_with(p, q, m).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Root mean square difference at the `m` template points.
fn template_rmse(a: &[GraphonSignal], b: &[GraphonSignal], m: usize) -> f64 {
    let pts = GridPoints::Template.points(m);
    let mut acc = 0.0;
    for (p, q) in a.iter().zip(b) {
        acc += pts
            .iter()
            .map(|&u| (p.eval(u) - q.eval(u)).powi(2))
            .sum::<f64>();
    }
    (acc / (m * a.len().max(1)) as f64).sqrt()
}

/// Spectra of one sampled graph and its discretization errors.
struct GraphStats {
    n: usize,
    weighted: Spectrum,
    graph: Spectrum,
    graphon_error: f64,
    signal_error: f64,
    degree_ok: bool,
}

/// Quantities shared by every row of a sweep.
struct Setup {
    w: Graphon,
    x: GraphonSignal,
    cfg: GnnConfig,
    h: CoefficientTensor,
    kind: Option<BoundKind>,
    operator: Spectrum,
    outer: f64,
    inner: f64,
    filters_ok: bool,
    filter_reasons: Vec<String>,
    nonlinearity_ok: Option<bool>,
    measured: bool,
}

impl Setup {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let w = cfg.graphon.resolve()?;
        let (model_cfg, h) = cfg.model.instantiate()?;
        let mut outer: f64 = 0.0;
        let mut inner: f64 = 0.0;
        let mut filters_ok = true;
        let mut filter_reasons = Vec::new();
        for filter in all_filters(&h) {
            let p = estimate_spectral_profile(&filter, cfg.c, PROFILE_GRID)?;
            outer = outer.max(p.outer_lipschitz);
            inner = inner.max(p.inner_lipschitz);
            if !p.satisfies_as2 {
                filters_ok = false;
                filter_reasons.push(format!(
                    "filter {:?}: sup|h| = {:.4}, Lipschitz {:.4}/{:.4}",
                    filter.taps(),
                    p.sup_abs,
                    p.outer_lipschitz,
                    p.inner_lipschitz
                ));
            }
        }
        let nonlinearity_ok = (!cfg.model.is_filter()).then(|| {
            let s = model_cfg.nonlinearity;
            nonlinearity_check(|v| s.apply(v)).passes()
        });
        let lipschitz_known = w.lipschitz().is_some() && cfg.signal.lipschitz().is_some();
        let measured = match cfg.errors {
            ErrorSource::Measured => true,
            ErrorSource::Lipschitz => false,
            ErrorSource::Auto => !lipschitz_known,
        };
        let kind = cfg.bound_kind();
        let operator = if kind.is_some() {
            operator_spectrum(&w)?
        } else {
            Spectrum::from_values(&[])
        };
        Ok(Self {
            w,
            x: cfg.signal.clone(),
            cfg: model_cfg,
            h,
            kind,
            operator,
            outer,
            inner,
            filters_ok,
            filter_reasons,
            nonlinearity_ok,
            measured,
        })
    }

    fn stats(&self, s: &Sampled, cfg: &ExperimentConfig) -> Result<GraphStats> {
        let (graphon_error, signal_error) = if self.measured {
            let xw =
                induced_graphon_signal(&sample_graph_signal(&self.x, &s.weighted), &s.weighted)?;
            (
                graphon_l2_distance(&self.w, &induced_graphon(&s.weighted)),
                signal_l2_distance_with(&self.x, &xw, cfg.grid),
            )
        } else {
            (f64::NAN, f64::NAN)
        };
        let weighted = graph_spectrum(&s.weighted, Scale::Normalized)?;
        let graph = if s.graph.provenance() == s.weighted.provenance() {
            weighted.clone()
        } else {
            graph_spectrum(&s.graph, Scale::Normalized)?
        };
        Ok(GraphStats {
            n: s.n,
            weighted,
            graph,
            graphon_error,
            signal_error,
            degree_ok: bounds::degree_condition(&s.weighted, cfg.chi3),
        })
    }

    /// Band cardinality (maximum) and eigenvalue margin (minimum) along the
    /// chain graphon, weighted graph, sampled graph of every involved graph.
    fn band(&self, graphs: &[&GraphStats], c: f64) -> Result<(f64, Option<f64>)> {
        let mut card = 0usize;
        let mut margin: Option<f64> = None;
        for g in graphs {
            for s in [&g.weighted, &g.graph] {
                card = card.max(c_band_cardinality(s, c)?);
            }
            for (a, b) in [(&self.operator, &g.weighted), (&g.weighted, &g.graph)] {
                match c_eigenvalue_margin(a, b, c) {
                    Ok(d) => margin = Some(margin.map_or(d, |m: f64| m.min(d))),
                    Err(Error::EmptyBand { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok((card as f64, margin))
    }

    fn flags(&self, graphs: &[&GraphStats], cfg: &ExperimentConfig) -> AssumptionFlags {
        let mut flags = AssumptionFlags {
            filter_response: Some(self.filters_ok),
            nonlinearity: self.nonlinearity_ok,
            reasons: self.filter_reasons.clone(),
            ..AssumptionFlags::default()
        };
        if self.nonlinearity_ok == Some(false) {
            flags.reasons.push(format!(
                "{:?} is not normalized Lipschitz",
                self.cfg.nonlinearity
            ));
        }
        if self.measured {
            // Measured discretization errors stand in for the Lipschitz
            // assumptions; concentration of the sampled graph needs the degree condition.
            let ok = graphs.iter().all(|g| g.degree_ok);
            flags.graph_size = Some(ok);
            if !ok {
                flags.reasons.push("expected-degree condition fails".into());
            }
            return flags;
        }
        let a_w = self.w.lipschitz();
        flags.graphon_lipschitz = Some(a_w.is_some());
        flags.signal_lipschitz = Some(self.x.lipschitz().is_some());
        let size = match (a_w, self.kind) {
            (
                Some(a),
                Some(BoundKind::Thm1 | BoundKind::Thm2 | BoundKind::Thm3 | BoundKind::Thm4),
            ) => graphs
                .iter()
                .map(|g| bounds::size_condition(g.n, cfg.chi3, a, self.w.max_degree()))
                .collect::<std::result::Result<Vec<()>, String>>()
                .map(|_| ()),
            (Some(_), _) => Ok(()),
            (None, _) => Err("size condition needs the graphon Lipschitz constant".into()),
        };
        flags.graph_size = Some(size.is_ok());
        if let Err(r) = size {
            flags.reasons.push(r);
        }
        flags
    }

    fn bound(&self, graphs: &[&GraphStats], cfg: &ExperimentConfig) -> Result<BoundReport> {
        let kind = self
            .kind
            .ok_or_else(|| Error::Precondition("no bound matches this configuration".into()))?;
        let (band_cardinality, eigenvalue_margin) = self.band(graphs, cfg.c)?;
        let measured = |f: fn(&GraphStats) -> f64, i: usize| {
            graphs.get(i).filter(|_| self.measured).map(|g| f(g))
        };
        let ing = BoundIngredients {
            graphon_lipschitz: self.w.lipschitz(),
            signal_lipschitz: self.x.lipschitz(),
            outer_lipschitz: self.outer,
            inner_lipschitz: self.inner,
            c: cfg.c,
            signal_norm: self.x.norm(),
            n: Some(graphs[0].n),
            n2: graphs.get(1).map(|g| g.n),
            chi1: cfg.chi1,
            chi2: cfg.chi2,
            chi3: cfg.chi3,
            band_cardinality,
            eigenvalue_margin,
            layers: self.cfg.layers(),
            width: self.cfg.max_width(),
            max_degree: Some(self.w.max_degree()),
            graphon_error: measured(|g| g.graphon_error, 0),
            graphon_error2: measured(|g| g.graphon_error, 1),
            signal_error: measured(|g| g.signal_error, 0),
            signal_error2: measured(|g| g.signal_error, 1),
            main_text_constants: cfg.main_text_constants,
            assumptions: self.flags(graphs, cfg),
        };
        bounds::evaluate(kind, &ing)
    }
}

fn all_filters(h: &CoefficientTensor) -> Vec<FilterCoeffs> {
    let mut out = Vec::new();
    for l in 0..h.layers() {
        let (fo, gi, _) = h.shape(l);
        for f in 0..fo {
            for g in 0..gi {
                out.push(h.filter(l, f, g));
            }
        }
    }
    out
}

/// One `(n, trial)` outcome of a transfer sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferRow {
    pub n: usize,
    pub trial: usize,
    /// `L2` distance between the induced outputs.
    pub error: f64,
    /// Root mean square difference on a common template grid.
    pub rmse: f64,
    pub bound: Option<f64>,
    pub transferability: Option<f64>,
    pub discretization: Option<f64>,
    pub non_transferable: Option<f64>,
    pub confidence: Option<f64>,
    pub band_cardinality: Option<f64>,
    pub eigenvalue_margin: Option<f64>,
    pub assumptions_pass: bool,
    pub violation: Option<bool>,
    pub notes: String,
}

impl TransferRow {
    /// Counts toward the violation check.
    pub fn checkable(&self) -> bool {
        self.assumptions_pass && self.bound.is_some()
    }
}

/// Aggregates of all rows with one graph size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: usize,
    pub rows: usize,
    pub mean_error: f64,
    /// Sample standard deviation (0 for a single row).
    pub std_dev: f64,
    pub std_error: f64,
    pub mean_rmse: f64,
    pub mean_bound: Option<f64>,
    pub checkable_rows: usize,
    pub violations: usize,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let k = v.len() as f64;
    let mean = v.iter().sum::<f64>() / k;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Per-size aggregates in ascending size order.
pub fn summarize(rows: &[TransferRow]) -> Vec<SizeSummary> {
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|n| {
            let group: Vec<&TransferRow> = rows.iter().filter(|r| r.n == n).collect();
            let errors: Vec<f64> = group.iter().map(|r| r.error).collect();
            let (mean_error, std_dev) = mean_std(&errors);
            let bounds: Vec<f64> = group.iter().filter_map(|r| r.bound).collect();
            SizeSummary {
                n,
                rows: group.len(),
                mean_error,
                std_dev,
                std_error: std_dev / (group.len() as f64).sqrt(),
                mean_rmse: mean_std(&group.iter().map(|r| r.rmse).collect::<Vec<_>>()).0,
                mean_bound: (!bounds.is_empty()).then(|| mean_std(&bounds).0),
                checkable_rows: group.iter().filter(|r| r.checkable()).count(),
                violations: group
                    .iter()
                    .filter(|r| r.checkable() && r.violation == Some(true))
                    .count(),
            }
        })
        .collect()
}

/// Bound violations among assumption-passing rows against the stated confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationCheck {
    pub rows: usize,
    pub violations: usize,
    pub frequency: f64,
    pub confidence: f64,
    /// Binomial standard error at the stated confidence.
    pub std_error: f64,
    /// `1 - confidence + 3 std_error`.
    pub limit: f64,
}

impl ViolationCheck {
    pub fn passes(&self) -> bool {
        self.rows > 0 && self.frequency <= self.limit
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub bound_kind: Option<BoundKind>,
    /// Distance between the graphon reference outputs on `m` and `m/2` grids.
    pub quadrature_error: Option<f64>,
    pub rows: Vec<TransferRow>,
    pub summary: Vec<SizeSummary>,
}

impl TransferReport {
    pub fn from_rows(
        bound_kind: Option<BoundKind>,
        quadrature_error: Option<f64>,
        rows: Vec<TransferRow>,
    ) -> Self {
        let summary = summarize(&rows);
        Self {
            bound_kind,
            quadrature_error,
            rows,
            summary,
        }
    }

    pub fn violation_check(&self) -> ViolationCheck {
        let checked: Vec<&TransferRow> = self.rows.iter().filter(|r| r.checkable()).collect();
        let violations = checked.iter().filter(|r| r.violation == Some(true)).count();
        let confidence = checked
            .iter()
            .filter_map(|r| r.confidence)
            .fold(f64::INFINITY, f64::min);
        let confidence = if confidence.is_finite() {
            confidence
        } else {
            1.0
        };
        let k = checked.len().max(1) as f64;
        let std_error = (confidence * (1.0 - confidence) / k).sqrt();
        ViolationCheck {
            rows: checked.len(),
            violations,
            frequency: violations as f64 / k,
            confidence,
            std_error,
            limit: 1.0 - confidence + 3.0 * std_error,
        }
    }

    /// Mean errors never increase along the size grid.
    pub fn mean_error_non_increasing(&self) -> bool {
        self.summary
            .windows(2)
            .all(|p| p[1].mean_error <= p[0].mean_error)
    }
}

/// Runs a transfer sweep on a pool sized by [`worker_count`].
pub fn run_transfer_sweep(cfg: &ExperimentConfig) -> Result<TransferReport> {
    run_transfer_sweep_with(cfg, None)
}

pub fn run_transfer_sweep_with(
    cfg: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<TransferReport> {
    cfg.validate()?;
    with_pool(threads, || transfer_sweep(cfg))?
}

struct ReferenceOutput {
    outputs: Vec<GraphonSignal>,
    stats: Option<GraphStats>,
}

fn transfer_sweep(cfg: &ExperimentConfig) -> Result<TransferReport> {
    let setup = Setup::new(cfg)?;
    let (graphon_reference, quadrature_error) = match cfg.reference {
        Reference::Graphon { grid } => {
            let fine = wnn_forward_on_grid(
                &setup.h,
                &setup.cfg,
                &setup.w.grid_matrix(grid, GridPoints::Template),
                std::slice::from_ref(&setup.x),
            )?;
            let half = grid / 2;
            let coarse = wnn_forward_on_grid(
                &setup.h,
                &setup.cfg,
                &setup.w.grid_matrix(half, GridPoints::Template),
                std::slice::from_ref(&setup.x),
            )?;
            let q = feature_distance(&fine, &coarse, cfg.grid);
            (Some(fine), Some(q))
        }
        Reference::Size(_) => (None, None),
    };
    let references: Vec<ReferenceOutput> = match cfg.reference {
        Reference::Graphon { .. } => Vec::new(),
        Reference::Size(big) => (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let s = sample_pair(&setup.w, cfg, big, trial)?;
                let outputs = induced_outputs(&setup.h, &setup.cfg, &setup.x, &s.graph)?;
                let stats = setup.kind.map(|_| setup.stats(&s, cfg)).transpose()?;
                Ok(ReferenceOutput { outputs, stats })
            })
            .collect::<Result<_>>()?,
    };
    let jobs: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(n, trial)| {
            let s = sample_pair(&setup.w, cfg, n, trial)?;
            let outputs = induced_outputs(&setup.h, &setup.cfg, &setup.x, &s.graph)?;
            let reference = match &graphon_reference {
                Some(r) => r,
                None => &references[trial].outputs,
            };
            let error = feature_distance(&outputs, reference, cfg.grid);
            let rmse = template_rmse(&outputs, reference, cfg.grid);
            let mut row = TransferRow {
                n,
                trial,
                error,
                rmse,
                bound: None,
                transferability: None,
                discretization: None,
                non_transferable: None,
                confidence: None,
                band_cardinality: None,
                eigenvalue_margin: None,
                assumptions_pass: false,
                violation: None,
                notes: String::new(),
            };
            if setup.kind.is_some() {
                let stats = setup.stats(&s, cfg)?;
                let mut graphs = vec![&stats];
                if let Some(r) = references.get(trial).and_then(|r| r.stats.as_ref()) {
                    graphs.push(r);
                }
                let flags = setup.flags(&graphs, cfg);
                row.assumptions_pass = flags.all_pass();
                let (card, margin) = setup.band(&graphs, cfg.c)?;
                row.band_cardinality = Some(card);
                row.eigenvalue_margin = margin;
                let mut notes = flags.reasons.clone();
                match setup.bound(&graphs, cfg) {
                    Ok(b) => {
                        row.bound = Some(b.value);
                        row.transferability = Some(b.terms.transferability);
                        row.discretization = Some(b.terms.discretization);
                        row.non_transferable = Some(b.terms.non_transferable);
                        row.confidence = Some(b.confidence);
                        row.violation = Some(error > b.value);
                    }
                    Err(e) => {
                        row.assumptions_pass = false;
                        notes.push(e.to_string());
                    }
                }
                row.notes = notes.join("; ");
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransferReport::from_rows(
        setup.kind,
        quadrature_error,
        rows,
    ))
}

/// Random smooth inputs `X(u) = sum_k a_k cos(pi k u)` plus optional node noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSpec {
    /// Number of cosine modes, frequency 0 included.
    pub modes: usize,
    /// Standard deviation of `a_k` is `(k + 1)^-decay`.
    pub decay: f64,
    /// Standard deviation of independent per-node noise.
    pub node_noise: f64,
}

impl Default for InputSpec {
    fn default() -> Self {
        Self {
            modes: 4,
            decay: 1.0,
            node_noise: 0.0,
        }
    }
}

impl InputSpec {
    fn coefficients(&self, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed, Purpose::Signals);
        (0..self.modes)
            .map(|k| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * ((k + 1) as f64).powf(-self.decay)
            })
            .collect()
    }

    fn evaluate(&self, coeffs: &[f64], g: &Graph, noise_seed: u64) -> Vec<f64> {
        let mut rng = stream(noise_seed, Purpose::Noise);
        g.labels()
            .iter()
            .map(|&u| {
                let smooth: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * (std::f64::consts::PI * k as f64 * u).cos())
                    .sum();
                if self.node_noise > 0.0 {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    smooth + self.node_noise * z
                } else {
                    smooth
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudentSpec {
    pub name: String,
    /// Architecture and initialization; GNN initializations are reseeded per trial.
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<LipschitzPenalty>,
}

/// Train on `n`, test on `n` and on `big`, against a hidden teacher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainTransferSpec {
    pub big: usize,
    pub teacher: ModelSpec,
    /// Standard deviation of the Gaussian target noise.
    #[serde(default = "target_noise")]
    pub noise: f64,
    pub train_samples: usize,
    pub test_samples: usize,
    #[serde(default)]
    pub inputs: InputSpec,
    pub students: Vec<StudentSpec>,
    #[serde(default)]
    pub hyper: TrainHyper,
    #[serde(default)]
    pub protocol: TrainProtocol,
}

/// How the small training graphs relate to the large test graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainProtocol {
    /// Targets live on the large graph; training graphs are uniformly random
    /// induced subgraphs of it.
    #[default]
    Subnetwork,
    /// Every graph is sampled independently and labelled by the teacher on itself.
    Resample,
}

fn target_noise() -> f64 {
    0.01
}

impl TrainTransferSpec {
    fn validate(&self, sizes: &[usize]) -> Result<()> {
        if self.big == 0 || self.train_samples == 0 || self.test_samples == 0 {
            return Err(Error::Precondition(
                "big, train_samples and test_samples must be positive".into(),
            ));
        }
        if self.protocol == TrainProtocol::Subnetwork && sizes.iter().any(|&n| n > self.big) {
            return Err(Error::Precondition(format!(
                "subnetworks cannot be larger than the full graph of {} nodes",
                self.big
            )));
        }
        if self.students.is_empty() {
            return Err(Error::Precondition(
                "at least one student is required".into(),
            ));
        }
        if !(self.noise >= 0.0) || !(self.inputs.node_noise >= 0.0) {
            return Err(Error::Precondition(
                "noise levels must be nonnegative".into(),
            ));
        }
        let teacher = self.teacher.config()?;
        check_model_shape(&teacher)?;
        for s in &self.students {
            let cfg = s.model.config()?;
            check_model_shape(&cfg)?;
            if cfg.output_width() != teacher.output_width() {
                return Err(Error::DimensionMismatch {
                    expected: teacher.output_width(),
                    got: cfg.output_width(),
                });
            }
        }
        Ok(())
    }
}

/// One `(student, n, trial)` training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRow {
    pub student: String,
    pub n: usize,
    pub trial: usize,
    pub rmse_small: Option<f64>,
    pub rmse_big: Option<f64>,
    /// `|rmse_big - rmse_small| / rmse_small`.
    pub relative_difference: Option<f64>,
    pub final_loss: Option<f64>,
    pub diverged: bool,
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub student: String,
    pub n: usize,
    pub runs: usize,
    pub diverged: usize,
    pub mean_relative_difference: f64,
    pub std_dev: f64,
    pub std_error: f64,
    pub mean_rmse_small: f64,
    pub mean_rmse_big: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainTransferReport {
    pub students: Vec<String>,
    pub sizes: Vec<usize>,
    pub rows: Vec<TrainRow>,
    pub summary: Vec<TrainSummary>,
}

impl TrainTransferReport {
    pub fn from_rows(students: Vec<String>, sizes: Vec<usize>, rows: Vec<TrainRow>) -> Self {
        let mut summary = Vec::new();
        for name in &students {
            for &n in &sizes {
                let group: Vec<&TrainRow> = rows
                    .iter()
                    .filter(|r| &r.student == name && r.n == n)
                    .collect();
                let rel: Vec<f64> = group.iter().filter_map(|r| r.relative_difference).collect();
                let (mean, std_dev) = mean_std(&rel);
                let small: Vec<f64> = group.iter().filter_map(|r| r.rmse_small).collect();
                let big: Vec<f64> = group.iter().filter_map(|r| r.rmse_big).collect();
                summary.push(TrainSummary {
                    student: name.clone(),
                    n,
                    runs: group.len(),
                    diverged: group.iter().filter(|r| r.diverged).count(),
                    mean_relative_difference: mean,
                    std_dev,
                    std_error: std_dev / (rel.len().max(1) as f64).sqrt(),
                    mean_rmse_small: mean_std(&small).0,
                    mean_rmse_big: mean_std(&big).0,
                })
            }
        }
        Self {
            students,
            sizes,
            rows,
            summary,
        }
    }

    pub fn mean_relative_difference(&self, student: &str, n: usize) -> Option<f64> {
        self.summary
            .iter()
            .find(|s| s.student == student && s.n == n)
            .map(|s| s.mean_relative_difference)
    }

    /// Per size: whether the mean relative differences of `students` are
    /// non-decreasing in the given order.
    pub fn ordering(&self, students: &[&str]) -> Vec<(usize, bool)> {
        self.sizes
            .iter()
            .map(|&n| {
                let v: Vec<f64> = students
                    .iter()
                    .map(|s| self.mean_relative_difference(s, n).unwrap_or(f64::NAN))
                    .collect();
                (n, v.windows(2).all(|p| p[0] <= p[1]))
            })
            .collect()
    }
}

pub fn run_train_transfer(cfg: &ExperimentConfig) -> Result<TrainTransferReport> {
    run_train_transfer_with(cfg, None)
}

pub fn run_train_transfer_with(
    cfg: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<TrainTransferReport> {
    cfg.validate()?;
    let spec = cfg
        .train
        .as_ref()
        .ok_or_else(|| Error::Precondition("configuration has no train section".into()))?;
    with_pool(threads, || train_transfer(cfg, spec))?
}

/// Inputs and noisy teacher targets on one graph.
fn labelled_set(
    cfg: &ExperimentConfig,
    spec: &TrainTransferSpec,
    teacher: &(GnnConfig, CoefficientTensor),
    g: &Graph,
    trial: usize,
    stream_tag: u64,
    count: usize,
) -> Result<Vec<TrainSample>> {
    let n = g.n() as u64;
    (0..count)
        .map(|j| {
            // Test coefficients are shared by every graph of a trial; node and
            // target noise are drawn per graph.
            let coeff_seed = match stream_tag {
                TEST_STREAM => derive_seed(cfg.seed, &[trial as u64, stream_tag, j as u64]),
                _ => derive_seed(cfg.seed, &[trial as u64, stream_tag, n, j as u64]),
            };
            let noise_seed = derive_seed(cfg.seed, &[trial as u64, stream_tag, n, j as u64, 1]);
            let x =
                vec![spec
                    .inputs
                    .evaluate(&spec.inputs.coefficients(coeff_seed), g, noise_seed)];
            let mut y = gnn_forward(&teacher.1, &teacher.0, g, &x)?;
            if spec.noise > 0.0 {
                let mut rng = stream(derive_seed(noise_seed, &[2]), Purpose::Noise);
                for v in y.iter_mut().flatten() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *v += spec.noise * z;
                }
            }
            Ok(TrainSample { graph: 0, x, y })
        })
        .collect()
}

fn restrict(samples: &[TrainSample], nodes: &[usize]) -> Vec<TrainSample> {
    let pick = |f: &Features| -> Features {
        f.iter()
            .map(|v| nodes.iter().map(|&i| v[i]).collect())
            .collect()
    };
    samples
        .iter()
        .map(|s| TrainSample {
            graph: 0,
            x: pick(&s.x),
            y: pick(&s.y),
        })
        .collect()
}

/// Sorted uniform `n`-subset of `0..big`.
fn subnetwork_nodes(seed: u64, big: usize, n: usize) -> Vec<usize> {
    let mut rng = stream(seed, Purpose::Labels);
    let mut nodes = rand::seq::index::sample(&mut rng, big, n.min(big)).into_vec();
    nodes.sort_unstable();
    nodes
}

fn rmse_on(h: &CoefficientTensor, cfg: &GnnConfig, g: &Graph, set: &[TrainSample]) -> Result<f64> {
    let mut acc = 0.0;
    for s in set {
        acc += mse(&gnn_forward(h, cfg, g, &s.x)?, &s.y)?;
    }
    Ok((acc / set.len() as f64).sqrt())
}

struct TrialData {
    graph: Graph,
    train: Vec<TrainSample>,
    test: Vec<TrainSample>,
}

fn train_transfer(cfg: &ExperimentConfig, spec: &TrainTransferSpec) -> Result<TrainTransferReport> {
    let w = cfg.graphon.resolve()?;
    let teacher = spec.teacher.instantiate()?;
    let labelled = |graph: Graph, trial: usize, with_train: bool| -> Result<TrialData> {
        let train = if with_train {
            labelled_set(
                cfg,
                spec,
                &teacher,
                &graph,
                trial,
                TRAIN_STREAM,
                spec.train_samples,
            )?
        } else {
            Vec::new()
        };
        let test = labelled_set(
            cfg,
            spec,
            &teacher,
            &graph,
            trial,
            TEST_STREAM,
            spec.test_samples,
        )?;
        Ok(TrialData { graph, train, test })
    };
    let subnetwork = spec.protocol == TrainProtocol::Subnetwork;
    let big: Vec<TrialData> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| labelled(sample_pair(&w, cfg, spec.big, t)?.graph, t, subnetwork))
        .collect::<Result<_>>()?;
    let small: Vec<Vec<TrialData>> = cfg
        .sizes
        .par_iter()
        .map(|&n| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| match spec.protocol {
                    TrainProtocol::Subnetwork => {
                        let full = &big[t];
                        let seed = derive_seed(cfg.seed, &[t as u64, n as u64]);
                        let nodes = subnetwork_nodes(seed, full.graph.n(), n);
                        Ok(TrialData {
                            graph: full.graph.induced_subgraph(&nodes)?,
                            train: restrict(&full.train, &nodes),
                            test: restrict(&full.test, &nodes),
                        })
                    }
                    TrainProtocol::Resample => labelled(sample_pair(&w, cfg, n, t)?.graph, t, true),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut jobs = Vec::new();
    for (si, student) in spec.students.iter().enumerate() {
        for (ni, &n) in cfg.sizes.iter().enumerate() {
            for trial in 0..cfg.trials {
                jobs.push((si, student, ni, n, trial));
            }
        }
    }
    let rows: Vec<TrainRow> = jobs
        .into_par_iter()
        .map(|(si, student, ni, n, trial)| {
            let data = &small[ni][trial];
            let mut row = TrainRow {
                student: student.name.clone(),
                n,
                trial,
                rmse_small: None,
                rmse_big: None,
                relative_difference: None,
                final_loss: None,
                diverged: false,
                notes: String::new(),
            };
            let init = derive_seed(cfg.seed, &[trial as u64, si as u64]);
            let (scfg, h0) = match student.model.instantiate_with_seed(Some(init)) {
                Ok(m) => m,
                Err(e) => {
                    row.notes = e.to_string();
                    return row;
                }
            };
            let hyper = TrainHyper {
                seed: derive_seed(spec.hyper.seed, &[trial as u64, n as u64, si as u64]),
                penalty: student.penalty,
                ..spec.hyper.clone()
            };
            let dataset = Dataset {
                graphs: vec![data.graph.clone()],
                samples: data.train.clone(),
            };
            let outcome = match train_adam(&h0, &scfg, &dataset, &hyper) {
                Ok(o) => o,
                Err(e) => {
                    row.diverged = matches!(e, Error::Diverged { .. });
                    row.notes = e.to_string();
                    return row;
                }
            };
            row.final_loss = outcome.losses.last().copied();
            let eval = rmse_on(&outcome.tensor, &scfg, &data.graph, &data.test).and_then(|a| {
                Ok((
                    a,
                    rmse_on(&outcome.tensor, &scfg, &big[trial].graph, &big[trial].test)?,
                ))
            });
            match eval {
                Ok((a, b)) => {
                    row.rmse_small = Some(a);
                    row.rmse_big = Some(b);
                    row.relative_difference = Some(if a > 0.0 { (b - a).abs() / a } else { 0.0 });
                }
                Err(e) => row.notes = e.to_string(),
            }
            row
        })
        .collect();
    Ok(TrainTransferReport::from_rows(
        spec.students.iter().map(|s| s.name.clone()).collect(),
        cfg.sizes.clone(),
        rows,
    ))
}

/// Paths written by [`emit_report`] and [`emit_train_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub dat: PathBuf,
}

impl ReportFiles {
    fn in_dir(dir: &Path, stem: &str) -> Self {
        Self {
            csv: dir.join(format!("{stem}.csv")),
            json: dir.join(format!("{stem}.json")),
            dat: dir.join(format!("{stem}.dat")),
        }
    }
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn fmt_dat(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.12e}"),
        _ => "NaN".into(),
    }
}

const TRANSFER_HEADER: &[&str] = &[
    "n",
    "trial",
    "error",
    "rmse",
    "bound",
    "transferability",
    "discretization",
    "non_transferable",
    "confidence",
    "band_cardinality",
    "eigenvalue_margin",
    "assumptions_pass",
    "violation",
    "notes",
];

const TRAIN_HEADER: &[&str] = &[
    "student",
    "n",
    "trial",
    "rmse_small",
    "rmse_big",
    "relative_difference",
    "final_loss",
    "diverged",
    "notes",
];

/// Writes `transfer.csv` (one row per trial), `transfer.json` (summary and
/// violation check) and `transfer.dat` (`n mean stderr bound`).
pub fn emit_report(report: &TransferReport, dir: &Path) -> Result<ReportFiles> {
    fs::create_dir_all(dir)?;
    let files = ReportFiles::in_dir(dir, "transfer");
    write_rows(&files.csv, &report.rows, TRANSFER_HEADER)?;
    let json = serde_json::json!({
        "bound_kind": report.bound_kind,
        "quadrature_error": report.quadrature_error,
        "summary": report.summary,
        "violation_check": report.violation_check(),
        "mean_error_non_increasing": report.mean_error_non_increasing(),
    });
    fs::write(&files.json, serde_json::to_string_pretty(&json)? + "\n")?;
    let mut dat = String::from("# n mean stderr bound\n");
    for s in &report.summary {
        dat.push_str(&format!(
            "{} {} {} {}\n",
            s.n,
            fmt_dat(Some(s.mean_error)),
            fmt_dat(Some(s.std_error)),
            fmt_dat(s.mean_bound)
        ));
    }
    fs::write(&files.dat, dat)?;
    Ok(files)
}

/// Writes `train.csv`, `train.json` and `train.dat` with one
/// `mean stderr` column pair per student.
pub fn emit_train_report(report: &TrainTransferReport, dir: &Path) -> Result<ReportFiles> {
    fs::create_dir_all(dir)?;
    let files = ReportFiles::in_dir(dir, "train");
    write_rows(&files.csv, &report.rows, TRAIN_HEADER)?;
    fs::write(
        &files.json,
        serde_json::to_string_pretty(&serde_json::json!({
            "students": report.students,
            "summary": report.summary,
        }))? + "\n",
    )?;
    let mut dat = String::from("# n");
    for s in &report.students {
        dat.push_str(&format!(" {s}_mean {s}_stderr"));
    }
    dat.push('\n');
    for &n in &report.sizes {
        dat.push_str(&n.to_string());
        for name in &report.students {
            let s = report
                .summary
                .iter()
                .find(|s| &s.student == name && s.n == n);
            dat.push_str(&format!(
                " {} {}",
                fmt_dat(s.map(|s| s.mean_relative_difference)),
                fmt_dat(s.map(|s| s.std_error))
            ));
        }
        dat.push('\n');
    }
    fs::write(&files.dat, dat)?;
    Ok(files)
}

pub fn read_transfer_rows(path: &Path) -> Result<Vec<TransferRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

pub fn read_train_rows(path: &Path) -> Result<Vec<TrainRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}
