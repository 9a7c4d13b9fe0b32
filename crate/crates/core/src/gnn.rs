//! GNNs and WNNs sharing one coefficient tensor, with MSE training by ADAM.
//!
//! Layer `l` maps `F_{l-1}` features to `F_l` features by
//! `u^f = sum_g sum_k h^{fg}_k M^k x^g` followed by a pointwise nonlinearity.
//! On a graph `M` is `S` or `S/n`; on a graphon it is the kernel sampled on
//! the template grid divided by `m`.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::filters::{estimate_spectral_profile, outer_lipschitz_point, FilterCoeffs};
use crate::graph::Graph;
use crate::graphon::{Graphon, GraphonSignal, GridPoints, StepFunction};
use crate::linalg::{axpy, dot, DenseMatrix};
use crate::rng::{stream, Purpose};
use crate::spectral::Scale;

/// Multi-feature signal, feature-major: `x[g][i]`.
pub type Features = Vec<Vec<f64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    Relu,
    Tanh,
    /// `2/(1 + e^{-x}) - 1`.
    SigmoidShifted,
    Identity,
}

impl Nonlinearity {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Nonlinearity::Relu => x.max(0.0),
            Nonlinearity::Tanh => x.tanh(),
            Nonlinearity::SigmoidShifted => 2.0 / (1.0 + (-x).exp()) - 1.0,
            Nonlinearity::Identity => x,
        }
    }

    /// Derivative, with `relu'(0) = 0`.
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Nonlinearity::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Nonlinearity::Tanh => 1.0 - x.tanh().powi(2),
            Nonlinearity::SigmoidShifted => {
                let s = 1.0 / (1.0 + (-x).exp());
                2.0 * s * (1.0 - s)
            }
            Nonlinearity::Identity => 1.0,
        }
    }
}

impl std::str::FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "relu" => Self::Relu,
            "tanh" => Self::Tanh,
            "sigmoid-shifted" | "sigmoid_shifted" => Self::SigmoidShifted,
            "identity" => Self::Identity,
            _ => return Err(Error::Parse(format!("unknown nonlinearity {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityReport {
    pub zero_at_origin: bool,
    pub max_slope: f64,
    pub lipschitz_ok: bool,
}

impl NonlinearityReport {
    pub fn passes(&self) -> bool {
        self.zero_at_origin && self.lipschitz_ok
    }
}

/// Checks `sigma(0) = 0` and `|sigma(a) - sigma(b)| <= |a - b|` on a grid
/// over `[-10, 10]`.
pub fn nonlinearity_check(sigma: impl Fn(f64) -> f64) -> NonlinearityReport {
    const POINTS: usize = 20_001;
    let xs: Vec<f64> = (0..POINTS)
        .map(|k| -10.0 + 20.0 * k as f64 / (POINTS - 1) as f64)
        .collect();
    let max_slope = xs
        .windows(2)
        .map(|w| (sigma(w[1]) - sigma(w[0])).abs() / (w[1] - w[0]))
        .fold(0.0, f64::max);
    NonlinearityReport {
        zero_at_origin: sigma(0.0).abs() <= 1e-12,
        max_slope,
        lipschitz_ok: max_slope <= 1.0 + 1e-9,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnnConfig {
    /// `F_0, ..., F_L`.
    pub widths: Vec<usize>,
    /// Taps per filter in every non-readout layer.
    pub taps: usize,
    pub nonlinearity: Nonlinearity,
    #[serde(default = "normalized")]
    pub scale: Scale,
    /// Appends a linear `K = 1` layer mapping `F_L` features to `readout` features.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<usize>,
}

fn normalized() -> Scale {
    Scale::Normalized
}

impl GnnConfig {
    pub fn new(widths: Vec<usize>, taps: usize, nonlinearity: Nonlinearity) -> Result<Self> {
        let cfg = Self {
            widths,
            taps,
            nonlinearity,
            scale: Scale::Normalized,
            readout: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.widths.len() < 2 {
            return Err(Error::OutOfRange {
                name: "L",
                value: 0.0,
                range: ">= 1",
            });
        }
        if self.widths.contains(&0) || self.readout == Some(0) {
            return Err(Error::OutOfRange {
                name: "width",
                value: 0.0,
                range: ">= 1",
            });
        }
        if self.taps == 0 {
            return Err(Error::OutOfRange {
                name: "K",
                value: 0.0,
                range: ">= 1",
            });
        }
        Ok(())
    }

    /// Number of layers including the readout.
    pub fn layers(&self) -> usize {
        self.widths.len() - 1 + usize::from(self.readout.is_some())
    }

    /// `(F_out, F_in, K)` of layer `l` (0-based).
    pub fn layer_shape(&self, l: usize) -> (usize, usize, usize) {
        let body = self.widths.len() - 1;
        if l < body {
            (self.widths[l + 1], self.widths[l], self.taps)
        } else {
            (self.readout.unwrap_or(1), self.widths[body], 1)
        }
    }

    fn layer_nonlinearity(&self, l: usize) -> Nonlinearity {
        if l < self.widths.len() - 1 {
            self.nonlinearity
        } else {
            Nonlinearity::Identity
        }
    }

    pub fn input_width(&self) -> usize {
        self.widths[0]
    }

    pub fn output_width(&self) -> usize {
        self.readout.unwrap_or(*self.widths.last().unwrap())
    }

    /// Largest feature width, the `F` of the WNN bounds.
    pub fn max_width(&self) -> usize {
        self.widths
            .iter()
            .copied()
            .chain(self.readout)
            .max()
            .unwrap_or(1)
    }
}

/// Coefficients `h_l^{fg}`, one flat `[f][g][k]` block per layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTensor {
    shapes: Vec<(usize, usize, usize)>,
    layers: Vec<Vec<f64>>,
}

impl CoefficientTensor {
    pub fn zeros(cfg: &GnnConfig) -> Self {
        let shapes: Vec<_> = (0..cfg.layers()).map(|l| cfg.layer_shape(l)).collect();
        let layers = shapes
            .iter()
            .map(|&(f, g, k)| vec![0.0; f * g * k])
            .collect();
        Self { shapes, layers }
    }

    pub fn from_flat(cfg: &GnnConfig, flat: &[f64]) -> Result<Self> {
        let mut t = Self::zeros(cfg);
        check_len(t.len(), flat.len())?;
        let mut off = 0;
        for layer in &mut t.layers {
            let len = layer.len();
            layer.copy_from_slice(&flat[off..off + len]);
            off += len;
        }
        Ok(t)
    }

    /// Uniform on `+-1/(K F_in)`; with `as2` every filter is shrunk to
    /// `sup |h| <= 0.99` on `[-1, 1]`.
    pub fn random(cfg: &GnnConfig, seed: u64, as2: bool) -> Self {
        let mut rng = stream(seed, Purpose::Init);
        let mut t = Self::zeros(cfg);
        for (l, layer) in t.layers.iter_mut().enumerate() {
            let (_, g, k) = t.shapes[l];
            let r = 1.0 / (k * g) as f64;
            layer.iter_mut().for_each(|h| *h = rng.random_range(-r..=r));
        }
        if as2 {
            t.shrink_filters(0.99);
        }
        t
    }

    /// Rescales every filter whose sup-norm on `[-1,1]` exceeds `limit`.
    pub fn shrink_filters(&mut self, limit: f64) {
        for l in 0..self.layers.len() {
            let (fo, gi, k) = self.shapes[l];
            for f in 0..fo {
                for g in 0..gi {
                    let h = self.filter(l, f, g);
                    let sup = estimate_spectral_profile(&h, 1.0, 2001)
                        .map(|p| p.sup_abs)
                        .unwrap_or(0.0);
                    if sup > limit {
                        let s = limit / sup;
                        let off = (f * gi + g) * k;
                        self.layers[l][off..off + k]
                            .iter_mut()
                            .for_each(|v| *v *= s);
                    }
                }
            }
        }
    }

    pub fn layers(&self) -> usize {
        self.layers.len()
    }

    pub fn shape(&self, l: usize) -> (usize, usize, usize) {
        self.shapes[l]
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn layer(&self, l: usize) -> &[f64] {
        &self.layers[l]
    }

    pub fn layer_mut(&mut self, l: usize) -> &mut [f64] {
        &mut self.layers[l]
    }

    pub fn taps(&self, l: usize, f: usize, g: usize) -> &[f64] {
        let (_, gi, k) = self.shapes[l];
        let off = (f * gi + g) * k;
        &self.layers[l][off..off + k]
    }

    pub fn filter(&self, l: usize, f: usize, g: usize) -> FilterCoeffs {
        FilterCoeffs::new(self.taps(l, f, g).to_vec()).expect("taps are finite")
    }

    pub fn flat(&self) -> Vec<f64> {
        self.layers.iter().flatten().copied().collect()
    }

    fn matches(&self, cfg: &GnnConfig) -> Result<()> {
        let want: Vec<_> = (0..cfg.layers()).map(|l| cfg.layer_shape(l)).collect();
        if want != self.shapes {
            return Err(Error::InvalidGraph(format!(
                "coefficient shapes {:?} do not match configuration {:?}",
                self.shapes, want
            )));
        }
        Ok(())
    }

    fn for_each_mut(&mut self, other: &Self, mut f: impl FnMut(&mut f64, f64)) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, &y) in a.iter_mut().zip(b) {
                f(x, y);
            }
        }
    }
}

/// Shift operator `factor * S` as seen by a forward pass.
struct Operator<'a> {
    s: &'a DenseMatrix,
    factor: f64,
}

impl Operator<'_> {
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.s.matvec_scaled(x, self.factor)
    }

    /// `[x, Mx, ..., M^{k-1} x]`.
    fn powers(&self, x: &[f64], k: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(k);
        out.push(x.to_vec());
        for _ in 1..k {
            let next = self.apply(out.last().unwrap());
            out.push(next);
        }
        out
    }
}

/// Intermediate values kept for backpropagation.
struct Trace {
    /// `powers[l][g][k] = M^k x_{l}^g`, inputs of layer `l`.
    powers: Vec<Vec<Vec<Vec<f64>>>>,
    /// Pre-activations of layer `l`.
    pre: Vec<Features>,
    output: Features,
}

fn check_features(x: &[Vec<f64>], width: usize, n: usize) -> Result<()> {
    check_len(width, x.len())?;
    x.iter().try_for_each(|f| check_len(n, f.len()))
}

fn forward_trace(
    h: &CoefficientTensor,
    cfg: &GnnConfig,
    op: &Operator,
    x: &[Vec<f64>],
) -> Result<Trace> {
    h.matches(cfg)?;
    let n = op.s.n();
    check_features(x, cfg.input_width(), n)?;
    let mut cur: Features = x.to_vec();
    let mut powers = Vec::with_capacity(cfg.layers());
    let mut pre = Vec::with_capacity(cfg.layers());
    for l in 0..cfg.layers() {
        let (fo, gi, k) = h.shape(l);
        let p: Vec<Vec<Vec<f64>>> = cur.iter().map(|xg| op.powers(xg, k)).collect();
        let mut u = vec![vec![0.0; n]; fo];
        for (f, uf) in u.iter_mut().enumerate() {
            for (g, pg) in p.iter().enumerate().take(gi) {
                for (t, z) in h.taps(l, f, g).iter().zip(pg) {
                    axpy(*t, z, uf);
                }
            }
        }
        let sigma = cfg.layer_nonlinearity(l);
        cur = u
            .iter()
            .map(|uf| uf.iter().map(|&v| sigma.apply(v)).collect())
            .collect();
        powers.push(p);
        pre.push(u);
    }
    Ok(Trace {
        powers,
        pre,
        output: cur,
    })
}

fn forward_operator(
    h: &CoefficientTensor,
    cfg: &GnnConfig,
    op: &Operator,
    x: &[Vec<f64>],
) -> Result<Features> {
    h.matches(cfg)?;
    let n = op.s.n();
    check_features(x, cfg.input_width(), n)?;
    let mut cur: Features = x.to_vec();
    for l in 0..cfg.layers() {
        let (fo, gi, k) = h.shape(l);
        let sigma = cfg.layer_nonlinearity(l);
        let p: Vec<Vec<Vec<f64>>> = cur.iter().map(|xg| op.powers(xg, k)).collect();
        cur = (0..fo)
            .map(|f| {
                let mut u = vec![0.0; n];
                for (g, pg) in p.iter().enumerate().take(gi) {
                    for (t, z) in h.taps(l, f, g).iter().zip(pg) {
                        axpy(*t, z, &mut u);
                    }
                }
                u.into_iter().map(|v| sigma.apply(v)).collect()
            })
            .collect();
    }
    Ok(cur)
}

/// `Phi(x; H, S)`.
pub fn gnn_forward(
    h: &CoefficientTensor,
    cfg: &GnnConfig,
    g: &Graph,
    x: &[Vec<f64>],
) -> Result<Features> {
    forward_operator(
        h,
        cfg,
        &Operator {
            s: g.gso(),
            factor: cfg.scale.factor(g.n()),
        },
        x,
    )
}

/// `Phi(X; H, W)` on the template grid `k/m`; outputs are step functions on
/// the regular `m`-partition.
pub fn wnn_forward(
    h: &CoefficientTensor,
    cfg: &GnnConfig,
    w: &Graphon,
    x: &[GraphonSignal],
    m: usize,
) -> Result<Vec<GraphonSignal>> {
    if m < 2 {
        return Err(Error::OutOfRange {
            name: "m",
            value: m as f64,
            range: ">= 2",
        });
    }
    let s = w.grid_matrix(m, GridPoints::Template);
    wnn_forward_on_grid(h, cfg, &s, x)
}

/// WNN forward pass on a precomputed `m x m` template-grid kernel matrix.
pub fn wnn_forward_on_grid(
    h: &CoefficientTensor,
    cfg: &GnnConfig,
    kernel: &DenseMatrix,
    x: &[GraphonSignal],
) -> Result<Vec<GraphonSignal>> {
    let m = kernel.n();
    let pts = GridPoints::Template.points(m);
    let xs: Features = x.iter().map(|xi| xi.sample(&pts)).collect();
    let y = forward_operator(
        h,
        cfg,
        &Operator {
            s: kernel,
            factor: 1.0 / m as f64,
        },
        &xs,
    )?;
    Ok(y.into_iter()
        .map(|v| GraphonSignal::from_step(StepFunction::regular(v)))
        .collect())
}

/// Mean squared error over nodes and output features.
pub fn mse(y: &[Vec<f64>], target: &[Vec<f64>]) -> Result<f64> {
    check_len(target.len(), y.len())?;
    let mut acc = 0.0;
    let mut count = 0usize;
    for (a, b) in y.iter().zip(target) {
        check_len(b.len(), a.len())?;
        acc += a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
        count += a.len();
    }
    Ok(if count == 0 { 0.0 } else { acc / count as f64 })
}

/// MSE of one sample and its gradient with respect to every coefficient.
pub fn loss_and_gradient(
    h: &CoefficientTensor,
    cfg: &GnnConfig,
    g: &Graph,
    x: &[Vec<f64>],
    target: &[Vec<f64>],
) -> Result<(f64, CoefficientTensor)> {
    let op = Operator {
        s: g.gso(),
        factor: cfg.scale.factor(g.n()),
    };
    let trace = forward_trace(h, cfg, &op, x)?;
    let loss = mse(&trace.output, target)?;
    let n = g.n();
    let count = (n * trace.output.len()) as f64;
    let mut upstream: Features = trace
        .output
        .iter()
        .zip(target)
        .map(|(y, t)| {
            y.iter()
                .zip(t)
                .map(|(a, b)| 2.0 * (a - b) / count)
                .collect()
        })
        .collect();
    let mut grad = CoefficientTensor::zeros(cfg);
    for l in (0..cfg.layers()).rev() {
        let (fo, gi, k) = h.shape(l);
        let sigma = cfg.layer_nonlinearity(l);
        let delta: Features = upstream
            .iter()
            .zip(&trace.pre[l])
            .map(|(d, u)| {
                d.iter()
                    .zip(u)
                    .map(|(a, &b)| a * sigma.derivative(b))
                    .collect()
            })
            .collect();
        let gl = grad.layer_mut(l);
        for (f, df) in delta.iter().enumerate() {
            for (g_idx, pg) in trace.powers[l].iter().enumerate() {
                for (kk, z) in pg.iter().enumerate() {
                    gl[(f * gi + g_idx) * k + kk] = dot(df, z);
                }
            }
        }
        if l == 0 {
            break;
        }
        // dL/dx^g = sum_k M^k (sum_f h^{fg}_k delta^f), by Horner's rule.
        upstream = (0..gi)
            .map(|g_idx| {
                let combo = |kk: usize| {
                    let mut c = vec![0.0; n];
                    for (f, df) in delta.iter().enumerate().take(fo) {
                        axpy(h.taps(l, f, g_idx)[kk], df, &mut c);
                    }
                    c
                };
                let mut r = combo(k - 1);
                for kk in (0..k - 1).rev() {
                    r = op.apply(&r);
                    axpy(1.0, &combo(kk), &mut r);
                }
                r
            })
            .collect();
    }
    Ok((loss, grad))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSample {
    /// Index into [`Dataset::graphs`].
    pub graph: usize,
    pub x: Features,
    pub y: Features,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub graphs: Vec<Graph>,
    pub samples: Vec<TrainSample>,
}

impl Dataset {
    /// Mean MSE over all samples.
    pub fn loss(&self, h: &CoefficientTensor, cfg: &GnnConfig) -> Result<f64> {
        if self.samples.is_empty() {
            return Ok(0.0);
        }
        let mut acc = 0.0;
        for s in &self.samples {
            acc += mse(&gnn_forward(h, cfg, &self.graphs[s.graph], &s.x)?, &s.y)?;
        }
        Ok(acc / self.samples.len() as f64)
    }
}

/// Penalty `weight * max_{l,f,g} A_h(h_l^{fg})` on the outer band `|lambda| >= c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzPenalty {
    pub weight: f64,
    pub c: f64,
    #[serde(default = "penalty_grid")]
    pub grid: usize,
}

fn penalty_grid() -> usize {
    2001
}

impl LipschitzPenalty {
    pub fn new(weight: f64, c: f64) -> Self {
        Self {
            weight,
            c,
            grid: penalty_grid(),
        }
    }

    /// Value and subgradient.
    pub fn evaluate(&self, h: &CoefficientTensor) -> (f64, CoefficientTensor) {
        let mut best = (f64::NEG_INFINITY, 0usize, 0usize, 0usize, 1.0f64);
        for l in 0..h.layers() {
            let (fo, gi, _) = h.shape(l);
            for f in 0..fo {
                for g in 0..gi {
                    let (a, lambda) = outer_lipschitz_point(&h.filter(l, f, g), self.c, self.grid);
                    if a > best.0 {
                        best = (a, l, f, g, lambda);
                    }
                }
            }
        }
        let mut grad = CoefficientTensor {
            shapes: h.shapes.clone(),
            layers: h.layers.iter().map(|v| vec![0.0; v.len()]).collect(),
        };
        let (a, l, f, g, lambda) = best;
        if a <= 0.0 || !a.is_finite() {
            return (0.0, grad);
        }
        let filt = h.filter(l, f, g);
        let sign = filt.derivative(lambda).signum();
        let (_, gi, k) = h.shape(l);
        let off = (f * gi + g) * k;
        for kk in 1..k {
            grad.layers[l][off + kk] = self.weight * sign * kk as f64 * lambda.powi(kk as i32 - 1);
        }
        (self.weight * a, grad)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainHyper {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub penalty: Option<LipschitzPenalty>,
    /// Loss above which training is declared divergent.
    pub divergence: f64,
}

impl Default for TrainHyper {
    fn default() -> Self {
        Self {
            learning_rate: 5e-4,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 16,
            epochs: 50,
            seed: 0,
            penalty: None,
            divergence: 1e6,
        }
    }
}

/// ADAM state for one parameter tensor.
#[derive(Debug, Clone)]
pub struct Adam {
    m: CoefficientTensor,
    v: CoefficientTensor,
    t: i32,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl Adam {
    pub fn new(cfg: &GnnConfig, hyper: &TrainHyper) -> Self {
        Self {
            m: CoefficientTensor::zeros(cfg),
            v: CoefficientTensor::zeros(cfg),
            t: 0,
            lr: hyper.learning_rate,
            beta1: hyper.beta1,
            beta2: hyper.beta2,
            eps: hyper.epsilon,
        }
    }

    pub fn step(&mut self, params: &mut CoefficientTensor, grad: &CoefficientTensor) {
        self.t += 1;
        let (b1, b2) = (self.beta1, self.beta2);
        self.m
            .for_each_mut(grad, |m, g| *m = b1 * *m + (1.0 - b1) * g);
        self.v
            .for_each_mut(grad, |v, g| *v = b2 * *v + (1.0 - b2) * g * g);
        let c1 = 1.0 - b1.powi(self.t);
        let c2 = 1.0 - b2.powi(self.t);
        for l in 0..params.layers.len() {
            for i in 0..params.layers[l].len() {
                let mh = self.m.layers[l][i] / c1;
                let vh = self.v.layers[l][i] / c2;
                params.layers[l][i] -= self.lr * mh / (vh.sqrt() + self.eps);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub tensor: CoefficientTensor,
    /// Objective (data loss plus penalty) of every minibatch step.
    pub losses: Vec<f64>,
}

/// Minibatch ADAM on the MSE, optionally with the Lipschitz penalty.
pub fn train_adam(
    h0: &CoefficientTensor,
    cfg: &GnnConfig,
    data: &Dataset,
    hyper: &TrainHyper,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    h0.matches(cfg)?;
    if data.samples.iter().any(|s| s.graph >= data.graphs.len()) {
        return Err(Error::InvalidGraph(
            "training sample refers to a missing graph".into(),
        ));
    }
    let mut h = h0.clone();
    let mut adam = Adam::new(cfg, hyper);
    let mut rng = stream(hyper.seed, Purpose::Batches);
    let mut order: Vec<usize> = (0..data.samples.len()).collect();
    let batch = hyper.batch_size.max(1);
    let mut losses = Vec::new();
    for _ in 0..hyper.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            let mut grad = CoefficientTensor::zeros(cfg);
            let mut loss = 0.0;
            let w = 1.0 / chunk.len() as f64;
            for &i in chunk {
                let s = &data.samples[i];
                let (l, g) = loss_and_gradient(&h, cfg, &data.graphs[s.graph], &s.x, &s.y)?;
                loss += w * l;
                grad.for_each_mut(&g, |a, b| *a += w * b);
            }
            if let Some(p) = &hyper.penalty {
                let (pv, pg) = p.evaluate(&h);
                loss += pv;
                grad.for_each_mut(&pg, |a, b| *a += b);
            }
            if !loss.is_finite() || loss > hyper.divergence {
                return Err(Error::Diverged {
                    step: losses.len(),
                    loss,
                });
            }
            losses.push(loss);
            adam.step(&mut h, &grad);
        }
    }
    Ok(TrainOutcome { tensor: h, losses })
}

/// Model checkpoint: configuration plus the flattened tensor and its shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config: GnnConfig,
    /// `[F_out, F_in, K]` per layer.
    pub shape: Vec<[usize; 3]>,
    pub parameters: Vec<f64>,
}

impl Checkpoint {
    pub fn new(config: &GnnConfig, tensor: &CoefficientTensor) -> Self {
        Self {
            config: config.clone(),
            shape: tensor.shapes.iter().map(|&(a, b, c)| [a, b, c]).collect(),
            parameters: tensor.flat(),
        }
    }

    pub fn tensor(&self) -> Result<CoefficientTensor> {
        self.config.validate()?;
        let t = CoefficientTensor::from_flat(&self.config, &self.parameters)?;
        let shape: Vec<[usize; 3]> = t.shapes.iter().map(|&(a, b, c)| [a, b, c]).collect();
        if shape != self.shape {
            return Err(Error::Parse(format!(
                "checkpoint shape {:?} disagrees with config {:?}",
                self.shape, shape
            )));
        }
        Ok(t)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
