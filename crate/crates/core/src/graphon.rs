//! Graphons, graphon signals, their L2 geometry, and the step functions
//! induced by graphs.
//!
//! A graphon is either an analytic kernel from the built-in family or a step
//! function on a partition of `[0,1]`. Step objects use half-open cells
//! `[b_k, b_{k+1})`, the last cell being closed.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::graph::{Graph, GraphSignal};
use crate::linalg::DenseMatrix;

/// Default quadrature resolution per axis.
pub const DEFAULT_GRID: usize = 2048;

/// Resolution of the dense grid used to validate analytic kernels.
const VALIDATION_GRID: usize = 257;

/// Where the `m` sample points of a regular grid sit inside their cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPoints {
    /// Left endpoints `k/m` (the template-graph labels).
    Template,
    /// Cell midpoints `(k + 1/2)/m`.
    Midpoint,
}

impl GridPoints {
    pub fn points(self, m: usize) -> Vec<f64> {
        let mf = m as f64;
        match self {
            GridPoints::Template => (0..m).map(|k| k as f64 / mf).collect(),
            GridPoints::Midpoint => (0..m).map(|k| (k as f64 + 0.5) / mf).collect(),
        }
    }
}

fn check_breakpoints(b: &[f64], strict: bool) -> std::result::Result<(), String> {
    if b.len() < 2 {
        return Err("a partition needs at least two breakpoints".into());
    }
    if b[0] != 0.0 || b[b.len() - 1] != 1.0 {
        return Err(format!(
            "breakpoints must start at 0 and end at 1, got {} .. {}",
            b[0],
            b[b.len() - 1]
        ));
    }
    for w in b.windows(2) {
        if !(w[0].is_finite() && w[1].is_finite()) {
            return Err("breakpoints must be finite".into());
        }
        if (strict && w[1] <= w[0]) || w[1] < w[0] {
            return Err(format!(
                "breakpoints not increasing at {} -> {}",
                w[0], w[1]
            ));
        }
    }
    Ok(())
}

/// Index of the cell of `breakpoints` containing `u`.
#[inline]
pub(crate) fn cell_of(breakpoints: &[f64], u: f64) -> usize {
    let cells = breakpoints.len() - 1;
    let inner = &breakpoints[1..cells];
    inner.partition_point(|&b| b <= u)
}

fn merged_cells(a: &[f64], b: &[f64]) -> Vec<(f64, usize, usize)> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            (w[1] - w[0], cell_of(a, mid), cell_of(b, mid))
        })
        .collect()
}

/// Piecewise-constant symmetric kernel on a partition of `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepKernel {
    breakpoints: Vec<f64>,
    /// Row-major `k x k` block values.
    values: Vec<f64>,
}

impl StepKernel {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        check_breakpoints(&breakpoints, true).map_err(Error::InvalidGraphon)?;
        let k = breakpoints.len() - 1;
        check_len(k, values.len())?;
        let mut flat = Vec::with_capacity(k * k);
        for row in &values {
            check_len(k, row.len())?;
            flat.extend_from_slice(row);
        }
        let s = Self {
            breakpoints,
            values: flat,
        };
        s.validate()?;
        Ok(s)
    }

    /// Induced step kernels may carry zero-width cells when labels tie.
    pub(crate) fn from_parts_unchecked(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert!(check_breakpoints(&breakpoints, false).is_ok());
        Self {
            breakpoints,
            values,
        }
    }

    fn validate(&self) -> Result<()> {
        let k = self.cells();
        for i in 0..k {
            for j in 0..k {
                let v = self.block(i, j);
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidGraphon(format!(
                        "block value {v} outside [0,1]"
                    )));
                }
                if v != self.block(j, i) {
                    return Err(Error::InvalidGraphon(format!(
                        "block ({i},{j}) breaks symmetry"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn cells(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    #[inline]
    pub fn block(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cells() + j]
    }

    pub fn value_rows(&self) -> Vec<Vec<f64>> {
        let k = self.cells();
        (0..k)
            .map(|i| self.values[i * k..(i + 1) * k].to_vec())
            .collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    #[inline]
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.block(cell_of(&self.breakpoints, u), cell_of(&self.breakpoints, v))
    }

    /// Exact L2 distance on the merged partition.
    pub fn l2_distance(&self, other: &StepKernel) -> f64 {
        let cells = merged_cells(&self.breakpoints, &other.breakpoints);
        let mut acc = 0.0;
        for &(wu, ia, ib) in &cells {
            let mut row = 0.0;
            for &(wv, ja, jb) in &cells {
                let d = self.block(ia, ja) - other.block(ib, jb);
                row += wv * d * d;
            }
            acc += wu * row;
        }
        acc.sqrt()
    }

    pub fn max_degree(&self) -> f64 {
        let w = self.widths();
        (0..self.cells())
            .filter(|&i| w[i] > 0.0)
            .map(|i| {
                (0..self.cells())
                    .map(|j| self.block(i, j) * w[j])
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Built-in analytic kernels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    /// `W(u,v) = p`.
    Constant { p: f64 },
    /// Stochastic block model with block `boundaries` (from 0 to 1) and
    /// symmetric block probabilities.
    Sbm {
        boundaries: Vec<f64>,
        probs: Vec<Vec<f64>>,
    },
    /// `W(u,v) = uv`.
    Product,
    /// `W(u,v) = scale * exp(-gamma |u - v|)`.
    Exponential {
        gamma: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `W(u,v) = (u + v) / 2`.
    Average,
}

fn one() -> f64 {
    1.0
}

impl Kernel {
    #[inline]
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        match self {
            Kernel::Constant { p } => *p,
            Kernel::Sbm { boundaries, probs } => {
                probs[cell_of(boundaries, u)][cell_of(boundaries, v)]
            }
            Kernel::Product => u * v,
            Kernel::Exponential { gamma, scale } => scale * (-gamma * (u - v).abs()).exp(),
            Kernel::Average => 0.5 * (u + v),
        }
    }

    /// Exact Lipschitz constant in the `|du| + |dv|` metric, when one exists.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            Kernel::Constant { .. } => Some(0.0),
            Kernel::Sbm { .. } => None,
            Kernel::Product => Some(1.0),
            Kernel::Exponential { gamma, scale } => Some(gamma * scale),
            Kernel::Average => Some(0.5),
        }
    }

    fn check_params(&self) -> Result<()> {
        match self {
            Kernel::Constant { p } if !(0.0..=1.0).contains(p) => Err(Error::InvalidGraphon(
                format!("constant level {p} outside [0,1]"),
            )),
            Kernel::Sbm { boundaries, probs } => {
                check_breakpoints(boundaries, true).map_err(Error::InvalidGraphon)?;
                let k = boundaries.len() - 1;
                check_len(k, probs.len())?;
                for (i, row) in probs.iter().enumerate() {
                    check_len(k, row.len())?;
                    for (j, &p) in row.iter().enumerate() {
                        if !(0.0..=1.0).contains(&p) {
                            return Err(Error::InvalidGraphon(format!(
                                "block probability {p} outside [0,1]"
                            )));
                        }
                        if p != probs[j][i] {
                            return Err(Error::InvalidGraphon(
                                "block probabilities are not symmetric".into(),
                            ));
                        }
                    }
                }
                Ok(())
            }
            Kernel::Exponential { gamma, scale } => {
                if !(*gamma >= 0.0 && gamma.is_finite()) {
                    return Err(Error::InvalidGraphon(format!(
                        "decay rate {gamma} must be >= 0"
                    )));
                }
                if !(0.0..=1.0).contains(scale) {
                    return Err(Error::InvalidGraphon(format!(
                        "scale {scale} outside [0,1]"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Analytic(Kernel),
    Step(StepKernel),
}

/// Bounded symmetric kernel `W: [0,1]^2 -> [0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphonJson", into = "GraphonJson")]
pub struct Graphon {
    repr: Repr,
    lipschitz: Option<f64>,
}

impl Graphon {
    pub fn from_kernel(kernel: Kernel) -> Result<Self> {
        kernel.check_params()?;
        let g = Self {
            lipschitz: kernel.lipschitz(),
            repr: Repr::Analytic(kernel),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn constant(p: f64) -> Result<Self> {
        Self::from_kernel(Kernel::Constant { p })
    }

    pub fn sbm(boundaries: Vec<f64>, probs: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_kernel(Kernel::Sbm { boundaries, probs })
    }

    pub fn product() -> Self {
        Self {
            repr: Repr::Analytic(Kernel::Product),
            lipschitz: Some(1.0),
        }
    }

    pub fn average() -> Self {
        Self {
            repr: Repr::Analytic(Kernel::Average),
            lipschitz: Some(0.5),
        }
    }

    pub fn exponential(gamma: f64, scale: f64) -> Result<Self> {
        Self::from_kernel(Kernel::Exponential { gamma, scale })
    }

    pub fn step(breakpoints: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self {
            repr: Repr::Step(StepKernel::new(breakpoints, values)?),
            lipschitz: None,
        })
    }

    pub fn from_step_kernel(k: StepKernel) -> Self {
        Self {
            repr: Repr::Step(k),
            lipschitz: None,
        }
    }

    /// Parses `constant:P`, `product`, `average`, `exp:GAMMA[:SCALE]`,
    /// `sbm2` (two equal blocks, probabilities 0.8/0.2/0.6) or
    /// `sbm:B1,B2,...;P11,P12,...` with interior boundaries and row-major probabilities.
    pub fn builtin(name: &str) -> Result<Self> {
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
        };
        let (head, rest) = match name.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (name, None),
        };
        match (head, rest) {
            ("constant", Some(p)) => Self::constant(parse(p)?),
            ("product", None) => Ok(Self::product()),
            ("average", None) => Ok(Self::average()),
            ("exp", Some(args)) => {
                let mut it = args.split(':');
                let gamma = parse(it.next().unwrap_or(""))?;
                let scale = it.next().map(parse).transpose()?.unwrap_or(1.0);
                Self::exponential(gamma, scale)
            }
            ("sbm2", None) => Self::sbm(vec![0.0, 0.5, 1.0], vec![vec![0.8, 0.2], vec![0.2, 0.6]]),
            ("sbm", Some(args)) => {
                let (b, p) = args
                    .split_once(';')
                    .ok_or_else(|| Error::Parse("sbm expects 'boundaries;probabilities'".into()))?;
                let mut boundaries = vec![0.0];
                for s in b.split(',').filter(|s| !s.trim().is_empty()) {
                    boundaries.push(parse(s)?);
                }
                boundaries.push(1.0);
                let k = boundaries.len() - 1;
                let flat = p.split(',').map(parse).collect::<Result<Vec<_>>>()?;
                check_len(k * k, flat.len())?;
                Self::sbm(boundaries, flat.chunks(k).map(|c| c.to_vec()).collect())
            }
            _ => Err(Error::Parse(format!("unknown built-in graphon {name:?}"))),
        }
    }

    /// Overrides the Lipschitz constant, e.g. for step graphons used as
    /// stand-ins for Lipschitz limits.
    pub fn with_lipschitz(mut self, a_w: Option<f64>) -> Self {
        self.lipschitz = a_w;
        self
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn kernel(&self) -> Option<&Kernel> {
        match &self.repr {
            Repr::Analytic(k) => Some(k),
            Repr::Step(_) => None,
        }
    }

    pub fn is_step(&self) -> bool {
        matches!(self.repr, Repr::Step(_))
    }

    #[inline]
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        match &self.repr {
            Repr::Analytic(k) => k.eval(u, v),
            Repr::Step(s) => s.eval(u, v),
        }
    }

    /// Exact step representation for step graphons, constants and SBMs.
    pub fn as_step(&self) -> Option<StepKernel> {
        match &self.repr {
            Repr::Step(s) => Some(s.clone()),
            Repr::Analytic(Kernel::Constant { p }) => {
                Some(StepKernel::from_parts_unchecked(vec![0.0, 1.0], vec![*p]))
            }
            Repr::Analytic(Kernel::Sbm { boundaries, probs }) => {
                Some(StepKernel::from_parts_unchecked(
                    boundaries.clone(),
                    probs.iter().flatten().copied().collect(),
                ))
            }
            Repr::Analytic(_) => None,
        }
    }

    /// Range and symmetry check: exact for step functions, on a dense grid
    /// for analytic kernels.
    pub fn validate(&self) -> Result<()> {
        match &self.repr {
            Repr::Step(s) => s.validate(),
            Repr::Analytic(k) => {
                k.check_params()?;
                let m = VALIDATION_GRID;
                for i in 0..m {
                    let u = i as f64 / (m - 1) as f64;
                    for j in i..m {
                        let v = j as f64 / (m - 1) as f64;
                        let w = k.eval(u, v);
                        if !(0.0..=1.0).contains(&w) {
                            return Err(Error::InvalidGraphon(format!(
                                "W({u},{v}) = {w} outside [0,1]"
                            )));
                        }
                        if (w - k.eval(v, u)).abs() > 1e-12 {
                            return Err(Error::InvalidGraphon(format!(
                                "W not symmetric at ({u},{v})"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Kernel sampled on an `m x m` grid.
    pub fn grid_matrix(&self, m: usize, points: GridPoints) -> DenseMatrix {
        let pts = points.points(m);
        let sampler = Sampler::new(self, &pts);
        DenseMatrix::from_fn(m, |i, j| sampler.value(i, j))
    }

    /// `d_W = max_u \int_0^1 W(u,v) dv`; exact for step kernels, otherwise
    /// the maximum over `u in {0, 1/m, ..., 1}` of a midpoint rule in `v`.
    pub fn max_degree_with(&self, m: usize) -> f64 {
        if let Some(s) = self.as_step() {
            return s.max_degree();
        }
        let vs = GridPoints::Midpoint.points(m);
        (0..=m)
            .map(|i| {
                let u = i as f64 / m as f64;
                vs.iter().map(|&v| self.eval(u, v)).sum::<f64>() / m as f64
            })
            .fold(0.0, f64::max)
    }

    pub fn max_degree(&self) -> f64 {
        self.max_degree_with(DEFAULT_GRID)
    }
}

/// Fast repeated evaluation on a fixed set of axis points.
struct Sampler<'a> {
    graphon: &'a Graphon,
    points: &'a [f64],
    step: Option<(StepKernel, Vec<usize>)>,
}

impl<'a> Sampler<'a> {
    fn new(graphon: &'a Graphon, points: &'a [f64]) -> Self {
        let step = graphon.as_step().map(|s| {
            let cells = points
                .iter()
                .map(|&u| cell_of(s.breakpoints(), u))
                .collect();
            (s, cells)
        });
        Self {
            graphon,
            points,
            step,
        }
    }

    #[inline]
    fn value(&self, i: usize, j: usize) -> f64 {
        match &self.step {
            Some((s, cells)) => s.block(cells[i], cells[j]),
            None => self.graphon.eval(self.points[i], self.points[j]),
        }
    }
}

/// L2 distance on `[0,1]^2` with the default resolution.
pub fn graphon_l2_distance(a: &Graphon, b: &Graphon) -> f64 {
    graphon_l2_distance_with(a, b, DEFAULT_GRID)
}

/// Exact on the merged partition when both sides are step functions;
/// otherwise composite midpoint quadrature with `m` points per axis.
pub fn graphon_l2_distance_with(a: &Graphon, b: &Graphon, m: usize) -> f64 {
    if let (Some(sa), Some(sb)) = (a.as_step(), b.as_step()) {
        return sa.l2_distance(&sb);
    }
    let pts = GridPoints::Midpoint.points(m);
    let (ea, eb) = (Sampler::new(a, &pts), Sampler::new(b, &pts));
    let mut acc = 0.0;
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..m {
            let d = ea.value(i, j) - eb.value(i, j);
            row += d * d;
        }
        acc += row;
    }
    (acc / (m as f64 * m as f64)).sqrt()
}

/// Step graphon `W_G` induced by a graph: block `[S]_ij` on `I_i x I_j` with
/// `I_1 = [0, u_2)`, `I_i = [u_i, u_{i+1})`, `I_n = [u_n, 1]`.
pub fn induced_graphon(g: &Graph) -> Graphon {
    Graphon::from_step_kernel(StepKernel::from_parts_unchecked(
        g.breakpoints(),
        g.gso().as_slice().to_vec(),
    ))
}

/// Step signal taking value `[x]_i` on `I_i`.
pub fn induced_graphon_signal(x: &GraphSignal, g: &Graph) -> Result<GraphonSignal> {
    check_len(g.n(), x.len())?;
    Ok(GraphonSignal::from_step(
        StepFunction::from_parts_unchecked(g.breakpoints(), x.values().to_vec()),
    ))
}

/// Piecewise-constant function on a partition of `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_breakpoints(&breakpoints, true).map_err(Error::InvalidSignal)?;
        check_len(breakpoints.len() - 1, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal("non-finite value".into()));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    pub(crate) fn from_parts_unchecked(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        Self {
            breakpoints,
            values,
        }
    }

    /// Step function on the regular `m`-partition.
    pub fn regular(values: Vec<f64>) -> Self {
        let m = values.len();
        let mut b: Vec<f64> = (0..m).map(|k| k as f64 / m as f64).collect();
        b.push(1.0);
        Self {
            breakpoints: b,
            values,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        self.values[cell_of(&self.breakpoints, u)]
    }

    fn norm(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| (w[1] - w[0]) * v * v)
            .sum::<f64>()
            .sqrt()
    }

    fn l2_distance(&self, other: &StepFunction) -> f64 {
        merged_cells(&self.breakpoints, &other.breakpoints)
            .iter()
            .map(|&(w, a, b)| {
                let d = self.values[a] - other.values[b];
                w * d * d
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignalShape {
    Constant(f64),
    /// `X(u) = intercept + slope * u`.
    Affine {
        intercept: f64,
        slope: f64,
    },
    /// `X(u) = amplitude * cos(pi * frequency * u)`.
    Cosine {
        amplitude: f64,
        frequency: f64,
    },
    Step(StepFunction),
}

/// Function `X in L2([0,1])`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SignalJson", into = "SignalJson")]
pub struct GraphonSignal {
    shape: SignalShape,
    lipschitz: Option<f64>,
    norm: OnceLock<f64>,
}

impl PartialEq for GraphonSignal {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.lipschitz == other.lipschitz
    }
}

impl GraphonSignal {
    fn with_shape(shape: SignalShape, lipschitz: Option<f64>) -> Self {
        Self {
            shape,
            lipschitz,
            norm: OnceLock::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::with_shape(SignalShape::Constant(c), Some(0.0))
    }

    /// The identity signal `X(u) = u`.
    pub fn identity() -> Self {
        Self::affine(0.0, 1.0)
    }

    pub fn affine(intercept: f64, slope: f64) -> Self {
        Self::with_shape(SignalShape::Affine { intercept, slope }, Some(slope.abs()))
    }

    pub fn cosine(amplitude: f64, frequency: f64) -> Self {
        Self::with_shape(
            SignalShape::Cosine {
                amplitude,
                frequency,
            },
            Some(amplitude.abs() * PI * frequency.abs()),
        )
    }

    pub fn step(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(Self::from_step(StepFunction::new(breakpoints, values)?))
    }

    pub fn from_step(s: StepFunction) -> Self {
        Self::with_shape(SignalShape::Step(s), None)
    }

    pub fn with_lipschitz(mut self, a_x: Option<f64>) -> Self {
        self.lipschitz = a_x;
        self
    }

    pub fn shape(&self) -> &SignalShape {
        &self.shape
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn as_step(&self) -> Option<&StepFunction> {
        match &self.shape {
            SignalShape::Step(s) => Some(s),
            _ => None,
        }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match &self.shape {
            SignalShape::Constant(c) => *c,
            SignalShape::Affine { intercept, slope } => intercept + slope * u,
            SignalShape::Cosine {
                amplitude,
                frequency,
            } => amplitude * (PI * frequency * u).cos(),
            SignalShape::Step(s) => s.eval(u),
        }
    }

    pub fn sample(&self, points: &[f64]) -> Vec<f64> {
        points.iter().map(|&u| self.eval(u)).collect()
    }

    /// L2 norm, computed in closed form on first use.
    pub fn norm(&self) -> f64 {
        *self.norm.get_or_init(|| match &self.shape {
            SignalShape::Constant(c) => c.abs(),
            SignalShape::Affine {
                intercept: a,
                slope: b,
            } => (a * a + a * b + b * b / 3.0).sqrt(),
            SignalShape::Cosine {
                amplitude,
                frequency,
            } => {
                let w = PI * frequency;
                let mean_sq = if w == 0.0 {
                    1.0
                } else {
                    0.5 + (2.0 * w).sin() / (4.0 * w)
                };
                amplitude.abs() * mean_sq.sqrt()
            }
            SignalShape::Step(s) => s.norm(),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Option<Self> {
        self.as_step().map(|s| {
            Self::from_step(StepFunction::from_parts_unchecked(
                s.breakpoints.clone(),
                s.values.iter().map(|&v| f(v)).collect(),
            ))
        })
    }
}

pub fn signal_l2_distance(a: &GraphonSignal, b: &GraphonSignal) -> f64 {
    signal_l2_distance_with(a, b, DEFAULT_GRID)
}

/// Exact for two step signals, otherwise midpoint quadrature with `m` points.
pub fn signal_l2_distance_with(a: &GraphonSignal, b: &GraphonSignal, m: usize) -> f64 {
    if let (Some(sa), Some(sb)) = (a.as_step(), b.as_step()) {
        return sa.l2_distance(sb);
    }
    let pts = GridPoints::Midpoint.points(m);
    let acc: f64 = pts
        .iter()
        .map(|&u| {
            let d = a.eval(u) - b.eval(u);
            d * d
        })
        .sum();
    (acc / m as f64).sqrt()
}

pub fn max_degree(w: &Graphon) -> f64 {
    w.max_degree()
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GraphonJson {
    Step {
        breakpoints: Vec<f64>,
        values: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lipschitz: Option<f64>,
    },
    Kernel(Kernel),
}

impl TryFrom<GraphonJson> for Graphon {
    type Error = Error;

    fn try_from(j: GraphonJson) -> Result<Self> {
        match j {
            GraphonJson::Step {
                breakpoints,
                values,
                lipschitz,
            } => Ok(Graphon::step(breakpoints, values)?.with_lipschitz(lipschitz)),
            GraphonJson::Kernel(k) => Graphon::from_kernel(k),
        }
    }
}

impl From<Graphon> for GraphonJson {
    fn from(g: Graphon) -> Self {
        match g.repr {
            Repr::Analytic(k) => GraphonJson::Kernel(k),
            Repr::Step(s) => GraphonJson::Step {
                values: s.value_rows(),
                breakpoints: s.breakpoints,
                lipschitz: g.lipschitz,
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SignalJson {
    Step {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    Analytic(AnalyticSignal),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum AnalyticSignal {
    Constant { value: f64 },
    Affine { intercept: f64, slope: f64 },
    Cosine { amplitude: f64, frequency: f64 },
}

impl TryFrom<SignalJson> for GraphonSignal {
    type Error = Error;

    fn try_from(j: SignalJson) -> Result<Self> {
        Ok(match j {
            SignalJson::Step {
                breakpoints,
                values,
            } => GraphonSignal::step(breakpoints, values)?,
            SignalJson::Analytic(AnalyticSignal::Constant { value }) => {
                GraphonSignal::constant(value)
            }
            SignalJson::Analytic(AnalyticSignal::Affine { intercept, slope }) => {
                GraphonSignal::affine(intercept, slope)
            }
            SignalJson::Analytic(AnalyticSignal::Cosine {
                amplitude,
                frequency,
            }) => GraphonSignal::cosine(amplitude, frequency),
        })
    }
}

impl From<GraphonSignal> for SignalJson {
    fn from(s: GraphonSignal) -> Self {
        match s.shape {
            SignalShape::Constant(value) => {
                SignalJson::Analytic(AnalyticSignal::Constant { value })
            }
            SignalShape::Affine { intercept, slope } => {
                SignalJson::Analytic(AnalyticSignal::Affine { intercept, slope })
            }
            SignalShape::Cosine {
                amplitude,
                frequency,
            } => SignalJson::Analytic(AnalyticSignal::Cosine {
                amplitude,
                frequency,
            }),
            SignalShape::Step(f) => SignalJson::Step {
                breakpoints: f.breakpoints,
                values: f.values,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Provenance;
    use crate::sampling::sample_template;
    use approx::assert_abs_diff_eq;

    fn two_block() -> Graphon {
        Graphon::builtin("sbm2").unwrap()
    }

    #[test]
    fn induced_constant_template_is_constant() {
        let w = Graphon::constant(0.4).unwrap();
        let g = sample_template(&w, 2).unwrap();
        let wg = induced_graphon(&g);
        for &(u, v) in &[(0.1, 0.2), (0.7, 0.3), (1.0, 0.0)] {
            assert_eq!(wg.eval(u, v), 0.4);
        }
        assert_eq!(graphon_l2_distance(&w, &wg), 0.0);
    }

    #[test]
    fn induced_single_node_zero() {
        let g = Graph::new(vec![0.3], DenseMatrix::zeros(1), Provenance::External).unwrap();
        let wg = induced_graphon(&g);
        assert_eq!(wg.eval(0.0, 1.0), 0.0);
        assert_eq!(
            graphon_l2_distance(&wg, &Graphon::constant(0.0).unwrap()),
            0.0
        );
    }

    #[test]
    fn induced_three_node_blocks() {
        let s = DenseMatrix::from_rows(&[
            vec![0.0, 0.5, 0.2],
            vec![0.5, 1.0, 0.3],
            vec![0.2, 0.3, 0.0],
        ])
        .unwrap();
        let g = Graph::new(vec![0.1, 0.5, 0.9], s, Provenance::External).unwrap();
        let wg = induced_graphon(&g);
        assert_eq!(wg.as_step().unwrap().breakpoints(), &[0.0, 0.5, 0.9, 1.0]);
        assert_eq!(wg.eval(0.05, 0.6), 0.5);
        assert_eq!(wg.eval(0.95, 0.2), 0.2);
        assert_eq!(graphon_l2_distance(&wg, &wg), 0.0);
    }

    #[test]
    fn induced_signal_examples() {
        let w = Graphon::constant(0.4).unwrap();
        let g2 = sample_template(&w, 2).unwrap();
        let ones = induced_graphon_signal(&GraphSignal::new(vec![1.0, 1.0]), &g2).unwrap();
        assert_abs_diff_eq!(ones.norm(), 1.0, epsilon = 1e-15);

        let x = induced_graphon_signal(&GraphSignal::new(vec![0.0, 0.5]), &g2).unwrap();
        let d = signal_l2_distance(&GraphonSignal::identity(), &x);
        assert_abs_diff_eq!(d, 1.0 / 12f64.sqrt(), epsilon = 1e-6);

        let g1 = sample_template(&w, 1).unwrap();
        let c = induced_graphon_signal(&GraphSignal::new(vec![3.0]), &g1).unwrap();
        assert_eq!(c.eval(0.7), 3.0);

        assert!(induced_graphon_signal(&GraphSignal::new(vec![1.0]), &g2).is_err());
    }

    #[test]
    fn product_kernel_template_distance_within_bound() {
        let w = Graphon::product();
        let g = sample_template(&w, 8).unwrap();
        let d = graphon_l2_distance(&w, &induced_graphon(&g));
        assert!(d > 0.0 && d <= 0.25, "{d}");
    }

    #[test]
    fn signal_distance_examples() {
        let x = GraphonSignal::identity();
        assert_eq!(signal_l2_distance(&x, &x), 0.0);
        let d = signal_l2_distance(&GraphonSignal::constant(1.0), &GraphonSignal::constant(0.0));
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn max_degree_examples() {
        assert_abs_diff_eq!(
            Graphon::constant(0.4).unwrap().max_degree(),
            0.4,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(two_block().max_degree(), 0.5, epsilon = 1e-15);
        assert_eq!(Graphon::constant(0.0).unwrap().max_degree(), 0.0);
        assert_abs_diff_eq!(Graphon::product().max_degree(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rejects_invalid_graphons() {
        assert!(Graphon::constant(1.5).is_err());
        assert!(Graphon::step(vec![0.0, 0.6, 0.4, 1.0], vec![vec![0.0; 3]; 3]).is_err());
        assert!(Graphon::step(vec![0.1, 1.0], vec![vec![0.0]]).is_err());
        assert!(Graphon::step(vec![0.0, 0.5, 1.0], vec![vec![0.1, 0.2], vec![0.3, 0.1]]).is_err());
        assert!(Graphon::sbm(vec![0.0, 0.5, 1.0], vec![vec![0.8, 0.2], vec![0.2, 1.2]]).is_err());
        assert!(Graphon::exponential(-1.0, 1.0).is_err());
        assert!(Graphon::builtin("nope").is_err());
    }

    #[test]
    fn builtin_parsing() {
        assert_eq!(
            Graphon::builtin("constant:0.4").unwrap(),
            Graphon::constant(0.4).unwrap()
        );
        assert_eq!(
            Graphon::builtin("exp:2:0.5").unwrap().lipschitz(),
            Some(1.0)
        );
        let s = Graphon::builtin("sbm:0.5;0.8,0.2,0.2,0.6").unwrap();
        assert_eq!(s, two_block());
    }

    #[test]
    fn json_formats() {
        let step =
            Graphon::step(vec![0.0, 0.5, 1.0], vec![vec![0.1, 0.2], vec![0.2, 0.3]]).unwrap();
        let js = serde_json::to_string(&step).unwrap();
        assert_eq!(
            js,
            r#"{"breakpoints":[0.0,0.5,1.0],"values":[[0.1,0.2],[0.2,0.3]]}"#
        );
        assert_eq!(serde_json::from_str::<Graphon>(&js).unwrap(), step);
        let k: Graphon = serde_json::from_str(r#"{"kind":"exponential","gamma":3.0}"#).unwrap();
        assert_eq!(k.lipschitz(), Some(3.0));
        let sig: GraphonSignal =
            serde_json::from_str(r#"{"breakpoints":[0,0.5,1],"values":[1,2]}"#).unwrap();
        assert_eq!(sig.eval(0.75), 2.0);
        let round: GraphonSignal =
            serde_json::from_str(&serde_json::to_string(&sig).unwrap()).unwrap();
        assert_eq!(round, sig);
        let bad = serde_json::from_str::<Graphon>(r#"{"breakpoints":[0,1],"values":[[2.0]]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn signal_norms_closed_form() {
        assert_abs_diff_eq!(
            GraphonSignal::identity().norm(),
            (1.0f64 / 3.0).sqrt(),
            epsilon = 1e-15
        );
        let c = GraphonSignal::cosine(2.0, 1.0);
        let q = signal_l2_distance_with(&c, &GraphonSignal::constant(0.0), 1 << 16);
        assert_abs_diff_eq!(c.norm(), q, epsilon = 1e-8);
        let a = GraphonSignal::affine(0.3, -1.2);
        let q = signal_l2_distance_with(&a, &GraphonSignal::constant(0.0), 1 << 16);
        assert_abs_diff_eq!(a.norm(), q, epsilon = 1e-8);
    }
}
