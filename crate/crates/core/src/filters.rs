//! Polynomial graph and graphon convolutions and the Lipschitz profile of
//! their frequency responses.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::graph::{Graph, GraphSignal};
use crate::graphon::{induced_graphon_signal, Graphon, GraphonSignal, GridPoints, StepFunction};
use crate::linalg::{axpy, norm2, DenseMatrix};
use crate::spectral::{Scale, SpectralDecomposition};

/// Default number of grid points used by [`estimate_spectral_profile`].
pub const PROFILE_GRID: usize = 100_000;

/// Taps `h_0, ..., h_{K-1}` of `sum_k h_k S^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FilterCoeffs {
    taps: Vec<f64>,
}

impl TryFrom<Vec<f64>> for FilterCoeffs {
    type Error = Error;

    fn try_from(taps: Vec<f64>) -> Result<Self> {
        Self::new(taps)
    }
}

impl From<FilterCoeffs> for Vec<f64> {
    fn from(h: FilterCoeffs) -> Self {
        h.taps
    }
}

impl FilterCoeffs {
    pub fn new(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::OutOfRange {
                name: "K",
                value: 0.0,
                range: ">= 1",
            });
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::Parse("filter taps must be finite".into()));
        }
        Ok(Self { taps })
    }

    pub fn identity() -> Self {
        Self { taps: vec![1.0] }
    }

    /// Parses comma-separated taps such as `0,1,0.5`.
    pub fn parse(s: &str) -> Result<Self> {
        let taps = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(taps)
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `h(lambda)`.
    pub fn response(&self, lambda: f64) -> f64 {
        self.taps.iter().rev().fold(0.0, |acc, &t| acc * lambda + t)
    }

    /// `h'(lambda)`.
    pub fn derivative(&self, lambda: f64) -> f64 {
        self.taps
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &t)| acc * lambda + k as f64 * t)
    }

    /// Coefficients of `h'`.
    fn derivative_taps(&self) -> Vec<f64> {
        self.taps
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &t)| k as f64 * t)
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            taps: self.taps.iter().map(|t| t * s).collect(),
        }
    }
}

/// Real roots of a polynomial of degree at most 2 given by its coefficients.
fn low_degree_roots(p: &[f64]) -> Vec<f64> {
    let coef = |k: usize| p.get(k).copied().unwrap_or(0.0);
    let (c0, c1, c2) = (coef(0), coef(1), coef(2));
    if c2 != 0.0 {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc < 0.0 {
            return vec![];
        }
        let r = disc.sqrt();
        vec![(-c1 + r) / (2.0 * c2), (-c1 - r) / (2.0 * c2)]
    } else if c1 != 0.0 {
        vec![-c0 / c1]
    } else {
        vec![]
    }
}

/// `y = sum_k h_k (factor * S)^k x` by repeated matrix-vector products.
pub fn apply_matrix_filter(
    h: &FilterCoeffs,
    s: &DenseMatrix,
    factor: f64,
    x: &[f64],
) -> Result<Vec<f64>> {
    check_len(s.n(), x.len())?;
    let mut y: Vec<f64> = x.iter().map(|v| v * h.taps[0]).collect();
    let mut z = x.to_vec();
    for &t in &h.taps[1..] {
        z = s.matvec_scaled(&z, factor);
        axpy(t, &z, &mut y);
    }
    Ok(y)
}

pub fn apply_graph_filter(
    h: &FilterCoeffs,
    g: &Graph,
    x: &GraphSignal,
    scale: Scale,
) -> Result<GraphSignal> {
    apply_matrix_filter(h, g.gso(), scale.factor(g.n()), x.values()).map(GraphSignal::new)
}

/// `V h(Lambda) V^T x`; `scale` must match the decomposition.
pub fn apply_spectral(
    h: &FilterCoeffs,
    d: &SpectralDecomposition,
    x: &GraphSignal,
    scale: Scale,
) -> Result<GraphSignal> {
    if d.scale != scale {
        return Err(Error::ScaleMismatch {
            have: d.scale,
            want: scale,
        });
    }
    d.apply_function(|l| h.response(l), x.values())
        .map(GraphSignal::new)
}

/// Graphon filter discretized on the template grid `k/m`; the output is a
/// step function on the regular `m`-partition.
pub fn apply_graphon_filter(
    h: &FilterCoeffs,
    w: &Graphon,
    x: &GraphonSignal,
    m: usize,
) -> Result<GraphonSignal> {
    if m < 2 {
        return Err(Error::OutOfRange {
            name: "m",
            value: m as f64,
            range: ">= 2",
        });
    }
    let s = w.grid_matrix(m, GridPoints::Template);
    let xs = x.sample(&GridPoints::Template.points(m));
    let y = apply_matrix_filter(h, &s, 1.0 / m as f64, &xs)?;
    Ok(GraphonSignal::from_step(StepFunction::regular(y)))
}

/// Output of the graphon filter induced by `g` on the signal induced by `x`.
pub fn induced_graphon_filter_output(
    h: &FilterCoeffs,
    g: &Graph,
    x: &GraphSignal,
) -> Result<GraphonSignal> {
    let y = apply_graph_filter(h, g, x, Scale::Normalized)?;
    induced_graphon_signal(&y, g)
}

/// `||H(S) S x - S H(S) x||` on the raw scale.
pub fn shift_commutation_check(h: &FilterCoeffs, g: &Graph, x: &GraphSignal) -> Result<f64> {
    let s = g.gso();
    let hsx = apply_matrix_filter(h, s, 1.0, &s.matvec(x.values()))?;
    let shx = s.matvec(&apply_matrix_filter(h, s, 1.0, x.values())?);
    let diff: Vec<f64> = hsx.iter().zip(&shx).map(|(a, b)| a - b).collect();
    Ok(norm2(&diff))
}

/// Lipschitz constants of a frequency response on `[-1,-c] U [c,1]` and on
/// `[-c,c]`, and its sup-norm on `[-1,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub c: f64,
    pub outer_lipschitz: f64,
    pub inner_lipschitz: f64,
    pub sup_abs: f64,
    pub satisfies_as2: bool,
}

pub fn estimate_spectral_profile(h: &FilterCoeffs, c: f64, grid: usize) -> Result<SpectralProfile> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::OutOfRange {
            name: "c",
            value: c,
            range: "(0, 1]",
        });
    }
    let points = profile_points(h, c, grid);
    let (mut outer, mut inner, mut sup) = (0.0f64, 0.0f64, 0.0f64);
    for &l in &points {
        let d = h.derivative(l).abs();
        if l.abs() >= c {
            outer = outer.max(d);
        }
        if l.abs() <= c {
            inner = inner.max(d);
        }
        sup = sup.max(h.response(l).abs());
    }
    Ok(SpectralProfile {
        c,
        outer_lipschitz: outer,
        inner_lipschitz: inner,
        sup_abs: sup,
        satisfies_as2: sup < 1.0 && inner <= outer,
    })
}

/// Candidate abscissae for extremes of `h` and `h'` on `[-1,1]`.
fn profile_points(h: &FilterCoeffs, c: f64, grid: usize) -> Vec<f64> {
    let grid = grid.max(2);
    let mut points: Vec<f64> = (0..grid)
        .map(|k| -1.0 + 2.0 * k as f64 / (grid - 1) as f64)
        .collect();
    points.extend([-1.0, 1.0, -c, c, 0.0]);
    // Extremes of h' sit at roots of h'', extremes of h at roots of h'.
    let dh = h.derivative_taps();
    let ddh: Vec<f64> = dh
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &t)| k as f64 * t)
        .collect();
    if ddh.len() <= 3 {
        points.extend(low_degree_roots(&ddh));
    }
    if dh.len() <= 3 {
        points.extend(low_degree_roots(&dh));
    }
    points.retain(|l| l.abs() <= 1.0);
    points
}

/// `A_h` together with a point of the outer band attaining it.
pub fn outer_lipschitz_point(h: &FilterCoeffs, c: f64, grid: usize) -> (f64, f64) {
    profile_points(h, c, grid)
        .into_iter()
        .filter(|l| l.abs() >= c)
        .map(|l| (h.derivative(l).abs(), l))
        .fold(
            (0.0, 1.0),
            |best, cand| if cand.0 > best.0 { cand } else { best },
        )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Provenance;
    use crate::graphon::{graphon_l2_distance, signal_l2_distance};
    use crate::sampling::{sample_graph_signal, sample_template};
    use crate::spectral::eigendecompose;
    use approx::assert_abs_diff_eq;

    fn path2() -> Graph {
        Graph::unlabeled(
            DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            Provenance::External,
        )
        .unwrap()
    }

    fn taps(t: &[f64]) -> FilterCoeffs {
        FilterCoeffs::new(t.to_vec()).unwrap()
    }

    #[test]
    fn graph_filter_examples() {
        let g = path2();
        let x = GraphSignal::new(vec![1.0, 2.0]);
        assert_eq!(
            apply_graph_filter(&FilterCoeffs::identity(), &g, &x, Scale::Raw).unwrap(),
            x
        );
        assert_eq!(
            apply_graph_filter(&taps(&[0.0, 1.0]), &g, &x, Scale::Raw)
                .unwrap()
                .values(),
            &[2.0, 1.0]
        );
        assert_eq!(
            apply_graph_filter(&taps(&[1.0, 1.0]), &g, &x, Scale::Raw)
                .unwrap()
                .values(),
            &[3.0, 3.0]
        );
        assert!(apply_graph_filter(&taps(&[1.0]), &g, &GraphSignal::zeros(3), Scale::Raw).is_err());
        assert!(FilterCoeffs::new(vec![]).is_err());
    }

    #[test]
    fn spectral_examples() {
        let g = path2();
        let x = GraphSignal::new(vec![1.0, 2.0]);
        let d = eigendecompose(&g, Scale::Raw).unwrap();
        let y = apply_spectral(&taps(&[0.0, 1.0]), &d, &x, Scale::Raw).unwrap();
        assert_abs_diff_eq!(y.values()[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y.values()[1], 1.0, epsilon = 1e-12);
        let id = apply_spectral(&FilterCoeffs::identity(), &d, &x, Scale::Raw).unwrap();
        assert_abs_diff_eq!(id.values()[1], 2.0, epsilon = 1e-12);
        assert!(matches!(
            apply_spectral(&FilterCoeffs::identity(), &d, &x, Scale::Normalized),
            Err(Error::ScaleMismatch { .. })
        ));
    }

    #[test]
    fn graphon_filter_examples() {
        let w = Graphon::constant(0.4).unwrap();
        let y = apply_graphon_filter(&taps(&[0.0, 1.0]), &w, &GraphonSignal::constant(1.0), 16)
            .unwrap();
        assert_abs_diff_eq!(
            signal_l2_distance(&y, &GraphonSignal::constant(0.4)),
            0.0,
            epsilon = 1e-15
        );

        let x = GraphonSignal::identity();
        let id = apply_graphon_filter(&FilterCoeffs::identity(), &w, &x, 8).unwrap();
        assert_eq!(
            id.as_step().unwrap().values(),
            &GridPoints::Template.points(8)[..]
        );

        let z = apply_graphon_filter(
            &taps(&[0.0, 0.7, 0.3]),
            &Graphon::constant(0.0).unwrap(),
            &x,
            8,
        )
        .unwrap();
        assert_eq!(z.norm(), 0.0);
    }

    #[test]
    fn induced_filter_examples() {
        let w = Graphon::constant(0.4).unwrap();
        for n in [1, 3, 10] {
            let g = sample_template(&w, n).unwrap();
            let x = GraphSignal::new(vec![1.0; n]);
            let y = induced_graphon_filter_output(&taps(&[0.0, 1.0]), &g, &x).unwrap();
            assert_abs_diff_eq!(
                signal_l2_distance(&y, &GraphonSignal::constant(0.4)),
                0.0,
                epsilon = 1e-15
            );
            let id = induced_graphon_filter_output(&FilterCoeffs::identity(), &g, &x).unwrap();
            assert_eq!(id, induced_graphon_signal(&x, &g).unwrap());
        }
    }

    #[test]
    fn induced_filter_matches_graphon_filter_on_induced_graphon() {
        let w = Graphon::exponential(2.0, 0.9).unwrap();
        let n = 12;
        let g = sample_template(&w, n).unwrap();
        let x = sample_graph_signal(&GraphonSignal::cosine(1.0, 2.0), &g);
        let h = taps(&[0.2, -0.5, 0.8, 0.1]);
        let via_graph = induced_graphon_filter_output(&h, &g, &x).unwrap();
        let wn = crate::graphon::induced_graphon(&g);
        let xn = induced_graphon_signal(&x, &g).unwrap();
        let via_graphon = apply_graphon_filter(&h, &wn, &xn, n).unwrap();
        assert!(signal_l2_distance(&via_graph, &via_graphon) < 1e-9);
        assert!(graphon_l2_distance(&wn, &w) > 0.0);
    }

    #[test]
    fn profile_examples() {
        let p = estimate_spectral_profile(&taps(&[0.0, 0.0, 0.9]), 0.5, PROFILE_GRID).unwrap();
        assert_abs_diff_eq!(p.outer_lipschitz, 1.8, epsilon = 1e-12);
        assert_abs_diff_eq!(p.inner_lipschitz, 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(p.sup_abs, 0.9, epsilon = 1e-12);
        assert!(p.satisfies_as2);

        let c = estimate_spectral_profile(&taps(&[0.5]), 0.5, PROFILE_GRID).unwrap();
        assert_eq!((c.outer_lipschitz, c.inner_lipschitz), (0.0, 0.0));

        let l = estimate_spectral_profile(&taps(&[0.0, 1.0]), 0.5, PROFILE_GRID).unwrap();
        assert_eq!(
            (l.outer_lipschitz, l.inner_lipschitz, l.sup_abs),
            (1.0, 1.0, 1.0)
        );
        assert!(!l.satisfies_as2);

        assert!(estimate_spectral_profile(&taps(&[1.0]), 0.0, 10).is_err());
    }

    #[test]
    fn profile_finds_interior_critical_points() {
        // h'(l) = 3l^2 - 1 peaks in magnitude at l = 0 inside the inner band
        let h = taps(&[0.0, -1.0, 0.0, 1.0]);
        let p = estimate_spectral_profile(&h, 0.5, 3).unwrap();
        assert_abs_diff_eq!(p.inner_lipschitz, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.outer_lipschitz, 2.0, epsilon = 1e-15);
        // |h| peaks at l = 1/sqrt(3)
        assert_abs_diff_eq!(p.sup_abs, 2.0 / (3.0 * 3f64.sqrt()), epsilon = 1e-15);
    }

    #[test]
    fn commutation_identity_is_exact() {
        let g = sample_template(&Graphon::product(), 16).unwrap();
        let x = GraphSignal::new((0..16).map(|i| (i as f64).sin()).collect());
        assert_eq!(
            shift_commutation_check(&FilterCoeffs::identity(), &g, &x).unwrap(),
            0.0
        );
        assert!(shift_commutation_check(&taps(&[0.3, 0.1, -0.2]), &g, &x).unwrap() < 1e-9);
    }

    #[test]
    fn serde_as_plain_list() {
        let h: FilterCoeffs = serde_json::from_str("[0.0, 1.0, 0.5]").unwrap();
        assert_eq!(h, FilterCoeffs::parse("0,1,0.5").unwrap());
        assert!(serde_json::from_str::<FilterCoeffs>("[]").is_err());
    }
}
