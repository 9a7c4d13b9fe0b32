//! Dense row-major matrices and the symmetric eigensolver backend.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Square, row-major, dense real matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            crate::error::check_len(n, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        crate::error::check_len(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Largest |A_ij - A_ji|.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `y = s * A x`.
    pub fn matvec_scaled(&self, x: &[f64], s: f64) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| s * dot(self.row(i), x)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.matvec_scaled(x, 1.0)
    }

    /// Permutes rows and columns: `B[a][b] = A[perm[a]][perm[b]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.n, |a, b| self.get(perm[a], perm[b]))
    }

    fn to_faer(&self) -> faer::Mat<f64> {
        faer::Mat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Raw output of the symmetric eigensolver: ascending eigenvalues and the
/// matching eigenvectors stored column-wise (`vectors[k]` is the k-th vector).
pub(crate) struct RawEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

fn sequential() {
    // Results must not depend on the thread count of the caller.
    faer::set_global_parallelism(faer::Par::Seq);
}

pub(crate) fn symmetric_eigen(a: &DenseMatrix) -> Result<RawEigen> {
    sequential();
    let n = a.n();
    if n == 0 {
        return Ok(RawEigen {
            values: vec![],
            vectors: vec![],
        });
    }
    let m = a.to_faer();
    let evd = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values: Vec<f64> = (0..n).map(|k| s[k]).collect();
    let vectors = (0..n)
        .map(|k| (0..n).map(|i| u[(i, k)]).collect())
        .collect();
    Ok(RawEigen { values, vectors })
}

pub(crate) fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    sequential();
    if a.n() == 0 {
        return Ok(vec![]);
    }
    a.to_faer()
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))
}

/// Spectral norm of a symmetric matrix: the largest |eigenvalue|.
pub fn symmetric_spectral_norm(a: &DenseMatrix) -> Result<f64> {
    Ok(symmetric_eigenvalues(a)?
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_and_permutation() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(a.matvec(&[1.0, 1.0]), vec![3.0, 7.0]);
        let p = a.permuted(&[1, 0]);
        assert_eq!(p.to_rows(), vec![vec![4.0, 3.0], vec![2.0, 1.0]]);
        assert_eq!(a.max_asymmetry(), 1.0);
    }

    #[test]
    fn spectral_norm_of_path() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((symmetric_spectral_norm(&a).unwrap() - 1.0).abs() < 1e-14);
    }
}
