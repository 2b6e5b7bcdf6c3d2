//! Dense complex matrices and vectors used throughout the crate.
//!
//! Everything is carried by `nalgebra` dynamic matrices over `Complex<f64>`.
//! This module adds the small helpers the rest of the crate leans on:
//! Hermiticity checks, row-major vectorisation, the bipartite partial
//! transpose, and the JSON interchange format for matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Absolute entrywise tolerance for Hermiticity checks on unit-scale matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn cone() -> C64 {
    C64::new(1.0, 0.0)
}

/// Standard basis column vector `e_k` of `C^d` (zero-based `k`).
pub fn basis_vector(d: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[k] = cone();
    v
}

/// Elementary matrix `E_ij = |e_i><e_j|` in `C^{d x d}`.
pub fn elementary(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = cone();
    m
}

/// Outer product `|x><y|`.
pub fn outer(x: &CVector, y: &CVector) -> CMatrix {
    x * y.adjoint()
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Largest entrywise difference `max |a_ij - b_ij|`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Entrywise check of `M = M^dagger` within `tol`.
pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// `(M + M^dagger) / 2`; projects numerical noise off a Hermitian matrix.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Row-major vectorisation: `vec(M)_{i*cols+j} = M_ij`.
pub fn vec_row_major(m: &CMatrix) -> CVector {
    let (rows, cols) = m.shape();
    CVector::from_fn(rows * cols, |k, _| m[(k / cols, k % cols)])
}

/// Inverse of [`vec_row_major`].
pub fn unvec_row_major(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    assert_eq!(v.len(), rows * cols, "length mismatch in unvec_row_major");
    CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)[0]
}

/// Smallest eigenpair `(lambda_min, v)` of a Hermitian matrix.
pub fn min_eigenpair(m: &CMatrix) -> (f64, CVector) {
    let eig = m.clone().symmetric_eigen();
    let mut idx = 0;
    for k in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[k] < eig.eigenvalues[idx] {
            idx = k;
        }
    }
    (eig.eigenvalues[idx], eig.eigenvectors.column(idx).into())
}

/// Singular values sorted in nonincreasing order.
pub fn singular_values_desc(m: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Checks numerical invertibility: smallest singular value must exceed
/// `rel_tol` times the largest.
pub fn is_numerically_invertible(m: &CMatrix, rel_tol: f64) -> bool {
    if !m.is_square() || m.nrows() == 0 {
        return false;
    }
    let sv = singular_values_desc(m);
    let (max, min) = (sv[0], sv[sv.len() - 1]);
    max > 0.0 && min > rel_tol * max
}

/// Partial transpose on the second tensor factor of `C^d (x) C^d`.
///
/// Index convention: row `(a, b) = a*d + b`, column `(a', b') = a'*d + b'`;
/// the result has entries `T[(a,b),(a',b')] = M[(a,b'),(a',b)]`.
pub fn partial_transpose(m: &CMatrix, d: usize) -> CMatrix {
    assert_eq!(m.nrows(), d * d, "partial_transpose expects a d^2 x d^2 matrix");
    assert_eq!(m.ncols(), d * d, "partial_transpose expects a d^2 x d^2 matrix");
    CMatrix::from_fn(d * d, d * d, |row, col| {
        let (a, b) = (row / d, row % d);
        let (ap, bp) = (col / d, col % d);
        m[(a * d + bp, ap * d + b)]
    })
}

/// JSON interchange format for complex matrices.
///
/// `entries` is row-major, one `[re, im]` pair per entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let c = m[(i, j)];
                entries.push([c.re, c.im]);
            }
        }
        MatrixJson { rows, cols, entries }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::Dimension(format!(
                "matrix JSON has {} entries, expected {}x{}={}",
                self.entries.len(),
                self.rows,
                self.cols,
                self.rows * self.cols
            )));
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.entries[i * self.cols + j];
            C64::new(re, im)
        }))
    }
}
