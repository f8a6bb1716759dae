//! Dense complex-matrix kernel.
//!
//! Every operator in the crate is a [`CMatrix`]: a dense `nalgebra` matrix of
//! `Complex64` entries, optionally labelled with the dimensions of a tensor
//! factorization `H = H_0 ⊗ H_1 ⊗ ...` of its (square) index space. Factor 0
//! is the most significant digit of the row/column index.

mod linalg;
mod random;

pub use linalg::{
    hermitian_eigs, hermitian_power, operator_norm, partial_trace, swap_operator, tensor, trace_norm, weighted_inner,
    weighted_norm, Eigen, WeightedNormParams,
};
pub use random::{
    gaussian_matrix, haar_unitary, random_density, random_hermitian, random_pure, seeded_rng, trial_rng, Rng,
};

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    data: DMatrix<C64>,
    factors: Option<Vec<usize>>,
}

impl CMatrix {
    pub fn new(data: DMatrix<C64>) -> Self {
        Self { data, factors: None }
    }

    /// Wraps `data` with a tensor factorization. The product of `factors`
    /// must match both axes.
    pub fn with_factors(data: DMatrix<C64>, factors: Vec<usize>) -> Result<Self> {
        let prod: usize = factors.iter().product();
        if data.nrows() != data.ncols() {
            return Err(Error::NotSquare(data.nrows(), data.ncols()));
        }
        if prod != data.nrows() || factors.contains(&0) {
            return Err(Error::DimensionMismatch(format!("factors {:?} do not multiply to {}", factors, data.nrows())));
        }
        Ok(Self { data, factors: Some(factors) })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::new(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Rank-one operator `|v⟩⟨w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    /// Computational basis projector `|i⟩⟨i|` on a space of dimension `dim`.
    pub fn basis_projector(dim: usize, i: usize) -> Self {
        Self::from_fn(dim, dim, |r, c| if r == i && c == i { ONE } else { ZERO })
    }

    pub fn set_factors(mut self, factors: Vec<usize>) -> Result<Self> {
        let data = std::mem::replace(&mut self.data, DMatrix::zeros(0, 0));
        Self::with_factors(data, factors)
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn factors(&self) -> Option<&[usize]> {
        self.factors.as_deref()
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.data
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[(r, c)]
    }

    pub fn adjoint(&self) -> Self {
        Self { data: self.data.adjoint(), factors: self.factors.clone() }
    }

    pub fn transpose(&self) -> Self {
        Self { data: self.data.transpose(), factors: self.factors.clone() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { data: &self.data * C64::new(s, 0.0), factors: self.factors.clone() }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self { data: &self.data * s, factors: self.factors.clone() }
    }

    pub fn trace(&self) -> C64 {
        self.data.diagonal().iter().copied().sum()
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let data = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        Self { data, factors: self.factors.clone() }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows();
        for i in 0..n {
            for j in i..n {
                if (self.data[(i, j)] - self.data[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Hilbert-Schmidt inner product `tr[A† B]`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        self.data.iter().zip(other.data.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Squared Frobenius (Schatten-2) norm.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Column-stacking vectorization: `vec(X)[i + j·rows] = X[i, j]`.
    pub fn vectorize(&self) -> Vec<C64> {
        self.data.as_slice().to_vec()
    }

    /// Inverse of [`CMatrix::vectorize`].
    pub fn unvectorize(v: &[C64], rows: usize, cols: usize) -> Self {
        Self::new(DMatrix::from_column_slice(rows, cols, v))
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        self.data.diagonal().iter().map(|z| z.re).collect()
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix { data: &self.data + &rhs.data, factors: self.factors.clone() }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix { data: &self.data - &rhs.data, factors: self.factors.clone() }
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        let factors = if self.factors == rhs.factors { self.factors.clone() } else { None };
        CMatrix { data: &self.data * &rhs.data, factors }
    }
}

impl From<DMatrix<C64>> for CMatrix {
    fn from(data: DMatrix<C64>) -> Self {
        Self::new(data)
    }
}
