//! Dense real third-order tensors.
//!
//! Storage is contiguous with the frontal-slice index slowest-varying and
//! each slice row-major, so entry `[i, j, k]` lives at `k·n1·n2 + i·n2 + j`.
//!
//! Indexing: the methods on [`Tensor3`] take **zero-based** indices, except
//! [`Tensor3::frontal_slice`] and [`Tensor3::set_frontal_slice`], which
//! follow the usual mathematical convention where slices are numbered
//! `1..=p` (so `frontal_slice(1)` is `𝒜(:, :, 1)`).

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n1: usize,
    n2: usize,
    p: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n1: usize, n2: usize, p: usize) -> Self {
        assert!(n1 > 0 && n2 > 0 && p > 0, "empty tensor {n1}×{n2}×{p}");
        Tensor3 {
            n1,
            n2,
            p,
            data: vec![0.0; n1 * n2 * p],
        }
    }

    pub fn from_vec(n1: usize, n2: usize, p: usize, data: Vec<f64>) -> Result<Self> {
        if n1 == 0 || n2 == 0 || p == 0 {
            return Err(Error::shape(format!("empty tensor {n1}×{n2}×{p}")));
        }
        if data.len() != n1 * n2 * p {
            return Err(Error::shape(format!(
                "{} values cannot fill a {n1}×{n2}×{p} tensor",
                data.len()
            )));
        }
        Ok(Tensor3 { n1, n2, p, data })
    }

    /// Stacks equally shaped matrices as frontal slices 1..=p.
    pub fn from_slices(slices: &[Matrix]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::shape("no frontal slices"))?;
        let (n1, n2) = first.shape();
        let mut data = Vec::with_capacity(n1 * n2 * slices.len());
        for (k, s) in slices.iter().enumerate() {
            if s.shape() != (n1, n2) {
                return Err(Error::shape(format!(
                    "slice {} is {}×{}, expected {n1}×{n2}",
                    k + 1,
                    s.rows(),
                    s.cols()
                )));
            }
            data.extend_from_slice(s.as_slice());
        }
        Tensor3::from_vec(n1, n2, slices.len(), data)
    }

    pub fn from_fn(
        n1: usize,
        n2: usize,
        p: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut t = Tensor3::zeros(n1, n2, p);
        for k in 0..p {
            for i in 0..n1 {
                for j in 0..n2 {
                    t.data[(k * n1 + i) * n2 + j] = f(i, j, k);
                }
            }
        }
        t
    }

    /// Uniform entries in `[0, 1)`.
    pub fn random(n1: usize, n2: usize, p: usize, rng: &mut impl Rng) -> Self {
        let mut t = Tensor3::zeros(n1, n2, p);
        t.data.iter_mut().for_each(|x| *x = rng.random::<f64>());
        t
    }

    /// Uniform entries in `[-1, 1)`.
    pub fn random_signed(n1: usize, n2: usize, p: usize, rng: &mut impl Rng) -> Self {
        let mut t = Tensor3::zeros(n1, n2, p);
        t.data
            .iter_mut()
            .for_each(|x| *x = rng.random_range(-1.0..1.0));
        t
    }

    /// Every frontal slice equal to `m`.
    pub fn repeat_slice(m: &Matrix, p: usize) -> Self {
        let (n1, n2) = m.shape();
        let mut data = Vec::with_capacity(n1 * n2 * p);
        for _ in 0..p {
            data.extend_from_slice(m.as_slice());
        }
        Tensor3 { n1, n2, p, data }
    }

    #[inline]
    pub fn n1(&self) -> usize {
        self.n1
    }

    #[inline]
    pub fn n2(&self) -> usize {
        self.n2
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.p)
    }

    #[inline]
    pub fn slice_len(&self) -> usize {
        self.n1 * self.n2
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(k * self.n1 + i) * self.n2 + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        self.data[(k * self.n1 + i) * self.n2 + j] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Zero-based view of slice `k` as row-major `n1·n2` values.
    #[inline]
    pub fn slice_data(&self, k: usize) -> &[f64] {
        let len = self.slice_len();
        &self.data[k * len..(k + 1) * len]
    }

    #[inline]
    pub fn slice_data_mut(&mut self, k: usize) -> &mut [f64] {
        let len = self.slice_len();
        &mut self.data[k * len..(k + 1) * len]
    }

    /// Iterates frontal slices in order as row-major value blocks.
    pub fn slices(&self) -> std::slice::Chunks<'_, f64> {
        self.data.chunks(self.slice_len())
    }

    /// Copy of frontal slice `k`, numbered `1..=p`.
    pub fn frontal_slice(&self, k: usize) -> Result<Matrix> {
        if k == 0 || k > self.p {
            return Err(Error::Index {
                index: k,
                len: self.p,
            });
        }
        Matrix::from_vec(self.n1, self.n2, self.slice_data(k - 1).to_vec())
    }

    /// Overwrites frontal slice `k` (numbered `1..=p`).
    pub fn set_frontal_slice(&mut self, k: usize, m: &Matrix) -> Result<()> {
        if k == 0 || k > self.p {
            return Err(Error::Index {
                index: k,
                len: self.p,
            });
        }
        if m.shape() != (self.n1, self.n2) {
            return Err(Error::shape(format!(
                "slice is {}×{}, tensor slices are {}×{}",
                m.rows(),
                m.cols(),
                self.n1,
                self.n2
            )));
        }
        self.slice_data_mut(k - 1).copy_from_slice(m.as_slice());
        Ok(())
    }

    /// `result[i, j, k] = self[j, i, k]`.
    pub fn transpose(&self) -> Tensor3 {
        let mut out = Tensor3::zeros(self.n2, self.n1, self.p);
        let (n1, n2) = (self.n1, self.n2);
        out.data
            .chunks_mut(n1 * n2)
            .zip(self.slices())
            .for_each(|(dst, src)| matrix::transpose_into(n1, n2, src, dst));
        out
    }

    /// Sum of the diagonals of all frontal slices.
    pub fn trace(&self) -> Result<f64> {
        if self.n1 != self.n2 {
            return Err(Error::shape(format!(
                "trace needs square slices, got {}×{}",
                self.n1, self.n2
            )));
        }
        let n = self.n1;
        Ok(self
            .slices()
            .map(|s| (0..n).map(|i| s[i * n + i]).sum::<f64>())
            .sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        matrix::norm(&self.data)
    }

    pub fn scale(&self, alpha: f64) -> Tensor3 {
        self.map(|x| alpha * x)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor3 {
        Tensor3 {
            n1: self.n1,
            n2: self.n2,
            p: self.p,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn add(&self, rhs: &Tensor3) -> Result<Tensor3> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Tensor3) -> Result<Tensor3> {
        self.zip_with(rhs, |a, b| a - b)
    }

    /// `alpha·self + beta·rhs`.
    pub fn axpby(&self, alpha: f64, rhs: &Tensor3, beta: f64) -> Result<Tensor3> {
        self.zip_with(rhs, |a, b| alpha * a + beta * b)
    }

    fn zip_with(&self, rhs: &Tensor3, f: impl Fn(f64, f64) -> f64) -> Result<Tensor3> {
        if self.shape() != rhs.shape() {
            return Err(Error::shape(format!(
                "elementwise op on {:?} and {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        Ok(Tensor3 {
            n1: self.n1,
            n2: self.n2,
            p: self.p,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `‖self − rhs‖_F`. Panics on shape mismatch.
    pub fn distance(&self, rhs: &Tensor3) -> f64 {
        assert_eq!(self.shape(), rhs.shape(), "distance between unequal shapes");
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `‖self − rhs‖_F / ‖rhs‖_F`, or the absolute distance when `rhs` is zero.
    pub fn relative_distance(&self, rhs: &Tensor3) -> f64 {
        let d = self.distance(rhs);
        let n = rhs.frobenius_norm();
        if n > 0.0 {
            d / n
        } else {
            d
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Facewise matrix product: slice `k` of the result is `self_k · rhs_k`.
    pub fn facewise_product(&self, rhs: &Tensor3) -> Result<Tensor3> {
        if self.n2 != rhs.n1 || self.p != rhs.p {
            return Err(Error::shape(format!(
                "facewise product of {:?} and {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        let (m, k, n) = (self.n1, self.n2, rhs.n2);
        let mut out = Tensor3::zeros(m, n, self.p);
        out.data
            .par_chunks_mut(m * n)
            .zip(self.data.par_chunks(m * k))
            .zip(rhs.data.par_chunks(k * n))
            .for_each(|((c, a), b)| matrix::gemm(m, k, n, a, b, c));
        Ok(out)
    }

    /// Applies `f` to every frontal slice (zero-based index), in parallel.
    /// Outputs must share one shape; results are assembled in slice order.
    pub fn map_slices<F>(&self, f: F) -> Result<Tensor3>
    where
        F: Fn(usize, Matrix) -> Result<Matrix> + Sync,
    {
        let (n1, n2) = (self.n1, self.n2);
        let out: Vec<Matrix> = self
            .data
            .par_chunks(n1 * n2)
            .enumerate()
            .map(|(k, s)| f(k, Matrix::from_vec(n1, n2, s.to_vec())?))
            .collect::<Result<_>>()?;
        Tensor3::from_slices(&out)
    }

    /// Mean over frontal slices as an `n1 × n2` matrix.
    pub fn mean_slice(&self) -> Matrix {
        let mut acc = vec![0.0; self.slice_len()];
        for s in self.slices() {
            acc.iter_mut().zip(s).for_each(|(a, x)| *a += x);
        }
        let inv = 1.0 / self.p as f64;
        acc.iter_mut().for_each(|a| *a *= inv);
        Matrix::from_vec(self.n1, self.n2, acc).expect("non-empty")
    }
}
