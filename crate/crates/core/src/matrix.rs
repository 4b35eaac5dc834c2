//! Dense row-major real matrices: the frontal-slice type.
//!
//! Products go through `matrixmultiply`'s blocked GEMM; the thin SVD is
//! delegated to nalgebra and re-sorted so singular values are descending.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A dense `rows × cols` real matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// One row per line; the formatter's precision (default 4) applies to
/// every entry.
impl std::fmt::Display for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let prec = f.precision().unwrap_or(4);
        for i in 0..self.rows {
            if i > 0 {
                writeln!(f)?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{:>w$.prec$}", self.get(i, j), w = prec + 6)?;
            }
        }
        Ok(())
    }
}

/// Thin singular value decomposition `m = u · diag(sigma) · vᵀ`.
///
/// `u` is `rows × k`, `v` is `cols × k` with `k = min(rows, cols)`, and
/// `sigma` is sorted in descending order.
#[derive(Debug, Clone)]
pub struct MatrixSvd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

/// Returned by [`Matrix::inverse`] when the matrix is numerically singular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singular {
    /// 1-norm condition estimate; `inf` when an exact zero pivot was hit.
    pub condition: f64,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::shape(format!("empty matrix {rows}×{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} values cannot fill a {rows}×{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Zero-based element access.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
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

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        transpose_into(self.rows, self.cols, &self.data, &mut out.data);
        out
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        gemm(
            self.rows,
            self.cols,
            rhs.cols,
            &self.data,
            &rhs.data,
            &mut out.data,
        );
        Ok(out)
    }

    pub fn scaled(&self, alpha: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| alpha * x).collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape());
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    /// Largest absolute deviation of `selfᵀ·self` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let gram = self.transpose().matmul(self).expect("conformable");
        let mut worst = 0.0f64;
        for i in 0..gram.rows {
            for j in 0..gram.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram.get(i, j) - target).abs());
            }
        }
        worst
    }

    /// Thin SVD. A zero matrix yields zero singular values.
    ///
    /// nalgebra supplies the right singular vectors `V`; the left ones are
    /// read off `m·V`, which keeps the residual at rounding level. When the
    /// columns of `m·V` are not orthogonal to working precision (the
    /// bidiagonal QR alone can be off by ~1e-9), one-sided Jacobi sweeps
    /// polish `V` first.
    pub fn svd(&self) -> MatrixSvd {
        if self.cols > self.rows {
            let t = self.transpose().svd();
            return MatrixSvd {
                u: t.v,
                sigma: t.sigma,
                v: t.u,
            };
        }
        let (m, n) = (self.rows, self.cols);
        if self.data.iter().all(|&x| x == 0.0) {
            return MatrixSvd {
                u: Matrix::from_fn(m, n, |i, j| if i == j { 1.0 } else { 0.0 }),
                sigma: vec![0.0; n],
                v: Matrix::identity(n),
            };
        }
        let dm = DMatrix::from_row_slice(m, n, &self.data);
        let v_t = dm.clone().svd(false, true).v_t.expect("v_t requested");
        // Column-major working copies: w = m·V, and V itself.
        let mut v: Vec<f64> = (0..n * n).map(|x| v_t[(x / n, x % n)]).collect();
        let mut w = vec![0.0; m * n];
        let prod = &dm * v_t.transpose();
        for c in 0..n {
            for i in 0..m {
                w[c * m + i] = prod[(i, c)];
            }
        }
        if !columns_orthogonal(&w, m, n) {
            jacobi_sweeps(&mut w, m, &mut v, n);
        }

        let norms: Vec<f64> = (0..n).map(|c| norm(&w[c * m..(c + 1) * m])).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
        let smax = norms.iter().copied().fold(0.0, f64::max);
        let floor = smax * f64::EPSILON * (m.max(n) as f64);

        let sigma: Vec<f64> = order.iter().map(|&c| norms[c]).collect();
        let mut u = Matrix::zeros(m, n);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut next_unit = 0;
        for (c, &src) in order.iter().enumerate() {
            let col = &w[src * m..(src + 1) * m];
            let mut q: Vec<f64> = if norms[src] > floor {
                col.iter().map(|x| x / norms[src]).collect()
            } else {
                Vec::new()
            };
            if q.is_empty() || !orthonormalize(&mut q, &basis) {
                q = complete_basis(m, &basis, &mut next_unit);
            }
            for i in 0..m {
                u.data[i * n + c] = q[i];
            }
            basis.push(q);
        }
        let v = Matrix::from_fn(n, n, |i, c| v[order[c] * n + i]);
        MatrixSvd { u, sigma, v }
    }

    /// Moore-Penrose pseudo-inverse; singular values at or below
    /// `tol · σ_max` are treated as zero.
    pub fn pinv(&self, tol: f64) -> Matrix {
        self.svd().pinv(tol)
    }

    /// Inverse by LU with partial pivoting.
    ///
    /// Fails when a pivot vanishes or the 1-norm condition number exceeds
    /// `1/ε`; no regularization is applied.
    pub fn inverse(&self) -> std::result::Result<Matrix, Singular> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for col in 0..n {
            let (pivot_row, pivot_abs) =
                (col..n)
                    .map(|r| (r, lu[r * n + col].abs()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs == 0.0 || !pivot_abs.is_finite() {
                return Err(Singular {
                    condition: f64::INFINITY,
                });
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot_row * n + j);
                }
                perm.swap(col, pivot_row);
            }
            let pivot = lu[col * n + col];
            for r in col + 1..n {
                let factor = lu[r * n + col] / pivot;
                lu[r * n + col] = factor;
                if factor != 0.0 {
                    for j in col + 1..n {
                        lu[r * n + j] -= factor * lu[col * n + j];
                    }
                }
            }
        }

        // Solve L U X = P I column by column.
        let mut inv = Matrix::zeros(n, n);
        let mut x = vec![0.0; n];
        for c in 0..n {
            for i in 0..n {
                let mut acc = if perm[i] == c { 1.0 } else { 0.0 };
                for k in 0..i {
                    acc -= lu[i * n + k] * x[k];
                }
                x[i] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = x[i];
                for k in i + 1..n {
                    acc -= lu[i * n + k] * x[k];
                }
                x[i] = acc / lu[i * n + i];
            }
            for i in 0..n {
                inv.data[i * n + c] = x[i];
            }
        }

        let condition = self.norm_one() * inv.norm_one();
        if !condition.is_finite() || condition * f64::EPSILON > 1.0 {
            return Err(Singular { condition });
        }
        Ok(inv)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j) == 0.0))
    }
}

impl MatrixSvd {
    /// Rank-`r` reconstruction `u[:, :r] · diag(sigma[:r]) · v[:, :r]ᵀ`.
    pub fn truncated(&self, r: usize) -> Matrix {
        let r = r.min(self.sigma.len());
        let (m, n) = (self.u.rows, self.v.rows);
        let mut us = Matrix::zeros(m, r);
        for i in 0..m {
            for c in 0..r {
                us.data[i * r + c] = self.u.get(i, c) * self.sigma[c];
            }
        }
        let mut out = Matrix::zeros(m, n);
        gemm_nt(
            m,
            r,
            n,
            &us.data,
            r,
            &self.v.data,
            self.v.cols,
            &mut out.data,
        );
        out
    }

    pub fn pinv(&self, tol: f64) -> Matrix {
        let (m, n) = (self.u.rows, self.v.rows);
        let smax = self.sigma.first().copied().unwrap_or(0.0);
        let cutoff = tol * smax;
        let kept: Vec<usize> = (0..self.sigma.len())
            .filter(|&i| smax > 0.0 && self.sigma[i] > cutoff)
            .collect();
        let r = kept.len();
        let mut out = Matrix::zeros(n, m);
        if r == 0 {
            return out;
        }
        // V_r · diag(1/σ) · U_rᵀ
        let mut vs = Matrix::zeros(n, r);
        for i in 0..n {
            for (c, &idx) in kept.iter().enumerate() {
                vs.data[i * r + c] = self.v.get(i, idx) / self.sigma[idx];
            }
        }
        let mut ur = Matrix::zeros(m, r);
        for i in 0..m {
            for (c, &idx) in kept.iter().enumerate() {
                ur.data[i * r + c] = self.u.get(i, idx);
            }
        }
        gemm_nt(n, r, m, &vs.data, r, &ur.data, r, &mut out.data);
        out
    }
}

/// Whether the nonzero columns of `w` (column-major `m × n`) are mutually
/// orthogonal to 1e-13 relative, checked through one Gram product.
fn columns_orthogonal(w: &[f64], m: usize, n: usize) -> bool {
    let mut gram = vec![0.0; n * n];
    // Column-major w is row-major wᵀ (n × m), so wᵀ·w = wᵀ · (wᵀ)ᵀ.
    gemm_nt(n, m, n, w, m, w, m, &mut gram);
    let diag: Vec<f64> = (0..n).map(|i| gram[i * n + i]).collect();
    let dmax = diag.iter().copied().fold(0.0, f64::max);
    // Normalizing column j leaves an error of about |g_ij| / sqrt(d_i) in
    // direction i, so overlaps are measured against the largest column
    // rather than relative to two possibly tiny ones.
    for i in 0..n {
        for j in i + 1..n {
            let limit = 1e-14 * (dmax * diag[i].max(diag[j])).sqrt();
            if gram[i * n + j].abs() > limit {
                return false;
            }
        }
    }
    true
}

/// One-sided Jacobi on the columns of `w` (column-major `m × n`), applying
/// the same rotations to `v` (column-major `n × n`).
fn jacobi_sweeps(w: &mut [f64], m: usize, v: &mut [f64], n: usize) {
    const MAX_SWEEPS: usize = 30;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (head, tail) = w.split_at_mut(q * m);
                let wp = &mut head[p * m..(p + 1) * m];
                let wq = &mut tail[..m];
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    alpha += wp[i] * wp[i];
                    beta += wq[i] * wq[i];
                    gamma += wp[i] * wq[i];
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (a, b) = (wp[i], wq[i]);
                    wp[i] = c * a - s * b;
                    wq[i] = s * a + c * b;
                }
                let (head, tail) = v.split_at_mut(q * n);
                let vp = &mut head[p * n..(p + 1) * n];
                let vq = &mut tail[..n];
                for i in 0..n {
                    let (a, b) = (vp[i], vq[i]);
                    vp[i] = c * a - s * b;
                    vq[i] = s * a + c * b;
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Gram-Schmidt (twice) of `q` against `basis`; false if `q` collapses.
fn orthonormalize(q: &mut [f64], basis: &[Vec<f64>]) -> bool {
    for _ in 0..2 {
        for b in basis {
            let d: f64 = q.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in q.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
    }
    let nq = norm(q);
    if nq < 0.5 {
        return false;
    }
    q.iter_mut().for_each(|x| *x /= nq);
    true
}

/// A unit vector orthogonal to `basis`, taken from the standard basis.
/// `next` is the first candidate still worth trying: a vector rejected
/// once stays rejected as the basis grows.
fn complete_basis(m: usize, basis: &[Vec<f64>], next: &mut usize) -> Vec<f64> {
    while *next < m {
        let mut q = vec![0.0; m];
        q[*next] = 1.0;
        *next += 1;
        if orthonormalize(&mut q, basis) {
            return q;
        }
    }
    unreachable!("basis of size {} cannot span R^{m}", basis.len())
}

pub(crate) fn norm(values: &[f64]) -> f64 {
    values.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn transpose_into(rows: usize, cols: usize, src: &[f64], dst: &mut [f64]) {
    for i in 0..rows {
        for j in 0..cols {
            dst[j * rows + i] = src[i * cols + j];
        }
    }
}

/// `c = a · b` for row-major `a` (m×k), `b` (k×n), `c` (m×n).
pub(crate) fn gemm(m: usize, k: usize, n: usize, a: &[f64], b: &[f64], c: &mut [f64]) {
    gemm_acc(m, k, n, 1.0, a, b, 0.0, c);
}

/// `c = alpha · a · b + beta · c`, all row-major.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm_acc(
    m: usize,
    k: usize,
    n: usize,
    alpha: f64,
    a: &[f64],
    b: &[f64],
    beta: f64,
    c: &mut [f64],
) {
    debug_assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    // SAFETY: the slices cover the strided extents asserted above.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            k as isize,
            1,
            b.as_ptr(),
            n as isize,
            1,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `c = a · bᵀ` where `a` is m×k (row stride `lda`) and `b` is n×k (row stride `ldb`).
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm_nt(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    lda: usize,
    b: &[f64],
    ldb: usize,
    c: &mut [f64],
) {
    if k == 0 {
        c[..m * n].fill(0.0);
        return;
    }
    debug_assert!(a.len() >= (m - 1) * lda + k && b.len() >= (n - 1) * ldb + k);
    // SAFETY: strided extents are within the slices per the assertion above.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            lda as isize,
            1,
            b.as_ptr(),
            1,
            ldb as isize,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}
