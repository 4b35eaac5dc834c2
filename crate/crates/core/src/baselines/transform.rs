use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};
use crate::tensor::Tensor3;

use super::t_product;

/// The transform applied along the third mode by [`m_product`].
#[derive(Debug, Clone)]
pub enum ModeTransform {
    /// The DFT; `m_product` then coincides with the t-product.
    Dft,
    /// An invertible real `p × p` matrix together with its inverse.
    Matrix { forward: Matrix, inverse: Matrix },
}

impl ModeTransform {
    /// Wraps `m`, computing and checking its inverse (`‖M·M⁻¹ − I‖ ≤ 1e-10`).
    pub fn matrix(m: Matrix) -> Result<Self> {
        let (p, q) = m.shape();
        if p != q {
            return Err(Error::shape(format!(
                "mode transform must be square, got {p}×{q}"
            )));
        }
        let inverse = m.inverse().map_err(|e| {
            Error::Config(format!(
                "mode transform is singular (condition {:e})",
                e.condition
            ))
        })?;
        let defect = m
            .matmul(&inverse)?
            .sub(&Matrix::identity(p))
            .frobenius_norm();
        if defect > 1e-10 {
            return Err(Error::Config(format!(
                "mode transform inverse is inaccurate ({defect:e})"
            )));
        }
        Ok(ModeTransform::Matrix {
            forward: m,
            inverse,
        })
    }

    /// Orthonormal DCT-II of length `p`; the default m-product transform.
    pub fn dct(p: usize) -> Self {
        let m = Matrix::from_fn(p, p, |k, l| {
            let scale = if k == 0 {
                (1.0 / p as f64).sqrt()
            } else {
                (2.0 / p as f64).sqrt()
            };
            scale * (PI * (2 * l + 1) as f64 * k as f64 / (2 * p) as f64).cos()
        });
        let inverse = m.transpose();
        ModeTransform::Matrix {
            forward: m,
            inverse,
        }
    }

    pub fn identity(p: usize) -> Self {
        ModeTransform::Matrix {
            forward: Matrix::identity(p),
            inverse: Matrix::identity(p),
        }
    }
}

/// Applies `m` along mode 3: slice `k` of the result is `Σ_l m[k, l] · t_l`.
fn apply_mode3(m: &Matrix, t: &Tensor3) -> Result<Tensor3> {
    let p = t.p();
    if m.cols() != p {
        return Err(Error::shape(format!(
            "mode transform of size {} applied to p = {p}",
            m.cols()
        )));
    }
    let len = t.slice_len();
    let mut out = vec![0.0; m.rows() * len];
    // The tensor is row-major p × (n1·n2) when slices are stacked.
    matrix::gemm(m.rows(), p, len, m.as_slice(), t.as_slice(), &mut out);
    Tensor3::from_vec(t.n1(), t.n2(), m.rows(), out)
}

/// `a ⋆_m b`: transform both along mode 3, multiply facewise, invert.
pub fn m_product(a: &Tensor3, b: &Tensor3, t: &ModeTransform) -> Result<Tensor3> {
    match t {
        ModeTransform::Dft => t_product(a, b),
        ModeTransform::Matrix { forward, inverse } => {
            if a.n2() != b.n1() || a.p() != b.p() {
                return Err(Error::shape(format!(
                    "m-product of {:?} and {:?}",
                    a.shape(),
                    b.shape()
                )));
            }
            let fa = apply_mode3(forward, a)?;
            let fb = apply_mode3(forward, b)?;
            apply_mode3(inverse, &fa.facewise_product(&fb)?)
        }
    }
}

/// Identity under `⋆_m`: the inverse transform of all-identity slices.
pub fn m_identity(n: usize, t: &ModeTransform, p: usize) -> Result<Tensor3> {
    match t {
        ModeTransform::Dft => Ok(super::t_identity(n, p)),
        ModeTransform::Matrix { inverse, .. } => {
            apply_mode3(inverse, &Tensor3::repeat_slice(&Matrix::identity(n), p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dct_is_orthonormal() {
        for p in [1, 2, 5, 8, 96] {
            let ModeTransform::Matrix { forward, inverse } = ModeTransform::dct(p) else {
                unreachable!()
            };
            let prod = forward.matmul(&inverse).unwrap();
            assert!(prod.sub(&Matrix::identity(p)).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn identity_transform_gives_facewise_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Tensor3::random_signed(3, 4, 5, &mut rng);
        let b = Tensor3::random_signed(4, 2, 5, &mut rng);
        let c = m_product(&a, &b, &ModeTransform::identity(5)).unwrap();
        assert!(c.relative_distance(&a.facewise_product(&b).unwrap()) < 1e-14);
    }

    #[test]
    fn dct_identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = Tensor3::random_signed(3, 4, 6, &mut rng);
        let t = ModeTransform::dct(6);
        let c = m_product(&a, &m_identity(4, &t, 6).unwrap(), &t).unwrap();
        assert!(c.relative_distance(&a) < 1e-12);
    }

    #[test]
    fn scalar_transform_is_matrix_product() {
        let a = Tensor3::from_vec(1, 2, 1, vec![1.0, 2.0]).unwrap();
        let b = Tensor3::from_vec(2, 1, 1, vec![3.0, 4.0]).unwrap();
        let t = ModeTransform::matrix(Matrix::identity(1)).unwrap();
        assert_eq!(m_product(&a, &b, &t).unwrap().get(0, 0, 0), 11.0);
    }

    #[test]
    fn singular_or_ragged_transforms_are_rejected() {
        assert!(ModeTransform::matrix(Matrix::zeros(3, 3)).is_err());
        assert!(ModeTransform::matrix(Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn dft_kind_matches_t_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Tensor3::random_signed(2, 3, 4, &mut rng);
        let b = Tensor3::random_signed(3, 2, 4, &mut rng);
        let c = m_product(&a, &b, &ModeTransform::Dft).unwrap();
        assert!(c.relative_distance(&t_product(&a, &b).unwrap()) < 1e-14);
    }
}
