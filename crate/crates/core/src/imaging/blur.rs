use serde::Serialize;

use crate::algebra::{sp_w_product_chain, w_product_chain};
use crate::baselines::{t_pinv, t_product};
use crate::decomposition::{pinv_w, sp_pinv_w, DEFAULT_PINV_TOL};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tensor::Tensor3;

/// Blur lengths (in pixels) for an `n1 × n2 × p` image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlurSpec {
    pub b_v: usize,
    pub b_h: usize,
    pub n1: usize,
    pub n2: usize,
    pub p: usize,
}

impl BlurSpec {
    pub fn new(b_v: usize, b_h: usize, n1: usize, n2: usize, p: usize) -> Result<Self> {
        if b_v == 0 || b_v > n1 || b_h == 0 || b_h > n2 {
            return Err(Error::Config(format!(
                "blur lengths ({b_v}, {b_h}) must lie in 1..={n1} and 1..={n2}"
            )));
        }
        if p == 0 {
            return Err(Error::Config("image needs at least one band".into()));
        }
        Ok(BlurSpec {
            b_v,
            b_h,
            n1,
            n2,
            p,
        })
    }

    /// Spec matching an image's shape.
    pub fn for_image(x: &Tensor3, b_v: usize, b_h: usize) -> Result<Self> {
        BlurSpec::new(b_v, b_h, x.n1(), x.n2(), x.p())
    }
}

fn taps(b: usize, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i < b {
                (b - i) as f64 / (3 * b) as f64
            } else {
                0.0
            }
        })
        .collect()
}

/// Tap vectors `c(i) = (b − i) / (3b)` for `i < b`, zero beyond.
pub fn blur_vectors(spec: &BlurSpec) -> (Vec<f64>, Vec<f64>) {
    (taps(spec.b_v, spec.n1), taps(spec.b_h, spec.n2))
}

/// Symmetric Toeplitz matrix with entries `c(|i − j|)`.
pub fn toeplitz(c: &[f64]) -> Matrix {
    let n = c.len();
    Matrix::from_fn(n, n, |i, j| c[i.abs_diff(j)])
}

/// Vertical and horizontal operator tensors; every frontal slice is the
/// same Toeplitz matrix, so all their wavelet detail blocks vanish.
pub fn blur_operator(spec: &BlurSpec) -> (Tensor3, Tensor3) {
    let (c_v, c_h) = blur_vectors(spec);
    (
        Tensor3::repeat_slice(&toeplitz(&c_v), spec.p),
        Tensor3::repeat_slice(&toeplitz(&c_h), spec.p),
    )
}

/// `A_V ⋆ x ⋆ A_Hᵀ` under the w-product.
pub fn blur(x: &Tensor3, a_v: &Tensor3, a_h: &Tensor3, levels: usize) -> Result<Tensor3> {
    w_product_chain(&[a_v, x, &a_h.transpose()], levels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeblurMethod {
    /// Full pseudo-inverse under the w-product.
    W,
    /// Pseudo-inverse of the coarsest smooth/detail blocks only.
    Spw,
    /// Pseudo-inverse and products under the t-product.
    T,
}

impl std::str::FromStr for DeblurMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w" => Ok(DeblurMethod::W),
            "spw" => Ok(DeblurMethod::Spw),
            "t" => Ok(DeblurMethod::T),
            other => Err(Error::Config(format!("unknown deblur method '{other}'"))),
        }
    }
}

impl std::fmt::Display for DeblurMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            DeblurMethod::W => "w",
            DeblurMethod::Spw => "spw",
            DeblurMethod::T => "t",
        })
    }
}

/// Least-squares deblur `A_V† ⋆ b ⋆ (A_Hᵀ)†` under the chosen product.
/// `levels` is ignored by [`DeblurMethod::T`].
pub fn deblur(
    b: &Tensor3,
    a_v: &Tensor3,
    a_h: &Tensor3,
    levels: usize,
    method: DeblurMethod,
) -> Result<Tensor3> {
    if a_v.n2() != b.n1() || a_h.n2() != b.n2() || a_v.p() != b.p() || a_h.p() != b.p() {
        return Err(Error::shape(format!(
            "operators {:?} and {:?} do not fit image {:?}",
            a_v.shape(),
            a_h.shape(),
            b.shape()
        )));
    }
    let a_ht = a_h.transpose();
    match method {
        DeblurMethod::W => {
            let left = pinv_w(a_v, levels, DEFAULT_PINV_TOL)?;
            let right = pinv_w(&a_ht, levels, DEFAULT_PINV_TOL)?;
            w_product_chain(&[&left, b, &right], levels)
        }
        DeblurMethod::Spw => {
            let left = sp_pinv_w(a_v, levels, DEFAULT_PINV_TOL)?;
            let right = sp_pinv_w(&a_ht, levels, DEFAULT_PINV_TOL)?;
            sp_w_product_chain(&[&left, b, &right], levels)
        }
        DeblurMethod::T => {
            let left = t_pinv(a_v, DEFAULT_PINV_TOL)?;
            let right = t_pinv(&a_ht, DEFAULT_PINV_TOL)?;
            t_product(&t_product(&left, b)?, &right)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::forward_w;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(b_v: usize, b_h: usize, n1: usize, n2: usize, p: usize) -> BlurSpec {
        BlurSpec::new(b_v, b_h, n1, n2, p).unwrap()
    }

    /// Per-band reference: `A_v · x_k · A_hᵀ`.
    fn per_band(x: &Tensor3, a_v: &Matrix, a_h: &Matrix) -> Tensor3 {
        x.map_slices(|_, m| a_v.matmul(&m)?.matmul(&a_h.transpose()))
            .unwrap()
    }

    /// Replaces every group of `2^levels` consecutive bands by its mean.
    fn group_mean(x: &Tensor3, levels: usize) -> Tensor3 {
        let g = 1 << levels;
        let mut out = x.clone();
        for start in (0..x.p()).step_by(g) {
            let mut mean = vec![0.0; x.slice_len()];
            for k in start..start + g {
                for (m, v) in mean.iter_mut().zip(x.slice_data(k)) {
                    *m += v / g as f64;
                }
            }
            for k in start..start + g {
                out.slice_data_mut(k).copy_from_slice(&mean);
            }
        }
        out
    }

    #[test]
    fn tap_vectors() {
        let (c_v, c_h) = blur_vectors(&spec(10, 3, 12, 5, 1));
        assert!((c_v[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((c_v[1] - 0.3).abs() < 1e-15);
        assert!((c_v[9] - 1.0 / 30.0).abs() < 1e-15);
        assert_eq!(c_v[10], 0.0);
        let expect = [1.0 / 3.0, 2.0 / 9.0, 1.0 / 9.0, 0.0, 0.0];
        for (c, e) in c_h.iter().zip(expect) {
            assert!((c - e).abs() < 1e-15);
        }
        let (c_v, _) = blur_vectors(&spec(1, 1, 4, 4, 1));
        assert_eq!(c_v, vec![1.0 / 3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn toeplitz_small_case() {
        let (a_v, _) = blur_operator(&spec(2, 1, 4, 3, 2));
        let s = a_v.frontal_slice(2).unwrap();
        let expect = toeplitz(&[1.0 / 3.0, 1.0 / 6.0, 0.0, 0.0]);
        assert_eq!(s, expect);
        assert_eq!(s.get(0, 1), 1.0 / 6.0);
        assert_eq!(s.get(0, 2), 0.0);
    }

    #[test]
    fn spec_rejects_oversized_blur() {
        assert!(BlurSpec::new(0, 1, 4, 4, 2).is_err());
        assert!(BlurSpec::new(5, 1, 4, 4, 2).is_err());
    }

    #[test]
    fn operator_detail_blocks_vanish_bitwise() {
        let (a_v, a_h) = blur_operator(&spec(3, 4, 9, 7, 16));
        for op in [&a_v, &a_h] {
            let pyr = forward_w(op, 4).unwrap();
            for j in 1..=4 {
                assert!(pyr.detail(j).as_slice().iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn blur_acts_per_band_on_group_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Tensor3::random(10, 8, 8, &mut rng);
        let s = spec(3, 2, 10, 8, 8);
        let (a_v, a_h) = blur_operator(&s);
        let (c_v, c_h) = blur_vectors(&s);
        for levels in 1..=3 {
            let got = blur(&x, &a_v, &a_h, levels).unwrap();
            let expect = per_band(&group_mean(&x, levels), &toeplitz(&c_v), &toeplitz(&c_h));
            assert!(got.relative_distance(&expect) < 1e-12, "L = {levels}");
        }
    }

    #[test]
    fn zero_image_stays_zero() {
        let s = spec(3, 3, 6, 6, 4);
        let (a_v, a_h) = blur_operator(&s);
        let b = blur(&Tensor3::zeros(6, 6, 4), &a_v, &a_h, 2).unwrap();
        assert_eq!(b.max_abs(), 0.0);
    }

    #[test]
    fn w_and_sparse_deblur_coincide() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Tensor3::random(12, 10, 8, &mut rng);
        let (a_v, a_h) = blur_operator(&BlurSpec::for_image(&x, 3, 3).unwrap());
        let b = blur(&x, &a_v, &a_h, 3).unwrap();
        let w = deblur(&b, &a_v, &a_h, 3, DeblurMethod::W).unwrap();
        let spw = deblur(&b, &a_v, &a_h, 3, DeblurMethod::Spw).unwrap();
        assert!(w.distance(&spw) <= 1e-12 * w.frobenius_norm());
    }

    #[test]
    fn deblur_recovers_group_constant_images() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = group_mean(&Tensor3::random(12, 10, 8, &mut rng), 2);
        let (a_v, a_h) = blur_operator(&BlurSpec::for_image(&x, 3, 3).unwrap());
        let b = blur(&x, &a_v, &a_h, 2).unwrap();
        for method in [DeblurMethod::W, DeblurMethod::Spw] {
            let r = deblur(&b, &a_v, &a_h, 2, method).unwrap();
            assert!(r.relative_distance(&x) < 1e-10, "{method}");
        }
    }

    #[test]
    fn deblur_rejects_mismatched_operators() {
        let (a_v, a_h) = blur_operator(&spec(1, 1, 4, 4, 2));
        let b = Tensor3::zeros(5, 4, 2);
        assert!(matches!(
            deblur(&b, &a_v, &a_h, 1, DeblurMethod::W),
            Err(Error::Shape(_))
        ));
    }
}
