//! Reference tensor products along the third mode: the t-product (DFT),
//! the m-product (any invertible real matrix), their SVD variants, and the
//! closed-form operation counts used to compare them with the w-product.

mod opcount;
mod spectrum;
mod transform;

pub use opcount::{op_count, svd_op_count, OpCountReport, ProductKind, SvdKind};
pub use transform::{m_identity, m_product, ModeTransform};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tensor::Tensor3;
use spectrum::{complex_gemm, complex_pinv, complex_truncate, Spectrum};

/// Imaginary residue above this fraction of the result norm is reported.
const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// The t-product identity: first frontal slice `I_n`, the rest zero.
pub fn t_identity(n: usize, p: usize) -> Tensor3 {
    let mut t = Tensor3::zeros(n, n, p);
    for i in 0..n {
        t.set(i, i, 0, 1.0);
    }
    t
}

/// `a ⋆_t b`: DFT along mode 3, facewise complex products, inverse DFT.
///
/// Only bins `0..=p/2` are multiplied; the rest follow by conjugate
/// symmetry since both operands are real.
pub fn t_product(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let (out, _) = t_product_with_residue(a, b)?;
    Ok(out)
}

/// [`t_product`] plus the largest imaginary magnitude dropped by the
/// final inverse DFT.
pub fn t_product_with_residue(a: &Tensor3, b: &Tensor3) -> Result<(Tensor3, f64)> {
    let (n1, n2, p) = a.shape();
    let (m2, n3, q) = b.shape();
    if n2 != m2 || p != q {
        return Err(Error::shape(format!(
            "t-product of {n1}×{n2}×{p} and {m2}×{n3}×{q}"
        )));
    }
    let fa = Spectrum::forward(a, true);
    let fb = Spectrum::forward(b, true);
    let mut fc = Spectrum::zeros(n1, n3, p, true);
    fc.bins_mut()
        .enumerate()
        .for_each_init(Vec::new, |scratch, (k, c)| {
            complex_gemm(n1, n2, n3, fa.bin(k), fb.bin(k), c, scratch);
        });
    let (out, residue) = fc.inverse();
    check_residue("t_product", residue, &out);
    Ok((out, residue))
}

fn check_residue(op: &str, residue: f64, out: &Tensor3) {
    let scale = out.frobenius_norm().max(f64::MIN_POSITIVE);
    if residue > IMAG_RESIDUE_TOL * scale {
        log::warn!("{op}: imaginary residue {residue:e} exceeds tolerance");
    }
}

fn check_rank(a: &Tensor3, rank: usize) -> Result<()> {
    let max = a.n1().min(a.n2());
    if rank == 0 || rank > max {
        return Err(Error::Rank { rank, max });
    }
    Ok(())
}

/// Rank-`rank` t-svd: every DFT-domain slice is truncated by its complex
/// SVD, then transformed back (real part).
pub fn t_svd(a: &Tensor3, rank: usize) -> Result<Tensor3> {
    check_rank(a, rank)?;
    let spectrum = Spectrum::forward(a, false);
    let truncated: Vec<_> = (0..a.p())
        .into_par_iter()
        .map(|k| complex_truncate(&spectrum.bin_matrix(k), rank))
        .collect();
    let mut out = Spectrum::zeros(a.n1(), a.n2(), a.p(), false);
    for (k, m) in truncated.iter().enumerate() {
        out.set_bin_matrix(k, m);
    }
    let (t, residue) = out.inverse();
    check_residue("t_svd", residue, &t);
    Ok(t)
}

/// Moore-Penrose inverse under the t-product: each DFT-domain slice is
/// pseudo-inverted with cutoff `tol · σ_max`.
pub fn t_pinv(a: &Tensor3, tol: f64) -> Result<Tensor3> {
    let spectrum = Spectrum::forward(a, false);
    let inverted: Vec<_> = (0..a.p())
        .into_par_iter()
        .map(|k| complex_pinv(&spectrum.bin_matrix(k), tol))
        .collect();
    let mut out = Spectrum::zeros(a.n2(), a.n1(), a.p(), false);
    for (k, m) in inverted.iter().enumerate() {
        out.set_bin_matrix(k, m);
    }
    let (t, residue) = out.inverse();
    check_residue("t_pinv", residue, &t);
    Ok(t)
}

/// Block-circulant reference: `c_k = Σ_l a_l · b_{(k − l) mod p}`.
/// Quadratic in `p`; used to validate the FFT route.
pub fn t_product_direct(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let (n1, n2, p) = a.shape();
    let (m2, n3, q) = b.shape();
    if n2 != m2 || p != q {
        return Err(Error::shape(format!(
            "t-product of {n1}×{n2}×{p} and {m2}×{n3}×{q}"
        )));
    }
    let mut out = Tensor3::zeros(n1, n3, p);
    for k in 0..p {
        let mut acc = Matrix::zeros(n1, n3);
        for l in 0..p {
            let al = a.frontal_slice(l + 1)?;
            let bl = b.frontal_slice((k + p - l) % p + 1)?;
            let prod = al.matmul(&bl)?;
            for (x, y) in acc.as_mut_slice().iter_mut().zip(prod.as_slice()) {
                *x += y;
            }
        }
        out.set_frontal_slice(k + 1, &acc)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{w_svd, wavelet_distance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tube_identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Tensor3::random_signed(3, 4, 6, &mut rng);
        let c = t_product(&a, &t_identity(4, 6)).unwrap();
        assert!(c.relative_distance(&a) < 1e-14);
        let c = t_product(&t_identity(3, 6), &a).unwrap();
        assert!(c.relative_distance(&a) < 1e-14);
    }

    #[test]
    fn single_slice_is_matrix_product() {
        let a = Tensor3::from_vec(2, 2, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = Tensor3::from_vec(2, 1, 1, vec![5.0, 6.0]).unwrap();
        let c = t_product(&a, &b).unwrap();
        assert!((c.get(0, 0, 0) - 17.0).abs() < 1e-13);
        assert!((c.get(1, 0, 0) - 39.0).abs() < 1e-13);
    }

    #[test]
    fn fft_route_matches_block_circulant_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for p in [1, 2, 3, 4, 5, 7, 8] {
            let a = Tensor3::random_signed(3, 3, p, &mut rng);
            let b = Tensor3::random_signed(3, 2, p, &mut rng);
            let (fast, residue) = t_product_with_residue(&a, &b).unwrap();
            let slow = t_product_direct(&a, &b).unwrap();
            assert!(fast.relative_distance(&slow) < 1e-12, "p = {p}");
            assert!(residue <= 1e-10 * fast.frobenius_norm());
        }
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = Tensor3::zeros(2, 3, 4);
        assert!(matches!(t_product(&a, &a), Err(Error::Shape(_))));
        let b = Tensor3::zeros(3, 2, 5);
        assert!(matches!(t_product(&a, &b), Err(Error::Shape(_))));
    }

    #[test]
    fn full_rank_t_svd_is_lossless() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Tensor3::random(6, 4, 5, &mut rng);
        let r = t_svd(&a, 4).unwrap();
        assert!(r.relative_distance(&a) < 1e-10);
        assert!(matches!(t_svd(&a, 0), Err(Error::Rank { .. })));
        assert!(matches!(t_svd(&a, 5), Err(Error::Rank { .. })));
    }

    #[test]
    fn t_svd_of_slice_constant_tensor_truncates_each_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = Tensor3::random(7, 5, 1, &mut rng).frontal_slice(1).unwrap();
        let a = Tensor3::repeat_slice(&m, 6);
        let r = t_svd(&a, 2).unwrap();
        let expect = Tensor3::repeat_slice(&m.svd().truncated(2), 6);
        assert!(r.relative_distance(&expect) < 1e-10);
    }

    #[test]
    fn t_svd_and_w_svd_residuals_are_both_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = Tensor3::random(16, 12, 8, &mut rng);
        let t_res = t_svd(&a, 4).unwrap().distance(&a);
        let (_, w) = w_svd(&a, 4, 3).unwrap();
        let w_res = wavelet_distance(&w, &a, 3).unwrap();
        assert!(t_res.is_finite() && w_res.is_finite());
    }

    #[test]
    fn t_pinv_inverts_invertible_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = Tensor3::random_signed(4, 4, 6, &mut rng)
            .axpby(1.0, &t_identity(4, 6), 4.0)
            .unwrap();
        let x = t_pinv(&a, 1e-12).unwrap();
        let prod = t_product(&a, &x).unwrap();
        assert!(prod.relative_distance(&t_identity(4, 6)) < 1e-10);
    }
}
