//! The w-product and the tensors built around it.
//!
//! `a ⋆ b = W⁻¹(W(a) Δ W(b))` where `W` is the `L`-level lazy wavelet
//! transform along mode 3 and `Δ` multiplies matching wavelet-domain slices.
//! Every operation takes `L` explicitly; two tensors only combine at the
//! same level count.

use crate::error::{BlockTag, Error, Result};
use crate::lifting::{forward_w, inverse_w, WaveletPyramid};
use crate::matrix::Matrix;
use crate::tensor::Tensor3;

/// A validated pair of conformable pyramids ready for a face product.
#[derive(Debug, Clone, Copy)]
pub struct FaceProductPlan<'a> {
    left: &'a WaveletPyramid,
    right: &'a WaveletPyramid,
}

impl<'a> FaceProductPlan<'a> {
    pub fn new(left: &'a WaveletPyramid, right: &'a WaveletPyramid) -> Result<Self> {
        if left.p() != right.p() || left.levels() != right.levels() {
            return Err(Error::shape(format!(
                "pyramids differ: p {} vs {}, L {} vs {}",
                left.p(),
                right.p(),
                left.levels(),
                right.levels()
            )));
        }
        if left.n2() != right.n1() {
            return Err(Error::shape(format!(
                "inner dimensions differ: {} vs {}",
                left.n2(),
                right.n1()
            )));
        }
        Ok(FaceProductPlan { left, right })
    }

    /// Output shape `(n1, n3, p)`.
    pub fn output_shape(&self) -> (usize, usize, usize) {
        (self.left.n1(), self.right.n2(), self.left.p())
    }

    pub fn execute(&self) -> WaveletPyramid {
        let mult = |tag: BlockTag| {
            self.left
                .block(tag)
                .facewise_product(self.right.block(tag))
                .expect("plan validated shapes")
        };
        let smooth = mult(BlockTag::Smooth);
        let details = (1..=self.left.levels())
            .map(|j| mult(BlockTag::Detail(j)))
            .collect();
        WaveletPyramid::from_parts(smooth, details).expect("plan validated shapes")
    }
}

/// Multiplies matching slices of every smooth and detail block.
pub fn face_product(a: &WaveletPyramid, b: &WaveletPyramid) -> Result<WaveletPyramid> {
    Ok(FaceProductPlan::new(a, b)?.execute())
}

/// `a ⋆_w b` for `a: n1×n2×p`, `b: n2×n3×p` with `2^levels | p`.
pub fn w_product(a: &Tensor3, b: &Tensor3, levels: usize) -> Result<Tensor3> {
    if a.n2() != b.n1() || a.p() != b.p() {
        return Err(Error::shape(format!(
            "w-product of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let wa = forward_w(a, levels)?;
    let wb = forward_w(b, levels)?;
    inverse_w(&face_product(&wa, &wb)?)
}

/// Left-to-right w-product of a chain of conformable tensors.
pub fn w_product_chain(factors: &[&Tensor3], levels: usize) -> Result<Tensor3> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::shape("empty product chain"))?;
    rest.iter()
        .try_fold((*first).clone(), |acc, t| w_product(&acc, t, levels))
}

/// Chain product that multiplies only the coarsest blocks (`s_L`, `d_L`)
/// and leaves every finer detail block of the result zero.
///
/// Equals [`w_product_chain`] whenever some factor has no finer detail
/// content, e.g. a slice-constant operator or the output of
/// [`sp_pinv_w`](crate::decomposition::sp_pinv_w); the finer face products
/// are then known to vanish and are skipped. The whole chain stays in the
/// wavelet domain, so there is one inverse transform at the end.
pub fn sp_w_product_chain(factors: &[&Tensor3], levels: usize) -> Result<Tensor3> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::shape("empty product chain"))?;
    let coarse = |t: &Tensor3| -> Result<(Tensor3, Tensor3)> {
        let (s, mut details) = forward_w(t, levels)?.into_parts();
        Ok((s, details.pop().expect("at least one level")))
    };
    let (mut s, mut d) = coarse(first)?;
    let mut shape = first.shape();
    for t in rest {
        if shape.1 != t.n1() || shape.2 != t.p() {
            return Err(Error::shape(format!(
                "w-product of {:?} and {:?}",
                shape,
                t.shape()
            )));
        }
        let (ts, td) = coarse(t)?;
        s = s.facewise_product(&ts)?;
        d = d.facewise_product(&td)?;
        shape = (shape.0, t.n2(), shape.2);
    }
    let (n1, n2, p) = shape;
    let finer = (1..levels).map(|j| Tensor3::zeros(n1, n2, p >> j));
    let details = finer.chain(std::iter::once(d)).collect();
    inverse_w(&WaveletPyramid::from_parts(s, details)?)
}

/// The tensor whose every wavelet-domain slice is `I_n`.
pub fn identity_tensor(n: usize, p: usize, levels: usize) -> Result<Tensor3> {
    inverse_w(&WaveletPyramid::constant(&Matrix::identity(n), p, levels)?)
}

/// w-product inverse: every wavelet-domain slice is inverted by LU.
///
/// Fails with [`Error::SingularSlice`] naming the first singular slice; no
/// regularization is attempted.
pub fn inverse_tensor(a: &Tensor3, levels: usize) -> Result<Tensor3> {
    if a.n1() != a.n2() {
        return Err(Error::shape(format!(
            "inverse needs square slices, got {}×{}",
            a.n1(),
            a.n2()
        )));
    }
    let pyr = forward_w(a, levels)?;
    let inv = pyr.map_slices(|block, k, m| {
        m.inverse().map_err(|s| Error::SingularSlice {
            block,
            slice: k + 1,
            condition: s.condition,
        })
    })?;
    inverse_w(&inv)
}

/// Tensor whose every wavelet-domain slice is the orthogonal matrix `q`.
pub fn orthogonal_tensor(q: &Matrix, p: usize, levels: usize) -> Result<Tensor3> {
    if q.rows() != q.cols() {
        return Err(Error::shape(format!(
            "orthogonal block must be square, got {}×{}",
            q.rows(),
            q.cols()
        )));
    }
    let deviation = q.orthogonality_defect();
    if deviation > 1e-12 {
        return Err(Error::Orthogonality { deviation });
    }
    inverse_w(&WaveletPyramid::constant(q, p, levels)?)
}
