//! Lazy lifting-scheme wavelet transform along the third mode.
//!
//! One level splits the slices of `s_{j-1}` into odd positions (1, 3, 5, …
//! counting from one) and even positions (2, 4, 6, …) and lifts them with
//! predict `P = I` and update `U = ½I`:
//!
//! ```text
//! d_j[k] = s_{j-1}[2k-1] - s_{j-1}[2k]
//! s_j[k] = s_{j-1}[2k]   + d_j[k] / 2
//! ```
//!
//! In zero-based storage the "odd" slice `2k-1` is index `2k` and the "even"
//! slice `2k` is index `2k+1`.

use rayon::prelude::*;

use crate::chunks::{chunk_starts, RawBlock, CHUNK};
use crate::error::{BlockTag, Error, Result};
use crate::matrix::Matrix;
use crate::tensor::Tensor3;

/// Multilevel lazy-wavelet coefficients of a tensor: one smooth block
/// `s_L` and detail blocks `d_1 … d_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    smooth: Tensor3,
    /// `details[j - 1]` holds `d_j`; level 1 is the finest.
    details: Vec<Tensor3>,
}

/// Largest `L` with `2^L | p`.
pub fn max_levels(p: usize) -> usize {
    assert!(p >= 1, "p must be positive");
    p.trailing_zeros() as usize
}

pub(crate) fn check_levels(p: usize, levels: usize) -> Result<()> {
    if levels == 0 || levels > max_levels(p) {
        return Err(Error::Level { levels, p });
    }
    Ok(())
}

/// Forward transform with `levels` lifting steps.
pub fn forward_w(t: &Tensor3, levels: usize) -> Result<WaveletPyramid> {
    check_levels(t.p(), levels)?;
    let (n1, n2, p) = t.shape();
    let len = n1 * n2;
    let mut smooth = Tensor3::zeros(n1, n2, p >> levels);
    let mut details: Vec<Tensor3> = (1..=levels)
        .map(|j| Tensor3::zeros(n1, n2, p >> j))
        .collect();
    let s_out = RawBlock::new(&mut smooth);
    let d_out: Vec<RawBlock> = details.iter_mut().map(RawBlock::new).collect();
    let src = t.as_slice();

    chunk_starts(len).into_par_iter().for_each_init(
        || (Vec::new(), Vec::new()),
        |(buf, tmp): &mut (Vec<f64>, Vec<f64>), x0| {
            let w = CHUNK.min(len - x0);
            buf.clear();
            for k in 0..p {
                buf.extend_from_slice(&src[k * len + x0..k * len + x0 + w]);
            }
            tmp.resize(p * w, 0.0);
            let mut cur = p;
            for d_block in &d_out {
                let half = cur / 2;
                for k in 0..half {
                    let odd = &buf[2 * k * w..(2 * k + 1) * w];
                    let even = &buf[(2 * k + 1) * w..(2 * k + 2) * w];
                    // SAFETY: this chunk owns positions x0..x0+w of every slice.
                    let d = unsafe { d_block.run(k * len + x0, w) };
                    let s = &mut tmp[k * w..(k + 1) * w];
                    for i in 0..w {
                        d[i] = odd[i] - even[i];
                        s[i] = even[i] + d[i] / 2.0;
                    }
                }
                std::mem::swap(buf, tmp);
                cur = half;
            }
            for k in 0..cur {
                // SAFETY: as above.
                unsafe { s_out.run(k * len + x0, w) }.copy_from_slice(&buf[k * w..(k + 1) * w]);
            }
        },
    );
    Ok(WaveletPyramid { smooth, details })
}

/// Inverse transform; reproduces the input of [`forward_w`] up to rounding.
pub fn inverse_w(pyr: &WaveletPyramid) -> Result<Tensor3> {
    pyr.validate()?;
    let (n1, n2, m) = pyr.smooth.shape();
    let p = m << pyr.details.len();
    let len = n1 * n2;
    let mut out = Tensor3::zeros(n1, n2, p);
    let dst = RawBlock::new(&mut out);
    let smooth = pyr.smooth.as_slice();

    chunk_starts(len).into_par_iter().for_each_init(
        || (Vec::new(), Vec::new()),
        |(buf, tmp): &mut (Vec<f64>, Vec<f64>), x0| {
            let w = CHUNK.min(len - x0);
            buf.clear();
            for k in 0..m {
                buf.extend_from_slice(&smooth[k * len + x0..k * len + x0 + w]);
            }
            buf.resize(p * w, 0.0);
            tmp.resize(p * w, 0.0);
            let mut cur = m;
            for d_block in pyr.details.iter().rev() {
                let d_all = d_block.as_slice();
                for k in 0..cur {
                    let s = &buf[k * w..(k + 1) * w];
                    let d = &d_all[k * len + x0..k * len + x0 + w];
                    let (odd, even) = tmp[2 * k * w..(2 * k + 2) * w].split_at_mut(w);
                    for i in 0..w {
                        even[i] = s[i] - d[i] / 2.0;
                        odd[i] = d[i] + even[i];
                    }
                }
                std::mem::swap(buf, tmp);
                cur *= 2;
            }
            for k in 0..p {
                // SAFETY: this chunk owns positions x0..x0+w of every slice.
                unsafe { dst.run(k * len + x0, w) }.copy_from_slice(&buf[k * w..(k + 1) * w]);
            }
        },
    );
    Ok(out)
}

impl WaveletPyramid {
    /// Assembles a pyramid from a smooth block and details ordered `d_1 … d_L`.
    pub fn from_parts(smooth: Tensor3, details: Vec<Tensor3>) -> Result<Self> {
        let pyr = WaveletPyramid { smooth, details };
        pyr.validate()?;
        Ok(pyr)
    }

    /// The smooth block and the detail blocks `d_1, …, d_L`.
    pub fn into_parts(self) -> (Tensor3, Vec<Tensor3>) {
        (self.smooth, self.details)
    }

    /// Pyramid for an `n1 × n2 × p` tensor whose every smooth and detail
    /// slice is `block`.
    pub fn constant(block: &Matrix, p: usize, levels: usize) -> Result<Self> {
        check_levels(p, levels)?;
        let details = (1..=levels)
            .map(|j| Tensor3::repeat_slice(block, p >> j))
            .collect();
        let smooth = Tensor3::repeat_slice(block, p >> levels);
        Ok(WaveletPyramid { smooth, details })
    }

    fn validate(&self) -> Result<()> {
        let (n1, n2, m) = self.smooth.shape();
        let levels = self.details.len();
        if levels == 0 {
            return Err(Error::shape("pyramid has no detail levels"));
        }
        for (idx, d) in self.details.iter().enumerate() {
            let j = idx + 1;
            let expected = m << (levels - j);
            if d.shape() != (n1, n2, expected) {
                return Err(Error::shape(format!(
                    "detail level {j} is {:?}, expected {n1}×{n2}×{expected}",
                    d.shape()
                )));
            }
        }
        Ok(())
    }

    pub fn n1(&self) -> usize {
        self.smooth.n1()
    }

    pub fn n2(&self) -> usize {
        self.smooth.n2()
    }

    /// Slice count of the spatial tensor, `2^L · m`.
    pub fn p(&self) -> usize {
        self.m() << self.levels()
    }

    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Slices in the coarsest smooth block.
    pub fn m(&self) -> usize {
        self.smooth.p()
    }

    pub fn smooth(&self) -> &Tensor3 {
        &self.smooth
    }

    /// Detail block `d_j`, `j` in `1..=L`.
    pub fn detail(&self, j: usize) -> &Tensor3 {
        &self.details[j - 1]
    }

    pub fn block(&self, tag: BlockTag) -> &Tensor3 {
        match tag {
            BlockTag::Smooth => &self.smooth,
            BlockTag::Detail(j) => self.detail(j),
        }
    }

    pub fn block_mut(&mut self, tag: BlockTag) -> &mut Tensor3 {
        match tag {
            BlockTag::Smooth => &mut self.smooth,
            BlockTag::Detail(j) => &mut self.details[j - 1],
        }
    }

    /// Block tags in storage order: `s_L, d_L, d_{L-1}, …, d_1`.
    pub fn tags(&self) -> Vec<BlockTag> {
        std::iter::once(BlockTag::Smooth)
            .chain((1..=self.levels()).rev().map(BlockTag::Detail))
            .collect()
    }

    pub fn blocks(&self) -> impl Iterator<Item = (BlockTag, &Tensor3)> + '_ {
        self.tags().into_iter().map(move |t| (t, self.block(t)))
    }

    /// Applies `f` to every wavelet-domain slice (zero-based slice index
    /// within its block). All outputs must share one shape.
    pub fn map_slices<F>(&self, f: F) -> Result<WaveletPyramid>
    where
        F: Fn(BlockTag, usize, Matrix) -> Result<Matrix> + Sync,
    {
        let map_block =
            |tag: BlockTag| -> Result<Tensor3> { self.block(tag).map_slices(|k, m| f(tag, k, m)) };
        let smooth = map_block(BlockTag::Smooth)?;
        let details = (1..=self.levels())
            .map(|j| map_block(BlockTag::Detail(j)))
            .collect::<Result<Vec<_>>>()?;
        WaveletPyramid::from_parts(smooth, details)
    }

    /// Blockwise transpose of every slice.
    pub fn transpose(&self) -> WaveletPyramid {
        WaveletPyramid {
            smooth: self.smooth.transpose(),
            details: self.details.iter().map(Tensor3::transpose).collect(),
        }
    }

    /// `alpha·self + beta·rhs`, blockwise.
    pub fn axpby(&self, alpha: f64, rhs: &WaveletPyramid, beta: f64) -> Result<WaveletPyramid> {
        if self.levels() != rhs.levels() {
            return Err(Error::shape("pyramids have different level counts"));
        }
        let smooth = self.smooth.axpby(alpha, &rhs.smooth, beta)?;
        let details = self
            .details
            .iter()
            .zip(&rhs.details)
            .map(|(a, b)| a.axpby(alpha, b, beta))
            .collect::<Result<Vec<_>>>()?;
        Ok(WaveletPyramid { smooth, details })
    }

    /// Total squared Frobenius norm of all coefficients.
    pub fn energy(&self) -> f64 {
        self.blocks().map(|(_, b)| b.frobenius_norm().powi(2)).sum()
    }

    /// Squared norm of the detail blocks `d_1 … d_{L-1}` (every level
    /// except the coarsest).
    pub fn finer_detail_energy(&self) -> f64 {
        self.details[..self.levels() - 1]
            .iter()
            .map(|d| d.frobenius_norm().powi(2))
            .sum()
    }

    /// Frobenius distance between two pyramids of equal shape, over all
    /// coefficients.
    pub fn distance(&self, rhs: &WaveletPyramid) -> f64 {
        self.blocks()
            .zip(rhs.blocks())
            .map(|((_, a), (_, b))| a.distance(b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Replaces every detail block finer than `d_L` with zeros.
    pub fn zero_finer_details(&mut self) {
        let levels = self.levels();
        for d in &mut self.details[..levels - 1] {
            d.as_mut_slice().fill(0.0);
        }
    }
}
