//! Truncated SVDs and the Moore-Penrose inverse under the w-product.
//!
//! Both act slice by slice in the wavelet domain: every smooth and detail
//! slice gets its own matrix SVD (or pseudo-inverse), and the factors are
//! carried back with the inverse transform.
//!
//! The sparse variants (`sp_w_svd`, `sp_pinv_w`) only touch the coarsest
//! smooth block `s_L` and the coarsest detail block `d_L`; finer detail
//! blocks are set to zero. This is exact whenever those finer details
//! vanish, which is the case for slice-constant operators and close to the
//! case for spectrally redundant images.

use serde::Serialize;

use crate::algebra::w_product_chain;
use crate::error::{BlockTag, Error, Result};
use crate::lifting::{forward_w, inverse_w, WaveletPyramid};
use crate::matrix::Matrix;
use crate::tensor::Tensor3;

/// Default relative cutoff for pseudo-inverses: singular values at or below
/// `tol · σ_max` of their slice are treated as zero.
pub const DEFAULT_PINV_TOL: f64 = 1e-12;

/// Finer-detail energy fraction above which [`sp_pinv_w`] warns that the
/// sparse approximation discards significant information.
pub const REDUNDANCY_WARN_RATIO: f64 = 0.01;

/// All singular values of one wavelet-domain slice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceSpectrum {
    pub block: BlockTag,
    /// One-based slice index within the block.
    pub slice: usize,
    /// Descending.
    pub sigma: Vec<f64>,
}

/// Rank-`r` w-svd factors: `a ≈ u ⋆ s ⋆ vᵀ`.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// `n1 × r × p`
    pub u: Tensor3,
    /// `r × r × p`; diagonal in the wavelet domain.
    pub s: Tensor3,
    /// `n2 × r × p`
    pub v: Tensor3,
    pub rank: usize,
    pub levels: usize,
    /// Full spectra of every wavelet-domain slice, in pyramid order
    /// (`s_L`, `d_L`, …, `d_1`).
    pub spectrum: Vec<SliceSpectrum>,
}

/// One singular value dropped by truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscardedValue {
    pub block: BlockTag,
    pub slice: usize,
    /// One-based position in the slice's spectrum.
    pub index: usize,
    pub sigma: f64,
}

/// Frobenius-norm bound on the wavelet-domain truncation error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationBound {
    pub bound: f64,
    pub discarded: Vec<DiscardedValue>,
}

fn check_rank(a: &Tensor3, rank: usize) -> Result<()> {
    let max = a.n1().min(a.n2());
    if rank == 0 || rank > max {
        return Err(Error::Rank { rank, max });
    }
    Ok(())
}

fn take_columns(m: &Matrix, r: usize) -> Matrix {
    Matrix::from_fn(m.rows(), r, |i, j| m.get(i, j))
}

/// Rank-`rank` w-svd. Returns the factors and the reconstruction, which
/// equals `u ⋆ s ⋆ vᵀ`.
pub fn w_svd(a: &Tensor3, rank: usize, levels: usize) -> Result<(SvdFactors, Tensor3)> {
    check_rank(a, rank)?;
    let pyr = forward_w(a, levels)?;

    struct SliceFactors {
        u: Matrix,
        s: Matrix,
        v: Matrix,
        recon: Matrix,
        sigma: Vec<f64>,
    }

    let mut per_block: Vec<(BlockTag, Vec<SliceFactors>)> = Vec::new();
    for tag in pyr.tags() {
        let block = pyr.block(tag);
        let (n1, n2) = (block.n1(), block.n2());
        let factors: Vec<SliceFactors> = {
            use rayon::prelude::*;
            block
                .as_slice()
                .par_chunks(n1 * n2)
                .map(|data| {
                    let m = Matrix::from_vec(n1, n2, data.to_vec()).expect("slice shape");
                    let svd = m.svd();
                    SliceFactors {
                        u: take_columns(&svd.u, rank),
                        s: Matrix::from_diag(&svd.sigma[..rank]),
                        v: take_columns(&svd.v, rank),
                        recon: svd.truncated(rank),
                        sigma: svd.sigma,
                    }
                })
                .collect()
        };
        per_block.push((tag, factors));
    }

    let assemble = |pick: &dyn Fn(&SliceFactors) -> &Matrix| -> Result<WaveletPyramid> {
        let mut smooth = None;
        let mut details = vec![None; levels];
        for (tag, factors) in &per_block {
            let mats: Vec<Matrix> = factors.iter().map(|f| pick(f).clone()).collect();
            let t = Tensor3::from_slices(&mats)?;
            match tag {
                BlockTag::Smooth => smooth = Some(t),
                BlockTag::Detail(j) => details[j - 1] = Some(t),
            }
        }
        WaveletPyramid::from_parts(
            smooth.expect("smooth block"),
            details
                .into_iter()
                .map(|d| d.expect("detail block"))
                .collect(),
        )
    };

    let u = inverse_w(&assemble(&|f| &f.u)?)?;
    let s = inverse_w(&assemble(&|f| &f.s)?)?;
    let v = inverse_w(&assemble(&|f| &f.v)?)?;
    let recon = inverse_w(&assemble(&|f| &f.recon)?)?;

    let spectrum = per_block
        .into_iter()
        .flat_map(|(block, factors)| {
            factors
                .into_iter()
                .enumerate()
                .map(move |(k, f)| SliceSpectrum {
                    block,
                    slice: k + 1,
                    sigma: f.sigma,
                })
        })
        .collect();

    Ok((
        SvdFactors {
            u,
            s,
            v,
            rank,
            levels,
            spectrum,
        },
        recon,
    ))
}

/// `sqrt(Σ_{i>r} σ_i²)` over every slice of every block.
pub fn truncation_bound(spectrum: &[SliceSpectrum], rank: usize) -> TruncationBound {
    let mut discarded = Vec::new();
    let mut acc = 0.0;
    for entry in spectrum {
        for (i, &sigma) in entry.sigma.iter().enumerate().skip(rank) {
            acc += sigma * sigma;
            discarded.push(DiscardedValue {
                block: entry.block,
                slice: entry.slice,
                index: i + 1,
                sigma,
            });
        }
    }
    TruncationBound {
        bound: acc.sqrt(),
        discarded,
    }
}

impl SvdFactors {
    pub fn truncation_bound(&self, rank: usize) -> TruncationBound {
        truncation_bound(&self.spectrum, rank)
    }

    /// `u ⋆ s ⋆ vᵀ`, assembled from the factors.
    pub fn reconstruct(&self) -> Result<Tensor3> {
        w_product_chain(&[&self.u, &self.s, &self.v.transpose()], self.levels)
    }
}

/// Frobenius distance between `a` and `b` measured on their wavelet
/// coefficients.
pub fn wavelet_distance(a: &Tensor3, b: &Tensor3, levels: usize) -> Result<f64> {
    Ok(forward_w(a, levels)?.distance(&forward_w(b, levels)?))
}

/// Rank-`rank` reconstruction from the `s_L` and `d_L` blocks only; finer
/// detail blocks are zeroed.
pub fn sp_w_svd(a: &Tensor3, rank: usize, levels: usize) -> Result<Tensor3> {
    check_rank(a, rank)?;
    let mut pyr = forward_w(a, levels)?;
    pyr.zero_finer_details();
    for tag in [BlockTag::Smooth, BlockTag::Detail(levels)] {
        let truncated = pyr
            .block(tag)
            .map_slices(|_, m| Ok(m.svd().truncated(rank)))?;
        *pyr.block_mut(tag) = truncated;
    }
    inverse_w(&pyr)
}

/// Moore-Penrose inverse: every wavelet-domain slice is pseudo-inverted.
pub fn pinv_w(a: &Tensor3, levels: usize, tol: f64) -> Result<Tensor3> {
    let pyr = forward_w(a, levels)?;
    inverse_w(&pyr.map_slices(|_, _, m| Ok(m.pinv(tol)))?)
}

/// Moore-Penrose inverse assembled as `v ⋆ s† ⋆ uᵀ` from full-rank w-svd
/// factors. Agrees with [`pinv_w`]; kept as an independent route.
pub fn pinv_w_from_factors(a: &Tensor3, levels: usize, tol: f64) -> Result<Tensor3> {
    let rank = a.n1().min(a.n2());
    let (factors, _) = w_svd(a, rank, levels)?;
    let s_pinv = forward_w(&factors.s, levels)?.map_slices(|_, _, m| Ok(m.pinv(tol)))?;
    let s_pinv = inverse_w(&s_pinv)?;
    w_product_chain(&[&factors.v, &s_pinv, &factors.u.transpose()], levels)
}

/// Share of wavelet-domain energy held by detail levels finer than `d_L`.
pub fn finer_detail_ratio(a: &Tensor3, levels: usize) -> Result<f64> {
    let pyr = forward_w(a, levels)?;
    let total = pyr.energy();
    Ok(if total > 0.0 {
        pyr.finer_detail_energy() / total
    } else {
        0.0
    })
}

/// Pseudo-inverse of the `s_L` and `d_L` blocks only; finer detail blocks
/// of the result are zero.
///
/// This is the exact Moore-Penrose inverse only when `a` has no finer
/// detail content. Otherwise the Penrose conditions generally fail, and a
/// warning is logged when that content exceeds [`REDUNDANCY_WARN_RATIO`]
/// of the total.
pub fn sp_pinv_w(a: &Tensor3, levels: usize, tol: f64) -> Result<Tensor3> {
    let mut pyr = forward_w(a, levels)?;
    let total = pyr.energy();
    if total > 0.0 {
        let ratio = pyr.finer_detail_energy() / total;
        if ratio > REDUNDANCY_WARN_RATIO {
            log::warn!(
                "sp_pinv_w: {:.2}% of the operator's energy sits in discarded detail levels; \
                 result is not a Moore-Penrose inverse",
                100.0 * ratio
            );
        }
    }
    let (n1, n2) = (a.n1(), a.n2());
    let mut out_blocks = Vec::with_capacity(levels);
    for j in 1..levels {
        out_blocks.push(Tensor3::zeros(n2, n1, pyr.detail(j).p()));
    }
    let dl = pyr
        .block(BlockTag::Detail(levels))
        .map_slices(|_, m| Ok(m.pinv(tol)))?;
    out_blocks.push(dl);
    let smooth = pyr
        .block(BlockTag::Smooth)
        .map_slices(|_, m| Ok(m.pinv(tol)))?;
    pyr = WaveletPyramid::from_parts(smooth, out_blocks)?;
    inverse_w(&pyr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{identity_tensor, w_product};
    use crate::fixtures::nonreversal_a;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Builds a tensor from a pyramid whose every block is produced by `f`.
    fn from_blocks(
        n1: usize,
        n2: usize,
        p: usize,
        levels: usize,
        mut f: impl FnMut(BlockTag, usize) -> Matrix,
    ) -> Tensor3 {
        let block = |tag, count: usize, f: &mut dyn FnMut(BlockTag, usize) -> Matrix| {
            let mats: Vec<Matrix> = (0..count).map(|k| f(tag, k)).collect();
            Tensor3::from_slices(&mats).unwrap()
        };
        let smooth = block(BlockTag::Smooth, p >> levels, &mut f);
        let details = (1..=levels)
            .map(|j| block(BlockTag::Detail(j), p >> j, &mut f))
            .collect();
        let t = inverse_w(&WaveletPyramid::from_parts(smooth, details).unwrap()).unwrap();
        assert_eq!(t.shape(), (n1, n2, p));
        t
    }

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows)
    }

    #[test]
    fn full_rank_svd_is_lossless() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Tensor3::random(6, 4, 8, &mut rng);
        let (factors, recon) = w_svd(&a, 4, 3).unwrap();
        assert!(recon.distance(&a) <= 1e-10 * a.frobenius_norm());
        assert_eq!(factors.truncation_bound(4).bound, 0.0);
        assert!(factors.truncation_bound(4).discarded.is_empty());
    }

    #[test]
    fn rank_one_blocks_are_recovered_at_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = from_blocks(5, 4, 8, 2, |_, _| {
            let u = Tensor3::random_signed(5, 1, 1, &mut rng);
            let v = Tensor3::random_signed(1, 4, 1, &mut rng);
            Matrix::from_fn(5, 4, |i, j| u.get(i, 0, 0) * v.get(0, j, 0))
        });
        let (_, recon) = w_svd(&a, 1, 2).unwrap();
        assert!(recon.distance(&a) <= 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn residual_matches_discarded_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Tensor3::random(16, 12, 8, &mut rng);
        let (factors, recon) = w_svd(&a, 4, 3).unwrap();
        let wres = wavelet_distance(&a, &recon, 3).unwrap();
        let bound = factors.truncation_bound(4);
        let direct: f64 = bound.discarded.iter().map(|d| d.sigma * d.sigma).sum();
        assert!((wres * wres - direct).abs() <= 1e-8 * direct);
        assert!((bound.bound - wres).abs() <= 1e-8 * bound.bound);
        // Spatial residual is measured, not bounded.
        assert!(recon.distance(&a) > 0.0);
    }

    #[test]
    fn factors_reassemble_the_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = Tensor3::random(7, 5, 8, &mut rng);
        let (factors, recon) = w_svd(&a, 3, 2).unwrap();
        assert_eq!(factors.u.shape(), (7, 3, 8));
        assert_eq!(factors.s.shape(), (3, 3, 8));
        assert_eq!(factors.v.shape(), (5, 3, 8));
        let assembled = factors.reconstruct().unwrap();
        assert!(assembled.distance(&recon) <= 1e-10 * recon.frobenius_norm());

        for (_, block) in forward_w(&factors.s, 2).unwrap().blocks() {
            for k in 1..=block.p() {
                let s = block.frontal_slice(k).unwrap();
                assert!(s.is_diagonal());
                let d: Vec<f64> = (0..3).map(|i| s.get(i, i)).collect();
                assert!(d.windows(2).all(|w| w[0] >= w[1]) && d[2] >= 0.0);
            }
        }
        for t in [&factors.u, &factors.v] {
            for (_, block) in forward_w(t, 2).unwrap().blocks() {
                for k in 1..=block.p() {
                    assert!(block.frontal_slice(k).unwrap().orthogonality_defect() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn rank_errors() {
        let a = Tensor3::zeros(3, 4, 4);
        assert!(matches!(
            w_svd(&a, 0, 1),
            Err(Error::Rank { rank: 0, max: 3 })
        ));
        assert!(matches!(w_svd(&a, 4, 1), Err(Error::Rank { .. })));
        assert!(sp_w_svd(&a, 5, 1).is_err());
    }

    #[test]
    fn bound_from_hand_spectrum() {
        let spectrum = vec![
            SliceSpectrum {
                block: BlockTag::Smooth,
                slice: 1,
                sigma: vec![3.0, 2.0],
            },
            SliceSpectrum {
                block: BlockTag::Detail(1),
                slice: 1,
                sigma: vec![4.0, 1.0],
            },
        ];
        let b = truncation_bound(&spectrum, 1);
        assert!((b.bound - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(b.discarded.len(), 2);
        assert_eq!(b.discarded[0].index, 2);
        assert_eq!(truncation_bound(&spectrum, 2).bound, 0.0);
    }

    #[test]
    fn sparse_svd_equals_full_at_one_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = Tensor3::random(6, 5, 6, &mut rng);
        let (_, full) = w_svd(&a, 2, 1).unwrap();
        let sparse = sp_w_svd(&a, 2, 1).unwrap();
        assert!(sparse.distance(&full) <= 1e-13 * full.frobenius_norm());
    }

    #[test]
    fn sparse_svd_equals_full_without_finer_details() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = from_blocks(6, 5, 16, 3, |tag, _| match tag {
            BlockTag::Detail(j) if j < 3 => Matrix::zeros(6, 5),
            _ => Matrix::from_fn(6, 5, |_, _| rand::Rng::random::<f64>(&mut rng)),
        });
        let (_, full) = w_svd(&a, 2, 3).unwrap();
        let sparse = sp_w_svd(&a, 2, 3).unwrap();
        assert!(sparse.distance(&full) <= 1e-12 * full.frobenius_norm());
    }

    #[test]
    fn pinv_of_identity() {
        let id = identity_tensor(3, 8, 3).unwrap();
        assert!(pinv_w(&id, 3, DEFAULT_PINV_TOL).unwrap().distance(&id) < 1e-14);
    }

    #[test]
    fn nonreversal_fixture_intermediates() {
        let a = nonreversal_a();
        let ap = forward_w(&pinv_w(&a, 1, DEFAULT_PINV_TOL).unwrap(), 1).unwrap();
        let expect_s = m(&[&[2.0, -2.0], &[0.0, 0.4], &[0.0, 0.8]]);
        let expect_d = m(&[&[-1.0, -1.0], &[0.0, -1.0], &[0.0, 0.0]]);
        assert!(
            ap.smooth()
                .frontal_slice(1)
                .unwrap()
                .sub(&expect_s)
                .frobenius_norm()
                < 1e-12
        );
        assert!(
            ap.detail(1)
                .frontal_slice(1)
                .unwrap()
                .sub(&expect_d)
                .frobenius_norm()
                < 1e-12
        );
    }

    #[test]
    fn pinv_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = Tensor3::random_signed(6, 4, 8, &mut rng);
        let direct = pinv_w(&a, 3, DEFAULT_PINV_TOL).unwrap();
        let assembled = pinv_w_from_factors(&a, 3, DEFAULT_PINV_TOL).unwrap();
        assert!(assembled.distance(&direct) <= 1e-8 * direct.frobenius_norm());
    }

    #[test]
    fn sparse_pinv_cases() {
        // Slice-constant operator: no detail content at all.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let op = Tensor3::repeat_slice(
            &Matrix::from_fn(
                5,
                5,
                |i, j| if i == j { 2.0 } else { 0.0 } + 0.1 * (i + j) as f64,
            ),
            8,
        );
        let full = pinv_w(&op, 3, DEFAULT_PINV_TOL).unwrap();
        let sparse = sp_pinv_w(&op, 3, DEFAULT_PINV_TOL).unwrap();
        assert!(sparse.distance(&full) <= 1e-10 * full.frobenius_norm());

        let a = Tensor3::random(4, 3, 6, &mut rng);
        assert!(
            sp_pinv_w(&a, 1, DEFAULT_PINV_TOL)
                .unwrap()
                .distance(&pinv_w(&a, 1, DEFAULT_PINV_TOL).unwrap())
                < 1e-14
        );

        // Random data carries substantial finer-detail energy.
        let r = Tensor3::random_signed(4, 4, 8, &mut rng);
        assert!(finer_detail_ratio(&r, 3).unwrap() > REDUNDANCY_WARN_RATIO);
        let x = sp_pinv_w(&r, 3, DEFAULT_PINV_TOL).unwrap();
        let axa = w_product(&w_product(&r, &x, 3).unwrap(), &r, 3).unwrap();
        assert!(axa.relative_distance(&r) > 1e-3);
    }
}
