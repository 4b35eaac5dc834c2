//! Mode-3 DFT of a real tensor, stored as split real/imaginary planes.

use std::ops::Range;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use realfft::RealFftPlanner;
use rustfft::{Fft, FftPlanner};

use crate::chunks::{chunk_starts, RawBlock, CHUNK};

/// Side of the square tiles used when moving between slice-major and
/// tube-major order.
const TILE: usize = 16;

/// Calls `f(row, columns)` over a `rows × cols` index grid tile by tile,
/// so that strided accesses on one side of a transpose stay in cache.
fn for_each_tile(rows: usize, cols: usize, mut f: impl FnMut(usize, Range<usize>)) {
    for r0 in (0..rows).step_by(TILE) {
        for c0 in (0..cols).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                f(r, c0..(c0 + TILE).min(cols));
            }
        }
    }
}
use crate::matrix;
use crate::tensor::Tensor3;

/// DFT along the third mode. Bin `k` holds the `n1 × n2` complex slice
/// `Σ_l a[:, :, l] · e^{-2πi·kl/p}`. A half spectrum keeps bins
/// `0..=p/2` only; the rest are conjugates of those for real tensors.
#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    pub n1: usize,
    pub n2: usize,
    pub p: usize,
    /// Bins stored: `p` or `p/2 + 1`.
    pub bins: usize,
    /// Bin-major, each bin row-major `n1·n2`.
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

fn complex_inverse_plan(p: usize) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_inverse(p)
}

impl Spectrum {
    pub fn zeros(n1: usize, n2: usize, p: usize, half: bool) -> Self {
        let bins = if half { p / 2 + 1 } else { p };
        Spectrum {
            n1,
            n2,
            p,
            bins,
            re: vec![0.0; n1 * n2 * bins],
            im: vec![0.0; n1 * n2 * bins],
        }
    }

    pub fn is_half(&self) -> bool {
        self.bins < self.p
    }

    /// Real-to-complex DFT of every tube. A full spectrum fills the upper
    /// bins by conjugate symmetry.
    pub fn forward(t: &Tensor3, half: bool) -> Self {
        let (n1, n2, p) = t.shape();
        let len = n1 * n2;
        let h = p / 2 + 1;
        let r2c = RealFftPlanner::<f64>::new().plan_fft_forward(p);
        let mut out = Spectrum::zeros(n1, n2, p, half);
        let bins = out.bins;
        let re_out = RawBlock::from_slice(&mut out.re);
        let im_out = RawBlock::from_slice(&mut out.im);
        let data = t.as_slice();
        chunk_starts(len).into_par_iter().for_each_init(
            || (Vec::new(), Vec::new(), r2c.make_scratch_vec()),
            |(tubes, spec, scratch): &mut (Vec<f64>, Vec<Complex64>, Vec<Complex64>), x0| {
                let w = CHUNK.min(len - x0);
                // Tube-major: tube i occupies tubes[i·p .. (i+1)·p].
                tubes.resize(w * p, 0.0);
                spec.resize(w * h, Complex64::default());
                for_each_tile(p, w, |l, cols| {
                    let row = &data[l * len + x0 + cols.start..l * len + x0 + cols.end];
                    for (i, &v) in cols.zip(row) {
                        tubes[i * p + l] = v;
                    }
                });
                for (tube, out) in tubes.chunks_exact_mut(p).zip(spec.chunks_exact_mut(h)) {
                    r2c.process_with_scratch(tube, out, scratch)
                        .expect("buffer lengths match the plan");
                }
                for_each_tile(bins, w, |k, cols| {
                    let (src, sign) = if k < h { (k, 1.0) } else { (p - k, -1.0) };
                    let at = k * len + x0 + cols.start;
                    // SAFETY: this chunk owns positions x0..x0+w of every bin.
                    let (re, im) =
                        unsafe { (re_out.run(at, cols.len()), im_out.run(at, cols.len())) };
                    for ((i, r), m) in cols.zip(re).zip(im) {
                        let c = spec[i * h + src];
                        *r = c.re;
                        *m = sign * c.im;
                    }
                });
            },
        );
        out
    }

    /// Inverse DFT; returns the real part and the largest imaginary
    /// magnitude that was discarded.
    pub fn inverse(&self) -> (Tensor3, f64) {
        if self.is_half() {
            self.inverse_half()
        } else {
            self.inverse_full()
        }
    }

    /// Complex-to-real inverse from bins `0..=p/2`. The only imaginary
    /// content it cannot represent sits in bin 0 (and bin p/2 for even p).
    fn inverse_half(&self) -> (Tensor3, f64) {
        let (n1, n2, p, h) = (self.n1, self.n2, self.p, self.bins);
        let len = n1 * n2;
        let c2r = RealFftPlanner::<f64>::new().plan_fft_inverse(p);
        let mut out = Tensor3::zeros(n1, n2, p);
        let dst = RawBlock::new(&mut out);
        let scale = 1.0 / p as f64;
        let residue = chunk_starts(len)
            .into_par_iter()
            .map_init(
                || (Vec::new(), Vec::new(), c2r.make_scratch_vec()),
                |(spec, tubes, scratch): &mut (Vec<Complex64>, Vec<f64>, Vec<Complex64>), x0| {
                    let w = CHUNK.min(len - x0);
                    spec.resize(w * h, Complex64::default());
                    tubes.resize(w * p, 0.0);
                    for_each_tile(h, w, |k, cols| {
                        let at = k * len + x0;
                        let re = &self.re[at + cols.start..at + cols.end];
                        let im = &self.im[at + cols.start..at + cols.end];
                        for ((i, &r), &m) in cols.zip(re).zip(im) {
                            spec[i * h + k] = Complex64::new(r, m);
                        }
                    });
                    let mut residue = 0.0f64;
                    for (s, tube) in spec.chunks_exact_mut(h).zip(tubes.chunks_exact_mut(p)) {
                        residue = residue.max(s[0].im.abs());
                        s[0].im = 0.0;
                        if p % 2 == 0 {
                            residue = residue.max(s[h - 1].im.abs());
                            s[h - 1].im = 0.0;
                        }
                        c2r.process_with_scratch(s, tube, scratch)
                            .expect("buffer lengths match the plan");
                    }
                    for_each_tile(p, w, |l, cols| {
                        // SAFETY: this chunk owns positions x0..x0+w of every slice.
                        let row = unsafe { dst.run(l * len + x0 + cols.start, cols.len()) };
                        for (i, v) in cols.zip(row) {
                            *v = tubes[i * p + l] * scale;
                        }
                    });
                    residue * scale
                },
            )
            .reduce(|| 0.0, f64::max);
        (out, residue)
    }

    fn inverse_full(&self) -> (Tensor3, f64) {
        let (n1, n2, p) = (self.n1, self.n2, self.p);
        let len = n1 * n2;
        let inv = complex_inverse_plan(p);
        let mut out = Tensor3::zeros(n1, n2, p);
        let dst = RawBlock::new(&mut out);
        let scale = 1.0 / p as f64;
        let residue = chunk_starts(len)
            .into_par_iter()
            .map_init(
                || {
                    (
                        Vec::new(),
                        vec![Complex64::default(); inv.get_inplace_scratch_len()],
                    )
                },
                |(buf, scratch): &mut (Vec<Complex64>, Vec<Complex64>), x0| {
                    let w = CHUNK.min(len - x0);
                    buf.resize(w * p, Complex64::default());
                    for k in 0..p {
                        let re = &self.re[k * len + x0..k * len + x0 + w];
                        let im = &self.im[k * len + x0..k * len + x0 + w];
                        for i in 0..w {
                            buf[i * p + k] = Complex64::new(re[i], im[i]);
                        }
                    }
                    inv.process_with_scratch(buf, scratch);
                    let mut residue = 0.0f64;
                    for l in 0..p {
                        // SAFETY: this chunk owns positions x0..x0+w of every slice.
                        let row = unsafe { dst.run(l * len + x0, w) };
                        for (i, v) in row.iter_mut().enumerate() {
                            let c = buf[i * p + l];
                            *v = c.re * scale;
                            residue = residue.max((c.im * scale).abs());
                        }
                    }
                    residue
                },
            )
            .reduce(|| 0.0, f64::max);
        (out, residue)
    }

    pub fn bins_mut(&mut self) -> impl IndexedParallelIterator<Item = (&mut [f64], &mut [f64])> {
        let len = self.bin_len();
        self.re.par_chunks_mut(len).zip(self.im.par_chunks_mut(len))
    }

    pub fn bin_len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn bin(&self, k: usize) -> (&[f64], &[f64]) {
        let len = self.bin_len();
        (
            &self.re[k * len..(k + 1) * len],
            &self.im[k * len..(k + 1) * len],
        )
    }

    pub fn bin_matrix(&self, k: usize) -> DMatrix<Complex64> {
        let (re, im) = self.bin(k);
        DMatrix::from_fn(self.n1, self.n2, |i, j| {
            Complex64::new(re[i * self.n2 + j], im[i * self.n2 + j])
        })
    }

    pub fn set_bin_matrix(&mut self, k: usize, m: &DMatrix<Complex64>) {
        let len = self.bin_len();
        for i in 0..self.n1 {
            for j in 0..self.n2 {
                let c = m[(i, j)];
                self.re[k * len + i * self.n2 + j] = c.re;
                self.im[k * len + i * self.n2 + j] = c.im;
            }
        }
    }
}

/// Complex slice product `(ar + i·ai)(br + i·bi)` with three real GEMMs:
/// `re = ar·br − ai·bi`, `im = (ar + ai)(br + bi) − ar·br − ai·bi`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn complex_gemm(
    m: usize,
    k: usize,
    n: usize,
    (ar, ai): (&[f64], &[f64]),
    (br, bi): (&[f64], &[f64]),
    (cr, ci): (&mut [f64], &mut [f64]),
    scratch: &mut Vec<f64>,
) {
    // Scratch holds ar+ai, br+bi and ai·bi; reused across calls.
    scratch.resize(m * k + k * n + m * n, 0.0);
    let (sa, rest) = scratch.split_at_mut(m * k);
    let (sb, t2) = rest.split_at_mut(k * n);
    for ((s, x), y) in sa.iter_mut().zip(ar).zip(ai) {
        *s = x + y;
    }
    for ((s, x), y) in sb.iter_mut().zip(br).zip(bi) {
        *s = x + y;
    }
    matrix::gemm(m, k, n, ar, br, cr);
    matrix::gemm(m, k, n, ai, bi, t2);
    matrix::gemm(m, k, n, sa, sb, ci);
    for ((r, i), t) in cr.iter_mut().zip(ci.iter_mut()).zip(t2.iter()) {
        *i -= *r + t;
        *r -= t;
    }
}

/// Complex Moore-Penrose inverse with a relative singular-value cutoff.
pub(crate) fn complex_pinv(m: &DMatrix<Complex64>, tol: f64) -> DMatrix<Complex64> {
    if m.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
        return DMatrix::zeros(m.ncols(), m.nrows());
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let sv = &svd.singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return DMatrix::zeros(m.ncols(), m.nrows());
    }
    // V · Σ⁺ · Uᴴ over the kept singular triplets.
    let kept: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > tol * smax).collect();
    let mut vs = DMatrix::<Complex64>::zeros(m.ncols(), kept.len());
    let mut uh = DMatrix::<Complex64>::zeros(kept.len(), m.nrows());
    for (c, &idx) in kept.iter().enumerate() {
        vs.set_column(c, &v_t.row(idx).adjoint().unscale(sv[idx]));
        uh.set_row(c, &u.column(idx).adjoint());
    }
    vs * uh
}

/// Rank-`r` truncation of a complex matrix.
pub(crate) fn complex_truncate(m: &DMatrix<Complex64>, r: usize) -> DMatrix<Complex64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let r = r.min(order.len());
    let mut us = DMatrix::<Complex64>::zeros(m.nrows(), r);
    let mut vt = DMatrix::<Complex64>::zeros(r, m.ncols());
    for (c, &idx) in order[..r].iter().enumerate() {
        us.set_column(c, &(u.column(idx) * Complex64::new(sv[idx], 0.0)));
        vt.set_row(c, &v_t.row(idx));
    }
    us * vt
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn half_and_full_spectra_agree_and_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [1, 2, 5, 8, 9] {
            // Wider than one chunk so the chunk seams are exercised.
            let t = Tensor3::random_signed(23, 13, p, &mut rng);
            let full = Spectrum::forward(&t, false);
            let half = Spectrum::forward(&t, true);
            assert!(!full.is_half());
            for k in 0..half.bins {
                assert_eq!(full.bin(k), half.bin(k));
            }
            for s in [&full, &half] {
                let (back, residue) = s.inverse();
                assert!(back.relative_distance(&t) < 1e-14);
                assert!(residue < 1e-14);
            }
        }
    }

    #[test]
    fn constant_tube_lands_in_bin_zero() {
        let t = Tensor3::from_fn(2, 2, 4, |i, j, _| (i + 2 * j) as f64);
        let s = Spectrum::forward(&t, false);
        assert_eq!(s.bin(0).0, &[0.0, 8.0, 4.0, 12.0]);
        for k in 1..4 {
            assert!(s.bin(k).0.iter().chain(s.bin(k).1).all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn three_multiplication_product() {
        // (1 + 2i)(3 − i) = 5 + 5i
        let (mut cr, mut ci) = ([0.0], [0.0]);
        complex_gemm(
            1,
            1,
            1,
            (&[1.0], &[2.0]),
            (&[3.0], &[-1.0]),
            (&mut cr, &mut ci),
            &mut Vec::new(),
        );
        assert_eq!((cr[0], ci[0]), (5.0, 5.0));
    }
}
