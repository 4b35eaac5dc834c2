//! Low-rank approximation of a synthetic hyperspectral cube with w-svd,
//! sparse w-svd and the t-svd baseline.
//!
//! Run with `cargo run --release --example lowrank_svd`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wten::lifting::max_levels;
use wten::{sp_w_svd, t_svd, w_svd, QualityReport, Tensor3};

/// A few smooth spatial "materials", each with its own smooth spectrum,
/// plus a little sensor noise.
fn synthetic_cube(n1: usize, n2: usize, p: usize, rng: &mut ChaCha8Rng) -> Tensor3 {
    let materials: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.random(),
                rng.random(),
                rng.random_range(2.0..6.0),
                rng.random(),
            )
        })
        .collect();
    Tensor3::from_fn(n1, n2, p, |i, j, k| {
        let (y, x, w) = (
            i as f64 / n1 as f64,
            j as f64 / n2 as f64,
            k as f64 / p as f64,
        );
        let signal: f64 = materials
            .iter()
            .map(|&(cy, cx, freq, phase)| {
                let spatial = (-((y - cy).powi(2) + (x - cx).powi(2)) * 8.0).exp();
                let spectral = 1.0 + 0.5 * (freq * w + phase * 6.0).sin();
                spatial * spectral
            })
            .sum();
        signal + 0.01 * rng.random::<f64>()
    })
}

fn main() -> wten::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (n1, n2, p) = (96, 80, 48);
    let x = synthetic_cube(n1, n2, p, &mut rng);
    let levels = max_levels(p);
    println!("cube {n1}×{n2}×{p}, L = {levels}");
    println!(
        "{:>5} {:>10} {:>10} {:>8} {:>9}",
        "rank", "method", "PSNR dB", "SSIM", "time ms"
    );

    for rank in [2, 8, 32] {
        for name in ["t-svd", "w-svd", "sp-w-svd"] {
            let start = Instant::now();
            let approx = match name {
                "t-svd" => t_svd(&x, rank)?,
                "w-svd" => w_svd(&x, rank, levels)?.1,
                _ => sp_w_svd(&x, rank, levels)?,
            };
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let q = QualityReport::compare(&x, &approx, None)?;
            println!(
                "{rank:>5} {name:>10} {:>10.3} {:>8.4} {ms:>9.1}",
                q.psnr, q.ssim
            );
        }
    }
    Ok(())
}
