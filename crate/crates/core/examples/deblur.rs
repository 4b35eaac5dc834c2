//! Blurs a hyperspectral stack with Toeplitz operators and restores it by
//! least squares under the w-, sparse w- and t-products.
//!
//! The blur operators are the same in every band, so their wavelet
//! transforms have no detail content and the sparse variant gives exactly
//! the same result as the full one, only faster. The t-product gives the
//! same operator tensors a different meaning (its DFT concentrates them in
//! one frequency), so the t baseline is shown for timing only.
//!
//! Run with `cargo run --release --example deblur`.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wten::imaging::blur_vectors;
use wten::{blur, blur_operator, deblur, BlurSpec, DeblurMethod, QualityReport, Tensor3};

fn main() -> wten::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (n, p, levels) = (128, 32, 3);

    // Band-wise constant within each group of 2^L bands: the w-product
    // blur acts on such stacks exactly like blurring every band.
    let groups = Tensor3::random(n, n, p >> levels, &mut rng);
    let x = Tensor3::from_fn(n, n, p, |i, j, k| groups.get(i, j, k >> levels));

    let spec = BlurSpec::for_image(&x, 3, 3)?;
    let (taps_v, _) = blur_vectors(&spec);
    let nonzero: Vec<String> = taps_v
        .iter()
        .take_while(|&&c| c != 0.0)
        .map(|c| format!("{c:.4}"))
        .collect();
    println!("vertical blur taps: [{}, 0, …]", nonzero.join(", "));
    let (a_v, a_h) = blur_operator(&spec);
    let blurred = blur(&x, &a_v, &a_h, levels)?;
    let q = QualityReport::compare(&x, &blurred, None)?;
    println!("blurred:    PSNR {:8.3} dB  SSIM {:.4}", q.psnr, q.ssim);

    for method in [DeblurMethod::W, DeblurMethod::Spw, DeblurMethod::T] {
        let start = Instant::now();
        let restored = deblur(&blurred, &a_v, &a_h, levels, method)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let q = QualityReport::compare(&x, &restored, None)?;
        if method == DeblurMethod::T {
            println!("{method:>3} deblur: {:>36.1} ms", ms);
        } else {
            println!(
                "{method:>3} deblur: PSNR {:8.3} dB  SSIM {:.4}  {ms:7.1} ms",
                q.psnr, q.ssim
            );
        }
    }
    Ok(())
}
