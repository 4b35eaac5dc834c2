//! Hyperspectral imaging on top of the tensor products: Toeplitz blur
//! operators, blurring and least-squares deblurring, and PSNR/SSIM.

mod blur;
mod metrics;

pub use blur::{blur, blur_operator, blur_vectors, deblur, toeplitz, BlurSpec, DeblurMethod};
pub use metrics::{default_mpp, psnr, psnr_std, ssim, ssim_bands, QualityReport, ROUNDOFF_REL};
