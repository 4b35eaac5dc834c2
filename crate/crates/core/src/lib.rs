//! Third-order tensor algebra over the lazy lifting-scheme wavelet.
//!
//! The central operation is the w-product: tensors are transformed along
//! their third mode with an `L`-level lazy wavelet, multiplied slice by
//! slice in the wavelet domain, and transformed back. Around it the crate
//! provides identity/inverse/orthogonal tensors, truncated SVDs (`w_svd`,
//! the sparse `sp_w_svd`), the Moore-Penrose inverse, t-/m-product
//! baselines, hyperspectral blur/deblur, and PSNR/SSIM metrics.

pub mod algebra;
pub mod baselines;
mod chunks;
pub mod commands;
pub mod decomposition;
pub mod error;
pub mod fixtures;
pub mod imaging;
pub mod io;
pub mod lifting;
pub mod matrix;
pub mod report;
pub mod tensor;
pub mod timing;

pub use algebra::{
    face_product, identity_tensor, inverse_tensor, orthogonal_tensor, sp_w_product_chain,
    w_product, w_product_chain, FaceProductPlan,
};
pub use baselines::{m_product, op_count, t_product, t_svd, ModeTransform, ProductKind};
pub use decomposition::{
    pinv_w, sp_pinv_w, sp_w_svd, truncation_bound, w_svd, SvdFactors, TruncationBound,
    DEFAULT_PINV_TOL,
};
pub use error::{BlockTag, Error, Result};
pub use imaging::{blur, blur_operator, deblur, psnr, ssim, BlurSpec, DeblurMethod, QualityReport};
pub use io::{load_tensor, save_tensor};
pub use lifting::{forward_w, inverse_w, max_levels, WaveletPyramid};
pub use matrix::{Matrix, MatrixSvd};
pub use report::BenchRecord;
pub use tensor::Tensor3;
