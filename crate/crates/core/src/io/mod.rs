//! Tensor files (NPY) and grayscale previews (binary PGM).

mod npy;
mod pgm;

pub use npy::{load_tensor, read_npy, save_tensor, write_npy};
pub use pgm::{band_image, save_preview, write_pgm, Band};
