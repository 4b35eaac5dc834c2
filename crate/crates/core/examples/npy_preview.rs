//! Saves a tensor as NPY, reads it back, and writes PGM previews of the
//! band mean and of a single band.
//!
//! Run with `cargo run --example npy_preview [out_dir]`.

use std::path::PathBuf;

use wten::io::{save_preview, Band};
use wten::{load_tensor, save_tensor, Tensor3};

fn main() -> wten::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let (n1, n2, p) = (64, 96, 8);
    let t = Tensor3::from_fn(n1, n2, p, |i, j, k| {
        let (y, x) = (i as f64 / n1 as f64, j as f64 / n2 as f64);
        ((6.0 * x + k as f64).sin() * (4.0 * y).cos() + 1.0) * 100.0
    });

    let npy = dir.join("wten_example.npy");
    save_tensor(&t, &npy)?;
    let back = load_tensor(&npy)?;
    assert_eq!(back, t);
    println!("wrote and re-read {} ({:?})", npy.display(), back.shape());

    for (band, name) in [(Band::Mean, "mean"), (Band::Index(3), "band3")] {
        let path = dir.join(format!("wten_example_{name}.pgm"));
        save_preview(&back, &path, band)?;
        println!("preview {}", path.display());
    }
    Ok(())
}
