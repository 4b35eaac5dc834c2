use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tensor::Tensor3;

/// Which band image a preview shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    /// Mean over all bands.
    Mean,
    /// A single band, 1-based.
    Index(usize),
}

impl FromStr for Band {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "mean" {
            return Ok(Band::Mean);
        }
        s.parse()
            .map(Band::Index)
            .map_err(|_| Error::Config(format!("band must be 'mean' or a band number, got '{s}'")))
    }
}

pub fn band_image(t: &Tensor3, band: Band) -> Result<Matrix> {
    match band {
        Band::Mean => Ok(t.mean_slice()),
        Band::Index(k) => t.frontal_slice(k),
    }
}

/// Binary PGM (P5) of `img`, min–max scaled to 0..=255. A constant image
/// is drawn at mid-gray (128).
pub fn write_pgm(img: &Matrix, mut w: impl Write) -> Result<()> {
    let data = img.as_slice();
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    let pixels: Vec<u8> = data
        .iter()
        .map(|&v| {
            if range > 0.0 && range.is_finite() {
                ((v - lo) / range * 255.0).round().clamp(0.0, 255.0) as u8
            } else {
                128
            }
        })
        .collect();
    write!(w, "P5\n{} {}\n255\n", img.cols(), img.rows())?;
    w.write_all(&pixels)?;
    Ok(())
}

pub fn save_preview(t: &Tensor3, path: impl AsRef<Path>, band: Band) -> Result<()> {
    let img = band_image(t, band)?;
    let mut w = BufWriter::new(File::create(path)?);
    write_pgm(&img, &mut w)?;
    w.flush()?;
    Ok(())
}
