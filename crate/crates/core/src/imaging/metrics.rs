use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

fn same_shape(x1: &Tensor3, x2: &Tensor3) -> Result<()> {
    if x1.shape() != x2.shape() {
        return Err(Error::shape(format!(
            "cannot compare {:?} with {:?}",
            x1.shape(),
            x2.shape()
        )));
    }
    Ok(())
}

fn squared_error(x1: &Tensor3, x2: &Tensor3) -> f64 {
    x1.as_slice()
        .iter()
        .zip(x2.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

/// Largest entry over both images, falling back to 1 when nothing is
/// positive.
pub fn default_mpp(x1: &Tensor3, x2: &Tensor3) -> f64 {
    let m = x1.max().max(x2.max());
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

fn check_mpp(mpp: f64) -> Result<()> {
    if mpp > 0.0 && mpp.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "peak value must be positive, got {mpp}"
        )))
    }
}

/// `10·log₁₀(n1·n2·p·mpp / ‖x1 − x2‖²)`; note `mpp` enters linearly.
/// Identical inputs give `f64::INFINITY`.
pub fn psnr(x1: &Tensor3, x2: &Tensor3, mpp: f64) -> Result<f64> {
    same_shape(x1, x2)?;
    check_mpp(mpp)?;
    let err = squared_error(x1, x2);
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (x1.as_slice().len() as f64 * mpp / err).log10())
}

/// Conventional PSNR with `mpp²` in the numerator.
pub fn psnr_std(x1: &Tensor3, x2: &Tensor3, mpp: f64) -> Result<f64> {
    same_shape(x1, x2)?;
    check_mpp(mpp)?;
    let err = squared_error(x1, x2);
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (x1.as_slice().len() as f64 * mpp * mpp / err).log10())
}

fn band_ssim(a: &[f64], b: &[f64], c1: f64, c2: f64) -> f64 {
    let n = a.len() as f64;
    let mu_a = a.iter().sum::<f64>() / n;
    let mu_b = b.iter().sum::<f64>() / n;
    let (mut var_a, mut var_b, mut cov) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mu_a, y - mu_b);
        var_a += dx * dx;
        var_b += dy * dy;
        cov += dx * dy;
    }
    let (var_a, var_b, cov) = (var_a / n, var_b / n, cov / n);
    ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
        / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2))
}

/// SSIM of each band, using global moments over the band and
/// stabilizers `(0.01·mpp)²`, `(0.03·mpp)²`.
pub fn ssim_bands(x1: &Tensor3, x2: &Tensor3, mpp: f64) -> Result<Vec<f64>> {
    same_shape(x1, x2)?;
    check_mpp(mpp)?;
    let c1 = (0.01 * mpp).powi(2);
    let c2 = (0.03 * mpp).powi(2);
    Ok((0..x1.p())
        .into_par_iter()
        .map(|k| band_ssim(x1.slice_data(k), x2.slice_data(k), c1, c2))
        .collect())
}

/// Mean of [`ssim_bands`].
pub fn ssim(x1: &Tensor3, x2: &Tensor3, mpp: f64) -> Result<f64> {
    let bands = ssim_bands(x1, x2, mpp)?;
    Ok(bands.iter().sum::<f64>() / bands.len() as f64)
}

/// Differences at or below this fraction of the reference norm are
/// rounding noise; [`QualityReport::compare`] treats them as identical.
pub const ROUNDOFF_REL: f64 = 1e-12;

/// Quality of an estimate against a reference image.
#[derive(Debug, Clone, Serialize)]
pub struct QualityReport {
    /// Decibels with `mpp` in the numerator; `+∞` for identical images.
    pub psnr: f64,
    /// Decibels with `mpp²` in the numerator.
    pub psnr_std: f64,
    pub ssim: f64,
    pub mpp: f64,
    pub ssim_bands: Vec<f64>,
}

impl QualityReport {
    /// Compares `estimate` with `reference`; `mpp` defaults to
    /// [`default_mpp`]. Estimates within [`ROUNDOFF_REL`] of the reference
    /// report PSNR `+∞` and SSIM 1.
    pub fn compare(reference: &Tensor3, estimate: &Tensor3, mpp: Option<f64>) -> Result<Self> {
        let mpp = mpp.unwrap_or_else(|| default_mpp(reference, estimate));
        same_shape(reference, estimate)?;
        check_mpp(mpp)?;
        if reference.distance(estimate) <= ROUNDOFF_REL * reference.frobenius_norm() {
            return Ok(QualityReport {
                psnr: f64::INFINITY,
                psnr_std: f64::INFINITY,
                ssim: 1.0,
                mpp,
                ssim_bands: vec![1.0; reference.p()],
            });
        }
        let ssim_bands = ssim_bands(reference, estimate, mpp)?;
        Ok(QualityReport {
            psnr: psnr(reference, estimate, mpp)?,
            psnr_std: psnr_std(reference, estimate, mpp)?,
            ssim: ssim_bands.iter().sum::<f64>() / ssim_bands.len() as f64,
            mpp,
            ssim_bands,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn psnr_direct_substitution() {
        let ones = Tensor3::from_fn(2, 2, 2, |_, _, _| 1.0);
        let zeros = Tensor3::zeros(2, 2, 2);
        assert_eq!(psnr(&ones, &zeros, 1.0).unwrap(), 0.0);
        assert_eq!(psnr(&ones, &ones, 1.0).unwrap(), f64::INFINITY);
        assert!(psnr(&ones, &zeros, 0.0).is_err());
        assert!(psnr(&ones, &Tensor3::zeros(2, 2, 3), 1.0).is_err());
    }

    #[test]
    fn psnr_log_law_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Tensor3::random(5, 4, 3, &mut rng);
        let d = Tensor3::random_signed(5, 4, 3, &mut rng).scale(0.01);
        let near = x.add(&d).unwrap();
        let far = x.add(&d.scale(10.0)).unwrap();
        let (p1, p2) = (psnr(&x, &near, 1.0).unwrap(), psnr(&x, &far, 1.0).unwrap());
        assert!((p1 - p2 - 20.0).abs() < 1e-10);
        assert_eq!(psnr(&near, &x, 1.0).unwrap(), p1);
        // Conventional form differs by 10·log₁₀(mpp).
        let (v, s) = (
            psnr(&x, &near, 4.0).unwrap(),
            psnr_std(&x, &near, 4.0).unwrap(),
        );
        assert!((s - v - 10.0 * 4f64.log10()).abs() < 1e-10);
    }

    #[test]
    fn ssim_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Tensor3::random_signed(6, 6, 3, &mut rng);
        assert!((ssim(&x, &x, 1.0).unwrap() - 1.0).abs() < 1e-14);
        // Negation flips the luminance term too, so use zero-mean bands
        // for the sign check.
        let mut z = x.clone();
        for k in 0..z.p() {
            let band = z.slice_data_mut(k);
            let mean = band.iter().sum::<f64>() / band.len() as f64;
            band.iter_mut().for_each(|v| *v -= mean);
        }
        assert!(ssim(&z, &z.scale(-1.0), 1.0).unwrap() < 0.0);
        let c = Tensor3::from_fn(4, 4, 2, |_, _, _| 0.7);
        assert_eq!(ssim(&c, &c, 1.0).unwrap(), 1.0);
        let y = Tensor3::random_signed(6, 6, 3, &mut rng);
        assert!((ssim(&x, &y, 1.0).unwrap() - ssim(&y, &x, 1.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn default_peak_is_largest_entry() {
        let a = Tensor3::from_vec(1, 2, 1, vec![0.5, 3.0]).unwrap();
        let b = Tensor3::from_vec(1, 2, 1, vec![4.0, -1.0]).unwrap();
        assert_eq!(default_mpp(&a, &b), 4.0);
        let r = QualityReport::compare(&a, &a, None).unwrap();
        assert_eq!(r.psnr, f64::INFINITY);
        assert_eq!(r.ssim, 1.0);
        assert_eq!(r.mpp, 3.0);
        let nudged = a.map(|v| v * (1.0 + 1e-15));
        assert_eq!(
            QualityReport::compare(&a, &nudged, None).unwrap().psnr,
            f64::INFINITY
        );
    }
}
