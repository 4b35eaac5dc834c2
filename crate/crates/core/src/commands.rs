//! The command layer behind the `wten` binary: each command reads its
//! inputs, runs a kernel under the repetition protocol, and produces
//! [`BenchRecord`]s. The `run_*` variants work on in-memory tensors.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::w_product;
use crate::baselines::{
    m_product, op_count, svd_op_count, t_product, t_svd, ModeTransform, ProductKind, SvdKind,
};
use crate::decomposition::{sp_w_svd, w_svd};
use crate::error::{Error, Result};
use crate::imaging::{blur, blur_operator, deblur, BlurSpec, DeblurMethod, QualityReport};
use crate::io::{load_tensor, save_preview, save_tensor, Band};
use crate::lifting::max_levels;
use crate::report::{write_records, BenchRecord, ReportFormat};
use crate::tensor::Tensor3;
use crate::timing::{measure, Timing};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    W,
    Spw,
    T,
    M,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w" => Ok(Method::W),
            "spw" => Ok(Method::Spw),
            "t" => Ok(Method::T),
            "m" => Ok(Method::M),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// Settings shared by all commands. Unused fields are ignored.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    /// Pre-blurred image for `deblur`; synthesized from `input` if absent.
    pub blurred: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub preview: Option<PathBuf>,
    /// Wavelet levels; defaults to the most `p` allows.
    pub levels: Option<usize>,
    pub rank: Option<usize>,
    pub method: Method,
    pub b_v: usize,
    pub b_h: usize,
    pub seed: u64,
    pub repetitions: usize,
    pub format: ReportFormat,
    /// Peak value for PSNR/SSIM; defaults to the largest entry.
    pub mpp: Option<f64>,
    /// Also time the t-product method to fill `speedup_vs_t`.
    pub baseline: bool,
    /// Cube sizes for `bench`.
    pub ladder: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            blurred: None,
            output: None,
            report: None,
            preview: None,
            levels: None,
            rank: None,
            method: Method::W,
            b_v: 10,
            b_h: 10,
            seed: 0,
            repetitions: 10,
            format: ReportFormat::Json,
            mpp: None,
            baseline: true,
            ladder: (1..=9).map(|e| 1 << e).collect(),
        }
    }
}

impl RunConfig {
    /// Wavelet levels for a tensor with `p` bands.
    pub fn levels_for(&self, p: usize) -> Result<usize> {
        let max = max_levels(p);
        match self.levels {
            Some(l) if l >= 1 && l <= max => Ok(l),
            Some(l) => Err(Error::Level { levels: l, p }),
            None if max >= 1 => Ok(max),
            None => Err(Error::Level { levels: 1, p }),
        }
    }

    fn input(&self) -> Result<Tensor3> {
        let path = self
            .input
            .as_ref()
            .ok_or_else(|| Error::Config("an input tensor is required".into()))?;
        load_tensor(path)
    }

    fn finish(&self, records: &[BenchRecord], result: Option<&Tensor3>) -> Result<()> {
        if let (Some(path), Some(t)) = (&self.output, result) {
            save_tensor(t, path)?;
        }
        if let (Some(path), Some(t)) = (&self.preview, result) {
            save_preview(t, path, Band::Mean)?;
        }
        if let Some(path) = &self.report {
            write_records(records, self.format, BufWriter::new(File::create(path)?))?;
        }
        Ok(())
    }
}

fn fill_timing(r: &mut BenchRecord, t: &Timing) {
    r.time_median_s = t.median();
    r.time_mean_s = t.mean();
    r.repetitions = t.samples.len();
}

fn fill_quality(r: &mut BenchRecord, q: &QualityReport) {
    r.psnr_db = Some(q.psnr);
    r.psnr_db_std = Some(q.psnr_std);
    r.ssim = Some(q.ssim);
}

fn svd_with(x: &Tensor3, method: Method, rank: usize, levels: usize) -> Result<Tensor3> {
    match method {
        Method::W => Ok(w_svd(x, rank, levels)?.1),
        Method::Spw => sp_w_svd(x, rank, levels),
        Method::T => t_svd(x, rank),
        Method::M => Err(Error::Config("svd supports methods w, spw and t".into())),
    }
}

/// Low-rank reconstruction of `x` with quality and timing.
pub fn run_svd(x: &Tensor3, cfg: &RunConfig) -> Result<(BenchRecord, Tensor3)> {
    let rank = cfg
        .rank
        .ok_or_else(|| Error::Config("svd needs a rank".into()))?;
    let (n1, n2, p) = x.shape();
    let levels = match cfg.method {
        Method::T => 0,
        _ => cfg.levels_for(p)?,
    };
    let (timing, recon) = measure(cfg.repetitions, || svd_with(x, cfg.method, rank, levels))?;

    let (name, kind) = match cfg.method {
        Method::W => ("w-svd", SvdKind::WSvd),
        Method::Spw => ("sp-w-svd", SvdKind::SpWSvd),
        _ => ("t-svd", SvdKind::TSvd),
    };
    let mut rec = BenchRecord::new(name, (n1, n2, p));
    rec.levels = (cfg.method != Method::T).then_some(levels);
    rec.rank = Some(rank);
    fill_timing(&mut rec, &timing);
    fill_quality(&mut rec, &QualityReport::compare(x, &recon, cfg.mpp)?);
    if n1 == n2 && n2 == p {
        rec.op_count = Some(svd_op_count(kind, p as u64));
    }
    rec.speedup_vs_t = if cfg.method == Method::T {
        Some(1.0)
    } else if cfg.baseline {
        let (t, _) = measure(cfg.repetitions, || t_svd(x, rank))?;
        Some(t.median() / timing.median())
    } else {
        None
    };
    Ok((rec, recon))
}

/// `wten svd`: reads the input, reconstructs it at the configured rank,
/// and writes the reconstruction, preview and report as configured.
pub fn cmd_svd(cfg: &RunConfig) -> Result<BenchRecord> {
    let x = cfg.input()?;
    let (rec, recon) = run_svd(&x, cfg)?;
    cfg.finish(std::slice::from_ref(&rec), Some(&recon))?;
    Ok(rec)
}

fn deblur_method(m: Method) -> Result<DeblurMethod> {
    match m {
        Method::W => Ok(DeblurMethod::W),
        Method::Spw => Ok(DeblurMethod::Spw),
        Method::T => Ok(DeblurMethod::T),
        Method::M => Err(Error::Config("deblur supports methods w, spw and t".into())),
    }
}

/// Blurs `x` (unless `blurred` is given), deblurs it with the configured
/// method, and scores the result against `x`.
pub fn run_deblur(
    x: &Tensor3,
    blurred: Option<&Tensor3>,
    cfg: &RunConfig,
) -> Result<(BenchRecord, Tensor3)> {
    let method = deblur_method(cfg.method)?;
    let spec = BlurSpec::for_image(x, cfg.b_v, cfg.b_h)?;
    let (a_v, a_h) = blur_operator(&spec);
    let levels = match (method, blurred) {
        (DeblurMethod::T, Some(_)) => cfg.levels_for(x.p()).unwrap_or(0),
        _ => cfg.levels_for(x.p())?,
    };
    let synthesized;
    let b = match blurred {
        Some(b) => b,
        None => {
            synthesized = blur(x, &a_v, &a_h, levels)?;
            &synthesized
        }
    };
    let (timing, recon) = measure(cfg.repetitions, || deblur(b, &a_v, &a_h, levels, method))?;

    let name = match method {
        DeblurMethod::W => "w-deblur",
        DeblurMethod::Spw => "sp-w-deblur",
        DeblurMethod::T => "t-deblur",
    };
    let mut rec = BenchRecord::new(name, x.shape());
    rec.levels = (method != DeblurMethod::T).then_some(levels);
    fill_timing(&mut rec, &timing);
    fill_quality(&mut rec, &QualityReport::compare(x, &recon, cfg.mpp)?);
    rec.speedup_vs_t = if method == DeblurMethod::T {
        Some(1.0)
    } else if cfg.baseline {
        let (t, _) = measure(cfg.repetitions, || {
            deblur(b, &a_v, &a_h, levels, DeblurMethod::T)
        })?;
        Some(t.median() / timing.median())
    } else {
        None
    };
    Ok((rec, recon))
}

/// `wten deblur`.
pub fn cmd_deblur(cfg: &RunConfig) -> Result<BenchRecord> {
    let x = cfg.input()?;
    let blurred = cfg.blurred.as_ref().map(load_tensor).transpose()?;
    let (rec, recon) = run_deblur(&x, blurred.as_ref(), cfg)?;
    cfg.finish(std::slice::from_ref(&rec), Some(&recon))?;
    Ok(rec)
}

/// Times the m-, t- and w-products on random `p × p × p` cubes for every
/// `p` in the ladder. The w-product needs `p` even and is skipped
/// otherwise.
pub fn run_bench(cfg: &RunConfig) -> Result<Vec<BenchRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::new();
    for &p in &cfg.ladder {
        let a = Tensor3::random(p, p, p, &mut rng);
        let b = Tensor3::random(p, p, p, &mut rng);
        let dct = ModeTransform::dct(p);
        let levels = max_levels(p);
        let (t_time, _) = measure(cfg.repetitions, || t_product(&a, &b))?;
        let (m_time, _) = measure(cfg.repetitions, || m_product(&a, &b, &dct))?;
        let w_time = if levels >= 1 {
            Some(measure(cfg.repetitions, || w_product(&a, &b, levels))?.0)
        } else {
            None
        };
        let pu = p as u64;
        let runs = [
            ("m-product", ProductKind::M, Some(m_time), None),
            ("t-product", ProductKind::T, Some(t_time.clone()), None),
            ("w-product", ProductKind::W, w_time, Some(levels)),
        ];
        for (name, kind, timing, lv) in runs {
            let Some(timing) = timing else { continue };
            let mut rec = BenchRecord::new(name, (p, p, p));
            rec.levels = lv;
            fill_timing(&mut rec, &timing);
            rec.op_count = op_count(kind, pu, pu, pu, pu).ok().map(|r| r.count);
            rec.speedup_vs_t = Some(t_time.median() / timing.median());
            records.push(rec);
        }
    }
    Ok(records)
}

/// `wten bench`.
pub fn cmd_bench(cfg: &RunConfig) -> Result<Vec<BenchRecord>> {
    let records = run_bench(cfg)?;
    cfg.finish(&records, None)?;
    Ok(records)
}

/// `wten preview`.
pub fn cmd_preview(input: &std::path::Path, out: &std::path::Path, band: Band) -> Result<()> {
    save_preview(&load_tensor(input)?, out, band)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(method: Method) -> RunConfig {
        RunConfig {
            method,
            repetitions: 1,
            baseline: false,
            ..RunConfig::default()
        }
    }

    fn image() -> Tensor3 {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        Tensor3::random(12, 10, 8, &mut rng)
    }

    #[test]
    fn level_policy() {
        let c = RunConfig::default();
        assert_eq!(c.levels_for(96).unwrap(), 5);
        assert_eq!(c.levels_for(102).unwrap(), 1);
        assert!(c.levels_for(7).is_err());
        let c = RunConfig {
            levels: Some(3),
            ..RunConfig::default()
        };
        assert!(matches!(
            c.levels_for(204),
            Err(Error::Level { levels: 3, p: 204 })
        ));
    }

    #[test]
    fn full_rank_svd_is_reported_lossless() {
        let x = image();
        for m in [Method::W, Method::T] {
            let c = RunConfig {
                rank: Some(10),
                ..cfg(m)
            };
            let (rec, _) = run_svd(&x, &c).unwrap();
            assert_eq!(rec.psnr_db, Some(f64::INFINITY));
            assert_eq!(rec.ssim, Some(1.0));
        }
    }

    #[test]
    fn svd_quality_is_deterministic() {
        let x = image();
        let c = RunConfig {
            rank: Some(3),
            ..cfg(Method::Spw)
        };
        let (a, _) = run_svd(&x, &c).unwrap();
        let (b, _) = run_svd(&x, &c).unwrap();
        assert_eq!((a.psnr_db, a.ssim), (b.psnr_db, b.ssim));
        assert_eq!(a.levels, Some(3));
        assert!(run_svd(&x, &cfg(Method::W)).is_err());
        assert!(run_svd(
            &x,
            &RunConfig {
                rank: Some(2),
                ..cfg(Method::M)
            }
        )
        .is_err());
    }

    #[test]
    fn w_and_spw_deblur_report_the_same_quality() {
        let x = image();
        let c = |m| RunConfig {
            b_v: 3,
            b_h: 3,
            ..cfg(m)
        };
        let (w, _) = run_deblur(&x, None, &c(Method::W)).unwrap();
        let (s, _) = run_deblur(&x, None, &c(Method::Spw)).unwrap();
        assert!((w.psnr_db.unwrap() - s.psnr_db.unwrap()).abs() < 1e-9);
        assert!((w.ssim.unwrap() - s.ssim.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn bench_emits_three_products_per_size() {
        let c = RunConfig {
            ladder: vec![4, 6],
            ..cfg(Method::W)
        };
        let recs = run_bench(&c).unwrap();
        assert_eq!(recs.len(), 6);
        assert_eq!(recs[0].op_count, Some(4 * 256));
        // p = 6 has a w-product (one level) but no power-of-two count.
        assert_eq!(recs[5].op_count, None);
        assert!(recs.iter().all(|r| r.time_median_s >= 0.0));
    }
}
