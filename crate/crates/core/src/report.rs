//! Benchmark records and their JSON/CSV serialization.

use std::io::Write;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// One measured run: a method on a tensor shape, its timing, and
/// (where meaningful) quality and operation counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub method: String,
    pub shape: [usize; 3],
    pub levels: Option<usize>,
    pub rank: Option<usize>,
    pub time_median_s: f64,
    pub time_mean_s: f64,
    pub op_count: Option<u128>,
    #[serde(serialize_with = "decibels")]
    pub psnr_db: Option<f64>,
    #[serde(serialize_with = "decibels")]
    pub psnr_db_std: Option<f64>,
    pub ssim: Option<f64>,
    pub speedup_vs_t: Option<f64>,
    pub repetitions: usize,
    pub threads: usize,
}

impl BenchRecord {
    pub fn new(method: impl Into<String>, shape: (usize, usize, usize)) -> Self {
        BenchRecord {
            method: method.into(),
            shape: [shape.0, shape.1, shape.2],
            levels: None,
            rank: None,
            time_median_s: 0.0,
            time_mean_s: 0.0,
            op_count: None,
            psnr_db: None,
            psnr_db_std: None,
            ssim: None,
            speedup_vs_t: None,
            repetitions: 0,
            threads: rayon::current_num_threads(),
        }
    }
}

/// JSON has no infinity; identical images are written as the string "inf".
fn decibels<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_infinite() && *x > 0.0 => s.serialize_str("inf"),
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!("unknown report format '{other}'"))),
        }
    }
}

const CSV_COLUMNS: [&str; 13] = [
    "method",
    "shape",
    "levels",
    "rank",
    "time_median_s",
    "time_mean_s",
    "op_count",
    "psnr_db",
    "psnr_db_std",
    "ssim",
    "speedup_vs_t",
    "repetitions",
    "threads",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

/// Writes records as a JSON array or as CSV with one row per record.
pub fn write_records(
    records: &[BenchRecord],
    format: ReportFormat,
    mut w: impl Write,
) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut w, records).map_err(std::io::Error::from)?;
            writeln!(w)?;
        }
        ReportFormat::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(CSV_COLUMNS)
                .map_err(std::io::Error::from)?;
            for r in records {
                let psnr = |v: &Option<f64>| match v {
                    Some(x) if x.is_infinite() => "inf".to_string(),
                    other => opt(other),
                };
                out.write_record([
                    r.method.clone(),
                    format!("{}x{}x{}", r.shape[0], r.shape[1], r.shape[2]),
                    opt(&r.levels),
                    opt(&r.rank),
                    r.time_median_s.to_string(),
                    r.time_mean_s.to_string(),
                    opt(&r.op_count),
                    psnr(&r.psnr_db),
                    psnr(&r.psnr_db_std),
                    opt(&r.ssim),
                    opt(&r.speedup_vs_t),
                    r.repetitions.to_string(),
                    r.threads.to_string(),
                ])
                .map_err(std::io::Error::from)?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BenchRecord {
        let mut r = BenchRecord::new("w-svd", (4, 3, 8));
        r.levels = Some(3);
        r.rank = Some(2);
        r.psnr_db = Some(f64::INFINITY);
        r.ssim = Some(1.0);
        r.op_count = Some(u128::from(u64::MAX) + 1);
        r
    }

    #[test]
    fn json_has_the_stable_keys() {
        let mut buf = Vec::new();
        write_records(&[sample()], ReportFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let obj = v[0].as_object().unwrap();
        for key in [
            "method",
            "shape",
            "levels",
            "rank",
            "time_median_s",
            "time_mean_s",
            "op_count",
            "psnr_db",
            "ssim",
            "speedup_vs_t",
        ] {
            assert!(obj.contains_key(key), "{key}");
        }
        assert_eq!(obj["psnr_db"], "inf");
        assert_eq!(obj["shape"], serde_json::json!([4, 3, 8]));
    }

    #[test]
    fn csv_has_header_and_row() {
        let mut buf = Vec::new();
        write_records(&[sample(), sample()], ReportFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("method,shape,levels"));
        assert!(lines[1].starts_with("w-svd,4x3x8,3,2,"));
        assert!(lines[1].contains(",inf,"));
    }
}
