use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    M,
    T,
    W,
}

impl std::str::FromStr for ProductKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m" => Ok(ProductKind::M),
            "t" => Ok(ProductKind::T),
            "w" => Ok(ProductKind::W),
            other => Err(Error::Config(format!("unknown product kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for ProductKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            ProductKind::M => "m",
            ProductKind::T => "t",
            ProductKind::W => "w",
        })
    }
}

/// Operation count of one `n1×n2×p ⋆ n2×n3×p` product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OpCountReport {
    pub kind: ProductKind,
    pub n1: u64,
    pub n2: u64,
    pub n3: u64,
    pub p: u64,
    pub count: u128,
}

fn log2_ceil(p: u64) -> u128 {
    if p <= 1 {
        0
    } else {
        u128::from(64 - (p - 1).leading_zeros())
    }
}

/// Closed-form operation counts:
///
/// * m: `n1·n2·n3·p + (n1n2 + n2n3 + n1n3)·p²`
/// * t: `n1·n2·n3·p + (n1n2 + n2n3 + n1n3)·p·⌈log₂ p⌉`
/// * w: `n1·n2·n3·p + 2p·(n1n2 + n2n3 + n1n3)`, `p` a power of two
pub fn op_count(kind: ProductKind, n1: u64, n2: u64, n3: u64, p: u64) -> Result<OpCountReport> {
    if n1 == 0 || n2 == 0 || n3 == 0 || p == 0 {
        return Err(Error::Config(
            "operation counts need positive dimensions".into(),
        ));
    }
    let (a, b, c, q) = (n1 as u128, n2 as u128, n3 as u128, p as u128);
    let face = a * b * c * q;
    let cross = a * b + b * c + a * c;
    let count = match kind {
        ProductKind::M => face + cross * q * q,
        ProductKind::T => face + cross * q * log2_ceil(p),
        ProductKind::W => {
            if !p.is_power_of_two() {
                return Err(Error::Level {
                    levels: log2_ceil(p) as usize,
                    p: p as usize,
                });
            }
            face + 2 * q * cross
        }
    };
    Ok(OpCountReport {
        kind,
        n1,
        n2,
        n3,
        p,
        count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SvdKind {
    TSvd,
    MSvd,
    WSvd,
    SpWSvd,
}

/// SVD-variant counts on `p×p×p` cubes: t-svd `p⁴ + 2p³·log₂p`,
/// m-svd `p⁴ + 2p⁴`, w-svd `p⁴ + 4p³`, sp-w-svd `2p³ + 4p³`.
pub fn svd_op_count(kind: SvdKind, p: u64) -> u128 {
    let q = p as u128;
    let (p3, p4) = (q * q * q, q * q * q * q);
    match kind {
        SvdKind::TSvd => p4 + 2 * p3 * log2_ceil(p),
        SvdKind::MSvd => p4 + 2 * p4,
        SvdKind::WSvd => p4 + 4 * p3,
        SvdKind::SpWSvd => 2 * p3 + 4 * p3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(kind: ProductKind, p: u64) -> u128 {
        op_count(kind, p, p, p, p).unwrap().count
    }

    #[test]
    fn cube_counts_at_two_to_the_ten() {
        let p = 1u64 << 10;
        assert_eq!(cube(ProductKind::M, p), 4_398_046_511_104);
        assert_eq!(cube(ProductKind::T, p), 1_131_723_882_496);
        assert_eq!(cube(ProductKind::W, p), 1_105_954_078_720);
    }

    #[test]
    fn ordering_on_large_cubes() {
        for e in 6..=12 {
            let p = 1u64 << e;
            let (m, t, w) = (
                cube(ProductKind::M, p),
                cube(ProductKind::T, p),
                cube(ProductKind::W, p),
            );
            assert!(w < t && t < m, "p = {p}");
        }
    }

    #[test]
    fn single_slice_counts() {
        let r = |k| op_count(k, 2, 3, 4, 1).unwrap().count;
        assert_eq!(r(ProductKind::M), 24 + 26);
        assert_eq!(r(ProductKind::T), 24);
        assert_eq!(r(ProductKind::W), 24 + 52);
    }

    #[test]
    fn rectangular_counts_follow_the_polynomials() {
        let r = op_count(ProductKind::M, 3, 5, 7, 8).unwrap();
        assert_eq!(r.count, 3 * 5 * 7 * 8 + (15 + 35 + 21) * 64);
        let r = op_count(ProductKind::T, 3, 5, 7, 8).unwrap();
        assert_eq!(r.count, 3 * 5 * 7 * 8 + (15 + 35 + 21) * 8 * 3);
        let r = op_count(ProductKind::W, 3, 5, 7, 8).unwrap();
        assert_eq!(r.count, 3 * 5 * 7 * 8 + 2 * 8 * (15 + 35 + 21));
    }

    #[test]
    fn w_count_needs_power_of_two() {
        assert!(matches!(
            op_count(ProductKind::W, 4, 4, 4, 96),
            Err(Error::Level { .. })
        ));
        // The FFT count rounds the plan depth up for other lengths.
        let t = op_count(ProductKind::T, 1, 1, 1, 96).unwrap().count;
        assert_eq!(t, 96 + 3 * 96 * 7);
    }

    #[test]
    fn svd_variant_counts() {
        let p = 1u64 << 10;
        let q = p as u128;
        assert_eq!(svd_op_count(SvdKind::TSvd, p), q.pow(4) + 20 * q.pow(3));
        assert_eq!(svd_op_count(SvdKind::WSvd, p), q.pow(4) + 4 * q.pow(3));
        assert_eq!(svd_op_count(SvdKind::SpWSvd, p), 6 * q.pow(3));
        assert_eq!(svd_op_count(SvdKind::MSvd, p), 3 * q.pow(4));
        assert!(svd_op_count(SvdKind::SpWSvd, p) < svd_op_count(SvdKind::WSvd, p));
        assert!(svd_op_count(SvdKind::WSvd, p) < svd_op_count(SvdKind::TSvd, p));
    }
}
