//! NPY reader/writer restricted to little-endian floats in C order.
//!
//! A file of shape `(n1, n2, p)` maps element `[i, j, k]` to entry
//! `(i, j)` of frontal slice `k`; a 2-D file is read as a single slice.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

const MAGIC: &[u8; 6] = b"\x93NUMPY";

#[derive(Debug, Clone, Copy)]
enum Dtype {
    F8,
    F4,
}

impl Dtype {
    fn width(self) -> usize {
        match self {
            Dtype::F8 => 8,
            Dtype::F4 => 4,
        }
    }
}

struct Header {
    dtype: Dtype,
    shape: Vec<usize>,
}

/// Finds the value text following `'key':` in the header dictionary and
/// returns it with its byte offset within the header.
fn field<'a>(dict: &'a str, key: &str, base: usize) -> Result<(&'a str, usize)> {
    let pat = format!("'{key}':");
    let at = dict
        .find(&pat)
        .ok_or_else(|| Error::format(base, format!("header has no '{key}' entry")))?;
    let start = at + pat.len();
    let rest = &dict[start..];
    let skipped = rest.len() - rest.trim_start().len();
    Ok((rest.trim_start(), base + start + skipped))
}

fn parse_header(dict: &str, base: usize) -> Result<Header> {
    let (descr, off) = field(dict, "descr", base)?;
    let dtype = if descr.starts_with("'<f8'") {
        Dtype::F8
    } else if descr.starts_with("'<f4'") {
        Dtype::F4
    } else {
        let shown: String = descr.chars().take(8).collect();
        return Err(Error::format(
            off,
            format!("unsupported dtype {shown}; expected '<f8' or '<f4'"),
        ));
    };

    let (order, off) = field(dict, "fortran_order", base)?;
    if order.starts_with("True") {
        return Err(Error::format(
            off,
            "Fortran-ordered arrays are not supported",
        ));
    } else if !order.starts_with("False") {
        return Err(Error::format(off, "fortran_order must be True or False"));
    }

    let (shape_txt, off) = field(dict, "shape", base)?;
    let close = shape_txt
        .find(')')
        .filter(|_| shape_txt.starts_with('('))
        .ok_or_else(|| Error::format(off, "shape must be a tuple"))?;
    let shape = shape_txt[1..close]
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::format(off, format!("bad shape entry '{s}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if !(2..=3).contains(&shape.len()) || shape.contains(&0) {
        return Err(Error::format(
            off,
            format!("expected a non-empty 2-D or 3-D array, got shape {shape:?}"),
        ));
    }
    Ok(Header { dtype, shape })
}

/// Reads an NPY stream into a tensor.
pub fn read_npy(mut r: impl Read) -> Result<Tensor3> {
    let mut pre = [0u8; 8];
    r.read_exact(&mut pre)
        .map_err(|_| Error::format(0, "file too short for an NPY preamble"))?;
    if &pre[..6] != MAGIC {
        return Err(Error::format(0, "missing NPY magic string"));
    }
    let (len, base) = match pre[6] {
        1 => {
            let mut b = [0u8; 2];
            r.read_exact(&mut b)
                .map_err(|_| Error::format(8, "truncated header length"))?;
            (u16::from_le_bytes(b) as usize, 10)
        }
        2 | 3 => {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)
                .map_err(|_| Error::format(8, "truncated header length"))?;
            (u32::from_le_bytes(b) as usize, 12)
        }
        v => {
            return Err(Error::format(
                6,
                format!("unsupported NPY version {v}.{}", pre[7]),
            ))
        }
    };
    let mut raw = vec![0u8; len];
    r.read_exact(&mut raw)
        .map_err(|_| Error::format(base, "truncated header"))?;
    let dict = std::str::from_utf8(&raw)
        .map_err(|e| Error::format(base + e.valid_up_to(), "header is not text"))?;
    let header = parse_header(dict, base)?;

    let (n1, n2, p) = match header.shape[..] {
        [a, b] => (a, b, 1),
        [a, b, c] => (a, b, c),
        _ => unreachable!("validated above"),
    };
    let count = n1 * n2 * p;
    let width = header.dtype.width();
    let payload_at = base + len;
    let mut bytes = vec![0u8; count * width];
    let mut filled = 0;
    while filled < bytes.len() {
        match r.read(&mut bytes[filled..])? {
            0 => {
                return Err(Error::format(
                    payload_at + filled,
                    format!("payload truncated: {filled} of {} bytes", bytes.len()),
                ))
            }
            n => filled += n,
        }
    }

    let value = |idx: usize| -> f64 {
        let b = &bytes[idx * width..(idx + 1) * width];
        match header.dtype {
            Dtype::F8 => f64::from_le_bytes(b.try_into().expect("8 bytes")),
            Dtype::F4 => f64::from(f32::from_le_bytes(b.try_into().expect("4 bytes"))),
        }
    };
    Ok(Tensor3::from_fn(n1, n2, p, |i, j, k| {
        value((i * n2 + j) * p + k)
    }))
}

/// Writes `t` as NPY 1.0, `'<f8'`, C order, shape `(n1, n2, p)`.
pub fn write_npy(t: &Tensor3, mut w: impl Write) -> Result<()> {
    let (n1, n2, p) = t.shape();
    let mut dict =
        format!("{{'descr': '<f8', 'fortran_order': False, 'shape': ({n1}, {n2}, {p}), }}");
    // Pad so the payload starts on a 64-byte boundary.
    let total = 10 + dict.len() + 1;
    dict.push_str(&" ".repeat((64 - total % 64) % 64));
    dict.push('\n');
    let len = u16::try_from(dict.len()).map_err(|_| Error::Config("NPY header too long".into()))?;

    w.write_all(MAGIC)?;
    w.write_all(&[1, 0])?;
    w.write_all(&len.to_le_bytes())?;
    w.write_all(dict.as_bytes())?;
    let mut buf = Vec::with_capacity(n1 * n2 * p * 8);
    for i in 0..n1 {
        for j in 0..n2 {
            for k in 0..p {
                buf.extend_from_slice(&t.get(i, j, k).to_le_bytes());
            }
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn load_tensor(path: impl AsRef<Path>) -> Result<Tensor3> {
    read_npy(BufReader::new(File::open(path)?))
}

pub fn save_tensor(t: &Tensor3, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_npy(t, &mut w)?;
    w.flush()?;
    Ok(())
}
