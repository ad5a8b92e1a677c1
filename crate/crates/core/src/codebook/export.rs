//! Codebook export: a whitespace-separated metadata listing and a raw
//! little-endian binary of the matrix.
//!
//! Binary layout: `"SPHW"`, version `u32`, `N u32`, `G u32`, then `N * G`
//! complex entries in column-major order, each as real then imaginary
//! `f64`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{RingDistance, SphericalCodebook};
use crate::{CMatrix, Error, Result};

pub const BINARY_MAGIC: [u8; 4] = *b"SPHW";
pub const BINARY_VERSION: u32 = 1;

/// One line per grid point: `t s z r theta phi`, with `r = inf` for the
/// far-field ring.
pub fn write_metadata(path: &Path, cb: &SphericalCodebook) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for p in &cb.grid {
        let r = match p.distance {
            RingDistance::FarField => "inf".to_string(),
            RingDistance::Finite(r) => format!("{r:e}"),
        };
        writeln!(
            out,
            "{} {} {} {} {:e} {:e}",
            p.indices.t, p.indices.s, p.indices.z, r, p.elevation_rad, p.azimuth_rad
        )
        .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_binary(path: &Path, cb: &SphericalCodebook) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let dim = |v: usize| {
        u32::try_from(v).map_err(|_| Error::dimension(format!("{v} does not fit the u32 header field")))
    };
    let mut header = Vec::with_capacity(16);
    header.extend_from_slice(&BINARY_MAGIC);
    header.extend_from_slice(&BINARY_VERSION.to_le_bytes());
    header.extend_from_slice(&dim(cb.matrix.nrows())?.to_le_bytes());
    header.extend_from_slice(&dim(cb.matrix.ncols())?.to_le_bytes());
    out.write_all(&header).map_err(|e| Error::io(path, e))?;
    // nalgebra storage is column-major already
    for v in cb.matrix.iter() {
        out.write_all(&v.re.to_le_bytes()).map_err(|e| Error::io(path, e))?;
        out.write_all(&v.im.to_le_bytes()).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads a matrix written by [`write_binary`].
pub fn read_binary(path: &Path) -> Result<CMatrix> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    if bytes.len() < 16 || bytes[..4] != BINARY_MAGIC {
        return Err(Error::domain(format!("{} is not a codebook binary", path.display())));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let version = word(4);
    if version != BINARY_VERSION {
        return Err(Error::domain(format!("unsupported codebook binary version {version}")));
    }
    let (n, g) = (word(8) as usize, word(12) as usize);
    let body = &bytes[16..];
    if body.len() != n * g * 16 {
        return Err(Error::dimension(format!(
            "payload holds {} bytes, header promises {n} x {g} complex entries",
            body.len()
        )));
    }
    let values: Vec<Complex64> = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok(CMatrix::from_vec(n, g, values))
}
