//! Binary field snapshots.
//!
//! Layout, all multi-byte values little-endian:
//!
//! | bytes | content                                   |
//! |-------|-------------------------------------------|
//! | 5     | magic `MPSF1`                             |
//! | 4     | `n` as `u32`                              |
//! | 8     | `box_length` as `f64`                     |
//! | 4     | field count as `u32`                      |
//! | ...   | per field, `n^3` pairs `(re, im)` of `f64` |
//!
//! Coefficients follow the storage order of [`GridSpec`]: row-major over
//! `(i, j, l)` with FFT wavenumber ordering on each axis.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 5] = b"MPSF1";
const HEADER_LEN: usize = 5 + 4 + 8 + 4;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub box_length: f64,
    pub fields: Vec<SpectralField>,
}

pub fn encode(fields: &[&SpectralField]) -> Result<Vec<u8>> {
    let first = fields
        .first()
        .ok_or_else(|| Error::Snapshot("no fields to write".into()))?;
    let g = *first.grid();
    if fields.iter().any(|f| !f.grid().same_lattice(&g)) {
        return Err(Error::GridMismatch);
    }
    let mut out = Vec::with_capacity(HEADER_LEN + fields.len() * g.len() * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.n as u32).to_le_bytes());
    out.extend_from_slice(&g.box_length.to_le_bytes());
    out.extend_from_slice(&(fields.len() as u32).to_le_bytes());
    for f in fields {
        for c in f.coeffs() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    Ok(out)
}

/// Decode a snapshot; fields get the given dealias fraction since the
/// format does not carry one.
pub fn decode(bytes: &[u8], dealias_fraction: f64) -> Result<Snapshot> {
    if bytes.len() < HEADER_LEN || &bytes[..5] != MAGIC {
        return Err(Error::Snapshot("missing MPSF1 header".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let n = u32_at(5) as usize;
    let box_length = f64::from_le_bytes(bytes[9..17].try_into().unwrap());
    let count = u32_at(17) as usize;
    let grid =
        GridSpec::new(n, box_length, dealias_fraction).map_err(|e| Error::Snapshot(format!("bad header: {e}")))?;
    let expect = HEADER_LEN + count * grid.len() * 16;
    if bytes.len() != expect {
        return Err(Error::Snapshot(format!(
            "expected {expect} bytes for {count} fields at n = {n}, found {}",
            bytes.len()
        )));
    }
    let mut fields = Vec::with_capacity(count);
    let mut off = HEADER_LEN;
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    for _ in 0..count {
        let coeffs = (0..grid.len())
            .map(|k| Complex64::new(f64_at(off + 16 * k), f64_at(off + 16 * k + 8)))
            .collect();
        off += grid.len() * 16;
        fields.push(SpectralField::from_coeffs(grid, coeffs)?);
    }
    Ok(Snapshot { n, box_length, fields })
}

/// Write-temp-then-rename so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn write_snapshot(path: &Path, fields: &[&SpectralField]) -> Result<()> {
    write_atomic(path, &encode(fields)?)
}

pub fn read_snapshot(path: &Path, dealias_fraction: f64) -> Result<Snapshot> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes, dealias_fraction)
}
