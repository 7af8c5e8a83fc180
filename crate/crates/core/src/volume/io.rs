//! VOL1 binary container.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! "VOL1" | nx: u32 | ny: u32 | nz: u32 | dtype: u8 | [num_classes: u8] | payload
//! ```
//!
//! dtype 1 is a float64 payload, dtype 2 a uint8 label payload preceded by
//! `num_classes`. Payload values are in x-fastest order.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use byteorder::{ByteOrder, LittleEndian, WriteBytesExt};

use super::{Dims, LabelMask, Volume3D};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"VOL1";
const DTYPE_F64: u8 = 1;
const DTYPE_LABELS: u8 = 2;
const HEADER_LEN: usize = 4 + 3 * 4 + 1;

fn write_header<W: Write>(w: &mut W, dims: Dims, dtype: u8) -> Result<()> {
    w.write_all(MAGIC)?;
    for n in [dims.nx, dims.ny, dims.nz] {
        let n = u32::try_from(n).map_err(|_| Error::DimsOverflow(dims.nx as u64, dims.ny as u64, dims.nz as u64))?;
        w.write_u32::<LittleEndian>(n)?;
    }
    w.write_u8(dtype)?;
    Ok(())
}

pub fn write_volume<W: Write>(v: &Volume3D, w: &mut W) -> Result<()> {
    write_header(w, v.dims(), DTYPE_F64)?;
    let mut buf = vec![0u8; v.values().len() * 8];
    LittleEndian::write_f64_into(v.values(), &mut buf);
    w.write_all(&buf)?;
    Ok(())
}

pub fn write_mask<W: Write>(m: &LabelMask, w: &mut W) -> Result<()> {
    write_header(w, m.dims(), DTYPE_LABELS)?;
    w.write_u8(m.num_classes() as u8)?;
    w.write_all(m.labels())?;
    Ok(())
}

struct Header {
    dims: Dims,
    dtype: u8,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 4 {
        return Err(Error::Truncated { expected: HEADER_LEN, actual: bytes.len() });
    }
    if &bytes[..4] != MAGIC {
        let mut magic = [0u8; 4];
        magic.copy_from_slice(&bytes[..4]);
        return Err(Error::BadMagic(magic));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated { expected: HEADER_LEN, actual: bytes.len() });
    }
    let nx = LittleEndian::read_u32(&bytes[4..8]) as u64;
    let ny = LittleEndian::read_u32(&bytes[8..12]) as u64;
    let nz = LittleEndian::read_u32(&bytes[12..16]) as u64;
    let dtype = bytes[16];
    if dtype != DTYPE_F64 && dtype != DTYPE_LABELS {
        return Err(Error::BadDtype(dtype));
    }
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::InvalidDims(nx as usize, ny as usize, nz as usize));
    }
    // The float payload must be addressable in bytes, not just in voxels.
    nx
        .checked_mul(ny)
        .and_then(|n| n.checked_mul(nz))
        .and_then(|n| n.checked_mul(8))
        .filter(|&n| usize::try_from(n).is_ok() && n <= isize::MAX as u64)
        .ok_or(Error::DimsOverflow(nx, ny, nz))?;
    let dims = Dims::new(nx as usize, ny as usize, nz as usize)?;
    Ok(Header { dims, dtype })
}

fn check_payload(payload: &[u8], expected: usize) -> Result<()> {
    match payload.len() {
        n if n < expected => Err(Error::Truncated { expected, actual: n }),
        n if n > expected => Err(Error::TrailingData),
        _ => Ok(()),
    }
}

fn parse_volume(bytes: &[u8]) -> Result<Volume3D> {
    let header = parse_header(bytes)?;
    if header.dtype != DTYPE_F64 {
        return Err(Error::WrongDtype { expected: DTYPE_F64, found: header.dtype });
    }
    let payload = &bytes[HEADER_LEN..];
    check_payload(payload, header.dims.len() * 8)?;
    let mut values = vec![0.0; header.dims.len()];
    LittleEndian::read_f64_into(payload, &mut values);
    Volume3D::new(header.dims, values)
}

fn parse_mask(bytes: &[u8]) -> Result<LabelMask> {
    let header = parse_header(bytes)?;
    if header.dtype != DTYPE_LABELS {
        return Err(Error::WrongDtype { expected: DTYPE_LABELS, found: header.dtype });
    }
    let num_classes = *bytes
        .get(HEADER_LEN)
        .ok_or(Error::Truncated { expected: HEADER_LEN + 1, actual: bytes.len() })?;
    let payload = &bytes[HEADER_LEN + 1..];
    check_payload(payload, header.dims.len())?;
    LabelMask::new(header.dims, payload.to_vec(), num_classes)
}

pub fn read_volume<R: Read>(r: &mut R) -> Result<Volume3D> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse_volume(&bytes)
}

pub fn read_mask<R: Read>(r: &mut R) -> Result<LabelMask> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse_mask(&bytes)
}

pub fn load_volume(path: impl AsRef<Path>) -> Result<Volume3D> {
    parse_volume(&std::fs::read(path)?)
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<LabelMask> {
    parse_mask(&std::fs::read(path)?)
}

pub fn save_volume(v: &Volume3D, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_volume(v, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn save_mask(m: &LabelMask, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_mask(m, &mut w)?;
    w.flush()?;
    Ok(())
}
