use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::DensityMatrix;

pub const DUMP_MAGIC: &[u8; 4] = b"TFDM";

/// Writes `m` as a 16-byte header (`TFDM`, `u` and `v` as little-endian
/// `u32`, four zero bytes) followed by the cells as little-endian `f64` in
/// storage order.
pub fn write_dump<W: Write>(mut w: W, m: &DensityMatrix) -> Result<()> {
    let mut header = [0u8; 16];
    header[..4].copy_from_slice(DUMP_MAGIC);
    header[4..8].copy_from_slice(&(m.u() as u32).to_le_bytes());
    header[8..12].copy_from_slice(&(m.v() as u32).to_le_bytes());
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(m.cells().len() * 8);
    for c in m.cells() {
        buf.extend_from_slice(&c.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_dump<R: Read>(mut r: R) -> Result<DensityMatrix> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)
        .map_err(|_| Error::InvalidDump("truncated header".into()))?;
    if &header[..4] != DUMP_MAGIC {
        return Err(Error::InvalidDump("bad magic".into()));
    }
    let u = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let v = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    let want = u
        .checked_mul(v)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::InvalidDump(format!("dimensions {u}x{v} overflow")))?;
    if body.len() != want {
        return Err(Error::InvalidDump(format!(
            "expected {want} bytes of cells for {u}x{v}, found {}",
            body.len()
        )));
    }
    let cells = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DensityMatrix::from_cells(u, v, cells).map_err(|e| Error::InvalidDump(e.to_string()))
}
