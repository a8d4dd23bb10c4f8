//! Binary field snapshots.
//!
//! Layout, all little-endian: magic `b"ETDS"`, `u32` version (1), `u64` N,
//! `f64` L, `f64` t, then `N * N` `f64` nodal values in row-major order.

use std::io::{Read, Write};
use std::sync::Arc;

use super::{Field, SpectralGrid};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"ETDS";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub length: f64,
    pub t: f64,
    pub values: Vec<f64>,
}

impl Snapshot {
    pub fn from_field(field: &Field, t: f64) -> Self {
        Self {
            n: field.grid().n(),
            length: field.grid().length(),
            t,
            values: field.values().to_vec(),
        }
    }

    /// Rebuilds the field on `grid`, which must match the recorded N and L.
    pub fn to_field(&self, grid: Arc<SpectralGrid>) -> Result<Field> {
        if grid.n() != self.n || grid.length() != self.length {
            return Err(Error::Snapshot(format!(
                "snapshot grid (N={}, L={}) does not match (N={}, L={})",
                self.n,
                self.length,
                grid.n(),
                grid.length()
            )));
        }
        Field::new(grid, self.values.clone())
    }
}

pub fn write_snapshot<W: Write>(mut w: W, field: &Field, t: f64) -> Result<()> {
    let n = field.grid().n() as u64;
    let mut buf = Vec::with_capacity(32 + 8 * field.values().len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&field.grid().length().to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Snapshot> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot(format!("bad magic {magic:?}")));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    r.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let length = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let t = f64::from_le_bytes(b8);
    let count = n
        .checked_mul(n)
        .ok_or_else(|| Error::Snapshot(format!("N = {n} overflows")))?;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        r.read_exact(&mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    Ok(Snapshot { n, length, t, values })
}
