//! The "PAMF" binary field format.
//!
//! Layout: magic bytes `PAMF`, little-endian `u32` version (currently 1),
//! `u64` points per axis `n`, `f64` half-width `L`, then `n*n` little-endian
//! `f64` values row-major. Readers validate magic, version and size.

use crate::error::{CoreError, Result};
use crate::lattice::{Field, Grid};
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"PAMF";
const VERSION: u32 = 1;

pub fn write_field<W: Write>(mut w: W, field: &Field) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(field.grid().points_per_axis() as u64).to_le_bytes())?;
    w.write_all(&field.grid().half_width().to_le_bytes())?;
    let mut buf = Vec::with_capacity(field.values().len() * 8);
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CoreError::MalformedPamf(format!(
            "bad magic {magic:?}, expected \"PAMF\""
        )));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(CoreError::MalformedPamf(format!(
            "unsupported version {version}"
        )));
    }
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let n = u64::from_le_bytes(u64buf) as usize;
    let mut f64buf = [0u8; 8];
    r.read_exact(&mut f64buf)?;
    let half_width = f64::from_le_bytes(f64buf);
    let grid = Grid::new(half_width, n)?;

    let mut data = vec![0u8; n * n * 8];
    r.read_exact(&mut data)?;
    // reject trailing bytes
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(CoreError::MalformedPamf("trailing bytes after field data".into()));
    }
    let values = data
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Field::from_values(grid, values)
}

pub fn save(path: &Path, field: &Field) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_field(std::io::BufWriter::new(file), field)
}

pub fn load(path: &Path) -> Result<Field> {
    let file = std::fs::File::open(path)?;
    read_field(std::io::BufReader::new(file))
}
