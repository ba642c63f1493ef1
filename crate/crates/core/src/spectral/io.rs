//! Binary field files.
//!
//! Layout, all little-endian:
//!
//! | bytes | content                         |
//! |-------|---------------------------------|
//! | 4     | magic `GNSF`                    |
//! | 4     | version (`u32`, currently 1)    |
//! | 4     | spatial dimension `n` (`u32`)   |
//! | 4     | points per axis `N` (`u32`)     |
//! | 4     | component count (`u32`)         |
//! | 8     | box side `L` (`f64`)            |
//!
//! followed by `components * N^n` complex coefficients as `(re, im)` pairs of
//! `f64`, component-major and row-major within a component.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Grid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"GNSF";
pub const VERSION: u32 = 1;

pub fn write_field<W: Write>(mut w: W, field: &SpectralField) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    w.write_u32::<LittleEndian>(g.dim() as u32)?;
    w.write_u32::<LittleEndian>(g.size() as u32)?;
    w.write_u32::<LittleEndian>(field.components() as u32)?;
    w.write_f64::<LittleEndian>(g.length())?;
    for c in field.coeffs() {
        w.write_f64::<LittleEndian>(c.re)?;
        w.write_f64::<LittleEndian>(c.im)?;
    }
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<SpectralField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dim = r.read_u32::<LittleEndian>()? as usize;
    let size = r.read_u32::<LittleEndian>()? as usize;
    let components = r.read_u32::<LittleEndian>()? as usize;
    let length = r.read_f64::<LittleEndian>()?;
    let grid = Grid::new(dim, size, length).map_err(|e| Error::Format(e.to_string()))?;
    if components == 0 || components > 3 {
        return Err(Error::Format(format!("bad component count {components}")));
    }
    let count = components * grid.points();
    let mut coeffs = Vec::with_capacity(count);
    for _ in 0..count {
        let re = r.read_f64::<LittleEndian>()?;
        let im = r.read_f64::<LittleEndian>()?;
        coeffs.push(Complex64::new(re, im));
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after coefficients".into()));
    }
    SpectralField::from_coeffs(grid, components, coeffs)
}

pub fn save_field(path: &Path, field: &SpectralField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field(&mut w, field)?;
    w.flush()?;
    Ok(())
}

pub fn load_field(path: &Path) -> Result<SpectralField> {
    read_field(BufReader::new(File::open(path)?))
}
