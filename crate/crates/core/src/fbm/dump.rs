//! Path dumps.
//!
//! CSV: header `path_id,t,index,value`, one row per path and grid point,
//! paths in order, values with 17 significant digits.
//!
//! Binary (little endian): a 64-byte header of eight 8-byte fields
//!
//! | field     | type  |
//! |-----------|-------|
//! | magic     | `b"RVFBMDMP"` |
//! | version   | u64 (= 1) |
//! | P         | u64 |
//! | n         | u64 |
//! | H         | f64 |
//! | horizon   | f64 |
//! | scheme id | u64 (0 Cholesky, 1 Hybrid, 2 rDonsker) |
//! | seed      | u64 (master seed) |
//!
//! followed by the `P × (n+1)` path matrix and the `P × n` increment matrix,
//! both column-major (all paths at grid point 0, then grid point 1, ...).

use std::io::{Read, Write};

use ndarray::Array2;

use super::{PathBatch, Scheme};
use crate::csv::fmt_f64;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::rng::SeedSpec;

pub const MAGIC: [u8; 8] = *b"RVFBMDMP";
pub const VERSION: u64 = 1;
pub const CSV_HEADER: &str = "path_id,t,index,value";

pub fn write_csv<W: Write>(batch: &PathBatch, mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let grid = batch.grid();
    for (j, path) in batch.paths().rows().into_iter().enumerate() {
        for (i, y) in path.iter().enumerate() {
            writeln!(out, "{j},{},{i},{}", fmt_f64(grid.time(i)), fmt_f64(*y))?;
        }
    }
    Ok(())
}

pub fn write_binary<W: Write>(batch: &PathBatch, mut out: W) -> Result<()> {
    let grid = batch.grid();
    out.write_all(&MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(batch.num_paths() as u64).to_le_bytes())?;
    out.write_all(&(grid.steps() as u64).to_le_bytes())?;
    out.write_all(&batch.hurst().to_le_bytes())?;
    out.write_all(&grid.horizon().to_le_bytes())?;
    out.write_all(&batch.scheme().id().to_le_bytes())?;
    out.write_all(&batch.seed().master_seed.to_le_bytes())?;
    for column in batch.paths().columns() {
        for y in column {
            out.write_all(&y.to_le_bytes())?;
        }
    }
    for column in batch.wiener_increments().columns() {
        for w in column {
            out.write_all(&w.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_word<R: Read>(input: &mut R) -> Result<[u8; 8]> {
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    Ok(word)
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_word(input)?))
}

fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_word(input)?))
}

fn read_column_major<R: Read>(input: &mut R, rows: usize, cols: usize) -> Result<Array2<f64>> {
    let mut m = Array2::zeros((rows, cols));
    for c in 0..cols {
        for r in 0..rows {
            m[[r, c]] = read_f64(input)?;
        }
    }
    Ok(m)
}

/// Read a binary dump. The stream id is not stored, so the returned batch
/// reports stream 0.
pub fn read_binary<R: Read>(mut input: R) -> Result<PathBatch> {
    if read_word(&mut input)? != MAGIC {
        return Err(Error::Format("not a path dump (bad magic)".into()));
    }
    let version = read_u64(&mut input)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported dump version {version}")));
    }
    let paths = read_u64(&mut input)? as usize;
    let steps = read_u64(&mut input)? as usize;
    let hurst = read_f64(&mut input)?;
    let horizon = read_f64(&mut input)?;
    let scheme_id = read_u64(&mut input)?;
    let scheme = Scheme::from_id(scheme_id)
        .ok_or_else(|| Error::Format(format!("unknown scheme id {scheme_id}")))?;
    let master_seed = read_u64(&mut input)?;
    let grid = GridSpec::new(horizon, steps)?;
    let values = read_column_major(&mut input, paths, steps + 1)?;
    let increments = read_column_major(&mut input, paths, steps)?;
    PathBatch::from_parts(
        grid,
        hurst,
        scheme,
        SeedSpec::new(master_seed, 0),
        values,
        increments,
    )
}
