//! EMAP binary elevation maps and PGM heatmap export.
//!
//! EMAP layout, all little-endian:
//! magic `EMAP1` (5 bytes), u32 width_cells, u32 height_cells, f32 resolution,
//! f64 origin_x, f64 origin_y, u64 seed, u8 family tag, then
//! width x height f32 heights row-major.

use std::io::{Read, Write};

use super::{ElevationMap, TerrainFamily};
use crate::error::{CoreError, Result};

const MAGIC: &[u8; 5] = b"EMAP1";

pub fn write_emap<W: Write>(map: &ElevationMap, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(map.width_cells() as u32).to_le_bytes())?;
    w.write_all(&(map.height_cells() as u32).to_le_bytes())?;
    w.write_all(&(map.resolution() as f32).to_le_bytes())?;
    w.write_all(&map.origin().0.to_le_bytes())?;
    w.write_all(&map.origin().1.to_le_bytes())?;
    w.write_all(&map.seed().to_le_bytes())?;
    w.write_all(&[map.family().tag()])?;
    for &h in map.heights() {
        w.write_all(&h.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_emap<R: Read>(mut r: R) -> Result<ElevationMap> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CoreError::Format(format!(
            "bad magic {:?}, expected {:?}",
            magic, MAGIC
        )));
    }
    let width = read_u32(&mut r)? as usize;
    let height = read_u32(&mut r)? as usize;
    let resolution = f32::from_le_bytes(read_array(&mut r)?);
    let origin_x = f64::from_le_bytes(read_array(&mut r)?);
    let origin_y = f64::from_le_bytes(read_array(&mut r)?);
    let seed = u64::from_le_bytes(read_array(&mut r)?);
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag)?;
    let family = TerrainFamily::from_tag(tag[0])?;

    let count = width
        .checked_mul(height)
        .ok_or_else(|| CoreError::Format("grid size overflow".into()))?;
    let mut heights = Vec::with_capacity(count);
    for _ in 0..count {
        heights.push(f32::from_le_bytes(read_array(&mut r)?));
    }
    let mut map =
        ElevationMap::from_heights(width, height, f64::from(resolution), heights, family, seed)?;
    map.set_origin((origin_x, origin_y));
    Ok(map)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_array(r)?))
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

/// Binary PGM (P5) with heights min-max normalized to 0..255.
pub fn write_pgm<W: Write>(map: &ElevationMap, mut w: W) -> Result<()> {
    write_pgm_values(map.heights(), map.width_cells(), map.height_cells(), &mut w)
}

/// Binary PGM (P5) of an arbitrary scalar field, min-max normalized.
pub fn write_pgm_values<W: Write>(values: &[f32], width: usize, height: usize, w: &mut W) -> Result<()> {
    if values.len() != width * height {
        return Err(CoreError::Format("value count does not match dimensions".into()));
    }
    let min = values.iter().cloned().fold(f32::INFINITY, f32::min);
    let max = values.iter().cloned().fold(f32::NEG_INFINITY, f32::max);
    let span = if max > min { max - min } else { 1.0 };
    write!(w, "P5\n{width} {height}\n255\n")?;
    let bytes: Vec<u8> = values
        .iter()
        .map(|&v| (((v - min) / span) * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect();
    w.write_all(&bytes)?;
    Ok(())
}
