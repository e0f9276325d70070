//! Procedural 2.5D terrain: elevation grids, the five generator families,
//! and the EMAP/PGM file formats.

mod families;
mod format;
mod params;
mod wfc;

pub use families::{
    generate, generate_irregular_stairs, generate_simple_ramp, generate_simple_stairs,
    generate_smooth_mounds,
};
pub use format::{read_emap, write_emap, write_pgm};
pub use params::{
    CourseOrientation, MoundsParams, ProceduralParams, RampParams, StairsParams, TerrainFamily,
    TerrainParams, TileKind,
};
pub use wfc::generate_procedural;

use crate::error::{CoreError, Result};

/// A uniform-resolution 2.5D height grid in meters.
///
/// Heights are stored row-major (`row * width_cells + col`) as `f32`, the
/// same representation the EMAP format uses, so a generate→write→read round
/// trip is bit-exact. Rows run along +y, columns along +x; `origin` is the
/// world position of the (0, 0) cell corner.
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationMap {
    width_cells: usize,
    height_cells: usize,
    resolution: f32,
    origin: (f64, f64),
    heights: Vec<f32>,
    seed: u64,
    family: TerrainFamily,
}

impl ElevationMap {
    /// A flat all-zero map. `resolution` must be positive.
    pub fn flat(
        width_cells: usize,
        height_cells: usize,
        resolution: f64,
        family: TerrainFamily,
        seed: u64,
    ) -> Result<Self> {
        Self::from_heights(
            width_cells,
            height_cells,
            resolution,
            vec![0.0; width_cells * height_cells],
            family,
            seed,
        )
    }

    /// Build a map from raw row-major heights.
    pub fn from_heights(
        width_cells: usize,
        height_cells: usize,
        resolution: f64,
        heights: Vec<f32>,
        family: TerrainFamily,
        seed: u64,
    ) -> Result<Self> {
        if width_cells == 0 || height_cells == 0 {
            return Err(CoreError::InvalidParam("zero-sized grid".into()));
        }
        if !(resolution > 0.0) {
            return Err(CoreError::InvalidParam(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if heights.len() != width_cells * height_cells {
            return Err(CoreError::InvalidParam(format!(
                "expected {} heights, got {}",
                width_cells * height_cells,
                heights.len()
            )));
        }
        if heights.iter().any(|h| !h.is_finite()) {
            return Err(CoreError::InvalidParam("non-finite height".into()));
        }
        Ok(Self {
            width_cells,
            height_cells,
            resolution: resolution as f32,
            origin: (0.0, 0.0),
            heights,
            seed,
            family,
        })
    }

    pub fn width_cells(&self) -> usize {
        self.width_cells
    }

    pub fn height_cells(&self) -> usize {
        self.height_cells
    }

    /// Meters per cell.
    pub fn resolution(&self) -> f64 {
        f64::from(self.resolution)
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn set_origin(&mut self, origin: (f64, f64)) {
        self.origin = origin;
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn family(&self) -> TerrainFamily {
        self.family
    }

    pub fn heights(&self) -> &[f32] {
        &self.heights
    }

    /// World extent (x, y) in meters.
    pub fn extent(&self) -> (f64, f64) {
        (
            self.width_cells as f64 * self.resolution(),
            self.height_cells as f64 * self.resolution(),
        )
    }

    /// Stored height of cell (col, row). Panics out of range.
    pub fn cell(&self, col: usize, row: usize) -> f64 {
        f64::from(self.heights[row * self.width_cells + col])
    }

    pub fn set_cell(&mut self, col: usize, row: usize, height: f64) {
        self.heights[row * self.width_cells + col] = height as f32;
    }

    /// Cell indices containing the world point, or `None` outside the extent.
    pub fn cell_at(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if !self.contains(x, y) {
            return None;
        }
        let res = self.resolution();
        let col = (((x - self.origin.0) / res).floor() as usize).min(self.width_cells - 1);
        let row = (((y - self.origin.1) / res).floor() as usize).min(self.height_cells - 1);
        Some((col, row))
    }

    /// World coordinates of a cell center.
    pub fn cell_center(&self, col: usize, row: usize) -> (f64, f64) {
        let res = self.resolution();
        (
            self.origin.0 + (col as f64 + 0.5) * res,
            self.origin.1 + (row as f64 + 0.5) * res,
        )
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (ex, ey) = self.extent();
        x >= self.origin.0 && x < self.origin.0 + ex && y >= self.origin.1 && y < self.origin.1 + ey
    }

    /// Bilinear-interpolated height at a world point.
    ///
    /// Heights are treated as samples at cell centers; inside the outer
    /// half-cell ring the interpolation clamps to the edge cells.
    pub fn height_at(&self, x: f64, y: f64) -> Result<f64> {
        if !self.contains(x, y) {
            return Err(CoreError::OutOfBounds { x, y });
        }
        let res = self.resolution();
        let gx = ((x - self.origin.0) / res - 0.5).clamp(0.0, (self.width_cells - 1) as f64);
        let gy = ((y - self.origin.1) / res - 0.5).clamp(0.0, (self.height_cells - 1) as f64);
        let c0 = gx.floor() as usize;
        let r0 = gy.floor() as usize;
        let c1 = (c0 + 1).min(self.width_cells - 1);
        let r1 = (r0 + 1).min(self.height_cells - 1);
        let tx = gx - c0 as f64;
        let ty = gy - r0 as f64;
        let h00 = self.cell(c0, r0);
        let h10 = self.cell(c1, r0);
        let h01 = self.cell(c0, r1);
        let h11 = self.cell(c1, r1);
        Ok(h00 * (1.0 - tx) * (1.0 - ty)
            + h10 * tx * (1.0 - ty)
            + h01 * (1.0 - tx) * ty
            + h11 * tx * ty)
    }

    /// `crop_cells`-square sub-grid centered on the cell containing the given
    /// world point, heights re-expressed relative to that center cell.
    pub fn crop_local(&self, center_x: f64, center_y: f64, crop_cells: usize) -> Result<ElevationMap> {
        if crop_cells == 0 {
            return Err(CoreError::InvalidParam("crop_cells must be >= 1".into()));
        }
        let (cc, cr) = self.cell_at(center_x, center_y).ok_or(CoreError::CropOutOfBounds {
            x: center_x,
            y: center_y,
            cells: crop_cells,
        })?;
        let half = (crop_cells - 1) / 2;
        if cc < half || cr < half {
            return Err(CoreError::CropOutOfBounds {
                x: center_x,
                y: center_y,
                cells: crop_cells,
            });
        }
        let start_col = cc - half;
        let start_row = cr - half;
        if start_col + crop_cells > self.width_cells || start_row + crop_cells > self.height_cells {
            return Err(CoreError::CropOutOfBounds {
                x: center_x,
                y: center_y,
                cells: crop_cells,
            });
        }
        let center_h = self.heights[cr * self.width_cells + cc];
        let mut heights = Vec::with_capacity(crop_cells * crop_cells);
        for row in start_row..start_row + crop_cells {
            for col in start_col..start_col + crop_cells {
                heights.push(self.heights[row * self.width_cells + col] - center_h);
            }
        }
        let mut crop = ElevationMap::from_heights(
            crop_cells,
            crop_cells,
            self.resolution(),
            heights,
            self.family,
            self.seed,
        )?;
        crop.set_origin((
            self.origin.0 + start_col as f64 * self.resolution(),
            self.origin.1 + start_row as f64 * self.resolution(),
        ));
        Ok(crop)
    }

    /// Whether a `crop_cells` window centered at the world point fits the map.
    pub fn crop_fits(&self, center_x: f64, center_y: f64, crop_cells: usize) -> bool {
        let Some((cc, cr)) = self.cell_at(center_x, center_y) else {
            return false;
        };
        let half = (crop_cells - 1) / 2;
        cc >= half
            && cr >= half
            && cc - half + crop_cells <= self.width_cells
            && cr - half + crop_cells <= self.height_cells
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_map() -> ElevationMap {
        // 10x10 cells at 0.5 m: left half 0, right half 1.
        let mut heights = vec![0.0f32; 100];
        for row in 0..10 {
            for col in 5..10 {
                heights[row * 10 + col] = 1.0;
            }
        }
        ElevationMap::from_heights(10, 10, 0.5, heights, TerrainFamily::Composed, 0).unwrap()
    }

    #[test]
    fn height_at_cell_center_is_stored_value() {
        let map = step_map();
        let (x, y) = map.cell_center(2, 3);
        assert_eq!(map.height_at(x, y).unwrap(), 0.0);
        let (x, y) = map.cell_center(7, 3);
        assert_eq!(map.height_at(x, y).unwrap(), 1.0);
    }

    #[test]
    fn height_at_midpoint_interpolates() {
        let map = step_map();
        // Midpoint between cell centers (4, r) and (5, r) straddles the step.
        let (x0, y) = map.cell_center(4, 4);
        let (x1, _) = map.cell_center(5, 4);
        let h = map.height_at((x0 + x1) / 2.0, y).unwrap();
        assert!((h - 0.5).abs() < 1e-12, "got {h}");
    }

    #[test]
    fn height_at_flat_map_constant() {
        let map = ElevationMap::flat(20, 20, 0.1, TerrainFamily::Composed, 0).unwrap();
        for &(x, y) in &[(0.01, 0.01), (1.0, 1.5), (1.99, 1.99)] {
            assert_eq!(map.height_at(x, y).unwrap(), 0.0);
        }
    }

    #[test]
    fn height_at_rejects_out_of_bounds() {
        let map = step_map();
        assert!(map.height_at(-0.1, 1.0).is_err());
        assert!(map.height_at(5.0, 1.0).is_err()); // extent is [0, 5)
    }

    #[test]
    fn crop_of_flat_map_is_zero() {
        let map = ElevationMap::flat(50, 50, 0.1, TerrainFamily::Composed, 0).unwrap();
        let crop = map.crop_local(2.5, 2.5, 25).unwrap();
        assert_eq!(crop.width_cells(), 25);
        assert!(crop.heights().iter().all(|&h| h == 0.0));
    }

    #[test]
    fn crop_center_cell_is_zero() {
        let map = step_map();
        let (x, y) = map.cell_center(5, 5);
        let crop = map.crop_local(x, y, 5).unwrap();
        let mid = crop.width_cells() / 2;
        assert_eq!(crop.cell(mid, mid), 0.0);
    }

    #[test]
    fn crop_on_step_straddles_zero() {
        let map = step_map();
        let (x, y) = map.cell_center(5, 5);
        let crop = map.crop_local(x, y, 5).unwrap();
        let min = crop.heights().iter().cloned().fold(f32::INFINITY, f32::min);
        let max = crop.heights().iter().cloned().fold(f32::NEG_INFINITY, f32::max);
        // Center sits on the high side: low side reads -1, high side 0.
        assert_eq!(min, -1.0);
        assert_eq!(max, 0.0);
    }

    #[test]
    fn crop_rejects_window_outside_map() {
        let map = step_map();
        assert!(map.crop_local(0.1, 0.1, 5).is_err());
        assert!(!map.crop_fits(0.1, 0.1, 5));
        assert!(map.crop_fits(2.5, 2.5, 5));
    }
}
