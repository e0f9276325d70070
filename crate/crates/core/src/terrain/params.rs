use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Terrain family tag, also the EMAP family byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerrainFamily {
    SimpleStairs,
    SimpleRamp,
    Procedural,
    SmoothMounds,
    IrregularStairs,
    /// Hand-built worlds (scenario fixtures, test maps).
    Composed,
}

impl TerrainFamily {
    /// The five generated families, in the fixed tag order.
    pub const GENERATED: [TerrainFamily; 5] = [
        TerrainFamily::SimpleStairs,
        TerrainFamily::SimpleRamp,
        TerrainFamily::Procedural,
        TerrainFamily::SmoothMounds,
        TerrainFamily::IrregularStairs,
    ];

    pub fn tag(self) -> u8 {
        match self {
            TerrainFamily::SimpleStairs => 0,
            TerrainFamily::SimpleRamp => 1,
            TerrainFamily::Procedural => 2,
            TerrainFamily::SmoothMounds => 3,
            TerrainFamily::IrregularStairs => 4,
            TerrainFamily::Composed => 5,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            0 => TerrainFamily::SimpleStairs,
            1 => TerrainFamily::SimpleRamp,
            2 => TerrainFamily::Procedural,
            3 => TerrainFamily::SmoothMounds,
            4 => TerrainFamily::IrregularStairs,
            5 => TerrainFamily::Composed,
            other => return Err(CoreError::Format(format!("unknown family tag {other}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            TerrainFamily::SimpleStairs => "simple_stairs",
            TerrainFamily::SimpleRamp => "simple_ramp",
            TerrainFamily::Procedural => "procedural",
            TerrainFamily::SmoothMounds => "smooth_mounds",
            TerrainFamily::IrregularStairs => "irregular_stairs",
            TerrainFamily::Composed => "composed",
        }
    }
}

impl std::str::FromStr for TerrainFamily {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "simple_stairs" => TerrainFamily::SimpleStairs,
            "simple_ramp" => TerrainFamily::SimpleRamp,
            "procedural" => TerrainFamily::Procedural,
            "smooth_mounds" => TerrainFamily::SmoothMounds,
            "irregular_stairs" => TerrainFamily::IrregularStairs,
            "composed" => TerrainFamily::Composed,
            other => return Err(CoreError::InvalidParam(format!("unknown family `{other}`"))),
        })
    }
}

/// Family-specific generator parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum TerrainParams {
    SimpleStairs(StairsParams),
    SimpleRamp(RampParams),
    Procedural(ProceduralParams),
    SmoothMounds(MoundsParams),
    IrregularStairs(IrregularParams),
}

impl TerrainParams {
    /// Default parameters for a family.
    pub fn default_for(family: TerrainFamily) -> Option<TerrainParams> {
        Some(match family {
            TerrainFamily::SimpleStairs => TerrainParams::SimpleStairs(StairsParams::default()),
            TerrainFamily::SimpleRamp => TerrainParams::SimpleRamp(RampParams::default()),
            TerrainFamily::Procedural => TerrainParams::Procedural(ProceduralParams::default()),
            TerrainFamily::SmoothMounds => TerrainParams::SmoothMounds(MoundsParams::default()),
            TerrainFamily::IrregularStairs => {
                TerrainParams::IrregularStairs(IrregularParams::default())
            }
            TerrainFamily::Composed => return None,
        })
    }

    pub fn family(&self) -> TerrainFamily {
        match self {
            TerrainParams::SimpleStairs(_) => TerrainFamily::SimpleStairs,
            TerrainParams::SimpleRamp(_) => TerrainFamily::SimpleRamp,
            TerrainParams::Procedural(_) => TerrainFamily::Procedural,
            TerrainParams::SmoothMounds(_) => TerrainFamily::SmoothMounds,
            TerrainParams::IrregularStairs(_) => TerrainFamily::IrregularStairs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TerrainParams::SimpleStairs(p) => p.validate(),
            TerrainParams::SimpleRamp(p) => p.validate(),
            TerrainParams::Procedural(p) => p.validate(),
            TerrainParams::SmoothMounds(p) => p.validate(),
            TerrainParams::IrregularStairs(p) => p.validate(),
        }
    }
}

fn check_range(name: &str, lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(CoreError::InvalidParam(format!(
            "{name} range [{lo}, {hi}] must satisfy low <= high"
        )));
    }
    Ok(())
}

fn check_resolution(resolution: f64) -> Result<()> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(CoreError::InvalidParam(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    Ok(())
}

/// Traversal axis of the stairs/ramp courses.
///
/// `Seeded` draws one of the four axis-aligned orientations per map so the
/// dataset sees features rising in every direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CourseOrientation {
    #[default]
    Seeded,
    PosX,
    NegX,
    PosY,
    NegY,
}

/// Flat-stairs-flat terrain: 2 m flat, 6 m staircase, 2 m flat along the
/// traversal axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StairsParams {
    pub resolution: f64,
    /// Per-step rise, uniform in [lo, hi] meters.
    pub rise_range: (f64, f64),
    /// Step tread width in meters. The resolution must divide it evenly.
    pub step_width: f64,
    pub orientation: CourseOrientation,
}

impl Default for StairsParams {
    fn default() -> Self {
        Self {
            resolution: 0.1,
            rise_range: (0.05, 0.15),
            step_width: 0.4,
            orientation: CourseOrientation::Seeded,
        }
    }
}

impl StairsParams {
    pub fn validate(&self) -> Result<()> {
        check_resolution(self.resolution)?;
        check_range("rise", self.rise_range.0, self.rise_range.1)?;
        if self.step_width <= 0.0 {
            return Err(CoreError::InvalidParam("step_width must be positive".into()));
        }
        let per_step = self.step_width / self.resolution;
        if (per_step - per_step.round()).abs() > 1e-9 {
            return Err(CoreError::InvalidParam(format!(
                "resolution {} does not evenly divide step width {}",
                self.resolution, self.step_width
            )));
        }
        Ok(())
    }
}

/// Flat-ramp-flat terrain over the same 2/6/2 m layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RampParams {
    pub resolution: f64,
    /// Ramp gradient (rise/run), uniform in [lo, hi].
    pub gradient_range: (f64, f64),
    pub orientation: CourseOrientation,
}

impl Default for RampParams {
    fn default() -> Self {
        Self {
            resolution: 0.1,
            gradient_range: (0.01, 0.3),
            orientation: CourseOrientation::Seeded,
        }
    }
}

impl RampParams {
    pub fn validate(&self) -> Result<()> {
        check_resolution(self.resolution)?;
        check_range("gradient", self.gradient_range.0, self.gradient_range.1)
    }
}

/// Cellular-automaton mounds: Voronoi of seeded heights, then smoothing.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoundsParams {
    pub resolution: f64,
    pub extent_m: f64,
    /// Number of seed cells.
    pub seed_count: usize,
    /// Seed heights, uniform in [lo, hi] meters.
    pub height_range: (f64, f64),
    /// Smooth a cell when (max neighbor - min neighbor) exceeds this.
    pub smooth_threshold: f64,
    pub smooth_iterations: usize,
}

impl Default for MoundsParams {
    fn default() -> Self {
        Self {
            resolution: 0.1,
            extent_m: 10.0,
            seed_count: 12,
            height_range: (1.0, 3.0),
            smooth_threshold: 0.5,
            smooth_iterations: 10,
        }
    }
}

impl MoundsParams {
    pub fn cells_per_side(&self) -> usize {
        (self.extent_m / self.resolution).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        check_resolution(self.resolution)?;
        check_range("height", self.height_range.0, self.height_range.1)?;
        if self.seed_count == 0 {
            return Err(CoreError::InvalidParam("seed_count must be >= 1".into()));
        }
        let cells = self.cells_per_side();
        if cells == 0 {
            return Err(CoreError::InvalidParam("extent smaller than one cell".into()));
        }
        if self.seed_count > cells * cells {
            return Err(CoreError::InvalidParam(format!(
                "seed_count {} exceeds cell count {}",
                self.seed_count,
                cells * cells
            )));
        }
        if self.smooth_threshold < 0.0 {
            return Err(CoreError::InvalidParam("smooth_threshold must be >= 0".into()));
        }
        Ok(())
    }
}

/// Smooth mounds quantized to terrace steps.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IrregularParams {
    pub mounds: MoundsParams,
    /// Terrace step height in meters; every cell is rounded to the nearest
    /// whole multiple of it.
    pub terrace_step: f64,
}

impl Default for IrregularParams {
    fn default() -> Self {
        Self {
            mounds: MoundsParams::default(),
            terrace_step: 0.25,
        }
    }
}

impl IrregularParams {
    pub fn validate(&self) -> Result<()> {
        self.mounds.validate()?;
        if !(self.terrace_step > 0.0) {
            return Err(CoreError::InvalidParam("terrace_step must be positive".into()));
        }
        Ok(())
    }
}

/// Tile kinds for the wave-function-collapse terrain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TileKind {
    Flat,
    Boxes,
    Ramp,
    Stairs,
}

/// Tiled stairs/ramp/box terrain assembled with wave function collapse.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProceduralParams {
    pub resolution: f64,
    /// Tiles per side (5 -> 25 tiles).
    pub tiles_per_side: usize,
    /// Tile edge length in meters.
    pub tile_m: f64,
    /// Tile kinds the collapse may use.
    pub allowed: Vec<TileKind>,
    /// Elevation difference between terrace levels, uniform in [lo, hi] per map.
    pub level_height_range: (f64, f64),
    /// Box bump height, uniform per box.
    pub box_height_range: (f64, f64),
    /// Box footprint edge, uniform per box.
    pub box_footprint_range: (f64, f64),
    /// Restarts with derived sub-seeds before giving up on a contradiction.
    pub max_retries: usize,
}

impl Default for ProceduralParams {
    fn default() -> Self {
        Self {
            resolution: 0.1,
            tiles_per_side: 5,
            tile_m: 2.0,
            allowed: vec![TileKind::Flat, TileKind::Boxes, TileKind::Ramp, TileKind::Stairs],
            level_height_range: (0.3, 0.6),
            box_height_range: (0.3, 1.0),
            box_footprint_range: (0.5, 1.5),
            max_retries: 20,
        }
    }
}

impl ProceduralParams {
    pub fn validate(&self) -> Result<()> {
        check_resolution(self.resolution)?;
        if self.tiles_per_side == 0 {
            return Err(CoreError::InvalidParam("tiles_per_side must be >= 1".into()));
        }
        if self.allowed.is_empty() {
            return Err(CoreError::InvalidParam("allowed tile kinds empty".into()));
        }
        let cells = self.tile_m / self.resolution;
        if (cells - cells.round()).abs() > 1e-9 || cells < 1.0 {
            return Err(CoreError::InvalidParam(format!(
                "resolution {} does not evenly divide tile size {}",
                self.resolution, self.tile_m
            )));
        }
        check_range("level_height", self.level_height_range.0, self.level_height_range.1)?;
        check_range("box_height", self.box_height_range.0, self.box_height_range.1)?;
        check_range(
            "box_footprint",
            self.box_footprint_range.0,
            self.box_footprint_range.1,
        )?;
        Ok(())
    }

    pub fn cells_per_tile(&self) -> usize {
        (self.tile_m / self.resolution).round() as usize
    }
}
