//! Scripted benchmark scenarios: a composed world, a start pose, a goal, and
//! an authored candidate set with semantic tags.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::pathspace::CandidatePath;
use crate::terrain::{ElevationMap, TerrainFamily};

pub const STAIRS_VS_RAMP: &str = "stairs_vs_ramp";
pub const LAB_OBSTACLE: &str = "lab_obstacle";
pub const STAIRS_WALL_FLAT: &str = "stairs_wall_flat";

/// A registered scripted scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub world: ElevationMap,
    /// Start pose (x, y, heading).
    pub start: (f64, f64, f64),
    pub goal: (f64, f64),
    /// Authored candidates in world coordinates, k = 5 waypoints each.
    pub candidates: Vec<CandidatePath>,
}

/// Serializable fixture document (scenario id plus tagged waypoint lists).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFixture {
    pub id: String,
    pub start: (f64, f64, f64),
    pub goal: (f64, f64),
    pub candidates: Vec<CandidatePath>,
}

impl Scenario {
    pub fn fixture(&self) -> ScenarioFixture {
        ScenarioFixture {
            id: self.id.clone(),
            start: self.start,
            goal: self.goal,
            candidates: self.candidates.clone(),
        }
    }
}

/// Registered scenario ids.
pub fn list() -> Vec<&'static str> {
    vec![STAIRS_VS_RAMP, LAB_OBSTACLE, STAIRS_WALL_FLAT]
}

/// Build a registered scenario.
pub fn build(id: &str) -> Result<Scenario> {
    match id {
        STAIRS_VS_RAMP => Ok(stairs_vs_ramp()),
        LAB_OBSTACLE => Ok(lab_obstacle()),
        STAIRS_WALL_FLAT => Ok(stairs_wall_flat()),
        other => Err(CoreError::UnknownScenario(other.to_string())),
    }
}

const RES: f64 = 0.1;
const CELLS: usize = 100;

fn world_from(heights: Vec<f32>, seed: u64) -> ElevationMap {
    ElevationMap::from_heights(CELLS, CELLS, RES, heights, TerrainFamily::Composed, seed)
        .expect("fixed-size scenario grid")
}

fn cell_xy(col: usize, row: usize) -> (f64, f64) {
    ((col as f64 + 0.5) * RES, (row as f64 + 0.5) * RES)
}

/// Five-waypoint dogleg through a via corridor at `x_via`.
fn via_path(start: (f64, f64), x_via: f64, goal: (f64, f64), tag: &str) -> CandidatePath {
    CandidatePath::tagged(
        vec![start, (x_via, 3.2), (x_via, 5.0), (x_via, 6.8), goal],
        tag,
    )
}

/// An elevated floor reachable by a 0.225-gradient ramp (west half) or a
/// 0.09 m-riser staircase (east half). Five candidates arc over each.
fn stairs_vs_ramp() -> Scenario {
    const PLATFORM: f64 = 0.45;
    const TREAD: f64 = 0.4;
    const RISER: f64 = 0.09;
    let mut heights = vec![0.0f32; CELLS * CELLS];
    for row in 0..CELLS {
        for col in 0..CELLS {
            let (x, y) = cell_xy(col, row);
            let h = if y < 4.0 {
                0.0
            } else if y < 6.0 {
                if x < 5.0 {
                    PLATFORM * (y - 4.0) / 2.0
                } else {
                    let step = ((y - 4.0) / TREAD).floor().min(4.0);
                    (step + 1.0) * RISER
                }
            } else {
                PLATFORM
            };
            heights[row * CELLS + col] = h as f32;
        }
    }
    let start = (5.0, 1.5, std::f64::consts::FRAC_PI_2);
    let goal = (5.0, 8.0);
    // Via corridors keep a local-crop margin from the world edge.
    let mut candidates = Vec::new();
    for x_via in [1.6, 2.2, 2.8, 3.4, 4.0] {
        candidates.push(via_path((start.0, start.1), x_via, goal, "via_ramp"));
    }
    for x_via in [6.0, 6.6, 7.2, 7.8, 8.4] {
        candidates.push(via_path((start.0, start.1), x_via, goal, "via_stairs"));
    }
    Scenario {
        id: STAIRS_VS_RAMP.into(),
        world: world_from(heights, 101),
        start,
        goal,
        candidates,
    }
}

/// A flat lab with a 0.9 m wall across the direct route; most candidates
/// cut straight through it, two go around.
fn lab_obstacle() -> Scenario {
    const WALL_H: f32 = 0.9;
    let mut heights = vec![0.0f32; CELLS * CELLS];
    for row in 0..CELLS {
        for col in 0..CELLS {
            let (x, y) = cell_xy(col, row);
            if (3.0..7.0).contains(&x) && (4.5..5.5).contains(&y) {
                heights[row * CELLS + col] = WALL_H;
            }
        }
    }
    let start = (5.0, 1.5, std::f64::consts::FRAC_PI_2);
    let goal = (5.0, 8.5);
    let mut candidates = Vec::new();
    for x_via in [3.4, 3.9, 4.4, 4.9, 5.4, 5.9, 6.4, 6.9] {
        candidates.push(via_path((start.0, start.1), x_via, goal, "through_wall"));
    }
    for x_via in [1.5, 8.5] {
        candidates.push(via_path((start.0, start.1), x_via, goal, "around_wall"));
    }
    Scenario {
        id: LAB_OBSTACLE.into(),
        world: world_from(heights, 102),
        start,
        goal,
        candidates,
    }
}

/// Heatmap world: a staircase rising +x to a plateau carrying a box wall,
/// flat ground elsewhere. Used for the per-embodiment affordance figures.
fn stairs_wall_flat() -> Scenario {
    const RISER: f64 = 0.1;
    const TREAD: f64 = 0.4;
    const PLATEAU: f64 = 0.7;
    const WALL_H: f64 = 0.9;
    let mut heights = vec![0.0f32; CELLS * CELLS];
    for row in 0..CELLS {
        for col in 0..CELLS {
            let (x, y) = cell_xy(col, row);
            let mut h = if x < 1.0 {
                0.0
            } else if x < 3.8 {
                let step = ((x - 1.0) / TREAD).floor().min(6.0);
                (step + 1.0) * RISER
            } else {
                PLATEAU
            };
            if (6.0..7.2).contains(&x) && (4.0..5.2).contains(&y) {
                h += WALL_H;
            }
            heights[row * CELLS + col] = h as f32;
        }
    }
    let start = (0.5, 5.0, 0.0);
    let goal = (9.0, 5.0);
    Scenario {
        id: STAIRS_WALL_FLAT.into(),
        world: world_from(heights, 103),
        start,
        goal,
        candidates: Vec::new(),
    }
}

/// World-frame regions of interest for the heatmap world.
pub mod regions {
    /// Staircase interior (x0, y0, x1, y1).
    pub const STAIRS: (f64, f64, f64, f64) = (1.3, 1.5, 3.5, 8.5);
    /// Wall footprint interior.
    pub const WALL: (f64, f64, f64, f64) = (6.1, 4.1, 7.1, 5.1);
}
