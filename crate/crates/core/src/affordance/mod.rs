//! Rollout-supervised affordance learning.
//!
//! [`collect_dataset`] turns seeded rollouts into labeled local-crop samples,
//! [`train`] fits the MLP affordance function, and [`AffordanceModel`]
//! serves point queries and heatmap grids.

mod dataset;
mod eval;
mod format;
mod mlp;
mod model;

pub use dataset::{collect_balanced, collect_dataset, CollectReport};
pub use eval::{auc_from_scores, evaluate, split_dataset, EvalReport};
pub use format::{load_model, read_afm, read_afs, save_model, write_afm, write_afs, ModelSidecar};
pub use model::{
    affordance_grid, train, AffordanceGrid, AffordanceModel, TrainConfig, TrainMode, TrainReport,
    CROP_CELLS,
};

use serde::{Deserialize, Serialize};

/// Number of discrete heading bins (45 degree spacing).
pub const HEADING_BINS: usize = 8;

/// World heading of a bin, radians.
pub fn heading_bin_angle(bin: u8) -> f64 {
    f64::from(bin) * std::f64::consts::FRAC_PI_4
}

/// Nearest training bin for a continuous heading.
pub fn snap_heading_to_bin(heading: f64) -> u8 {
    let turns = heading.rem_euclid(std::f64::consts::TAU) / std::f64::consts::FRAC_PI_4;
    (turns.round() as usize % HEADING_BINS) as u8
}

/// One supervised datum: a re-centered local crop, the normalized query
/// position inside it, the heading bin, and the rollout outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffordanceSample {
    pub crop_cells: usize,
    /// Row-major relative heights, `crop_cells` squared entries.
    pub local_map: Vec<f32>,
    pub qx: f32,
    pub qy: f32,
    pub heading_bin: u8,
    pub label: u8,
    /// Discounted return of the rollout, for the regression variant.
    pub return_value: f32,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heading_snapping_rounds_to_nearest_bin() {
        assert_eq!(snap_heading_to_bin(0.0), 0);
        assert_eq!(snap_heading_to_bin(44.0_f64.to_radians()), 1);
        assert_eq!(snap_heading_to_bin(-44.0_f64.to_radians()), 7);
        assert_eq!(snap_heading_to_bin(181.0_f64.to_radians()), 4);
        assert_eq!(snap_heading_to_bin(359.0_f64.to_radians()), 0);
        for bin in 0..HEADING_BINS as u8 {
            assert_eq!(snap_heading_to_bin(heading_bin_angle(bin)), bin);
        }
    }
}
