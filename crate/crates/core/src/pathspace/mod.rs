//! Shared path geometry: candidate paths, the pinhole camera, the
//! location-token codec, and the curvature metric.

mod camera;
mod tokens;

pub use camera::CameraModel;
pub use tokens::{
    decode_loc, encode_loc, format_goal_prompt, format_path_string, parse_goal_prompt,
    parse_path_string, GoalSpec, LOC_BINS,
};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// An ordered polyline of ground-plane waypoints, optionally carrying its
/// pixel rendering and affordance scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePath {
    /// Ground-plane waypoints in meters.
    pub world_points: Vec<(f64, f64)>,
    /// Normalized pixel rendering; `None` entries are out of frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pixel_points: Option<Vec<Option<(f64, f64)>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_point_affordance: Option<Vec<f64>>,
    /// Minimum of the per-point scores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cumulative_affordance: Option<f64>,
    /// Semantic tag for scripted candidate sets ("via_stairs", ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

impl CandidatePath {
    pub fn new(world_points: Vec<(f64, f64)>) -> Self {
        Self {
            world_points,
            pixel_points: None,
            per_point_affordance: None,
            cumulative_affordance: None,
            tag: None,
        }
    }

    pub fn tagged(world_points: Vec<(f64, f64)>, tag: &str) -> Self {
        Self {
            tag: Some(tag.to_string()),
            ..Self::new(world_points)
        }
    }

    pub fn len(&self) -> usize {
        self.world_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.world_points.is_empty()
    }

    /// Attach per-point scores and their minimum.
    pub fn with_scores(mut self, scores: Vec<f64>) -> Self {
        assert_eq!(scores.len(), self.world_points.len());
        self.cumulative_affordance =
            Some(scores.iter().cloned().fold(f64::INFINITY, f64::min));
        self.per_point_affordance = Some(scores);
        self
    }

    /// Render waypoints through a camera, marking out-of-frame points.
    ///
    /// Waypoint heights come from the caller (ground-plane z per point).
    pub fn with_pixels(mut self, camera: &CameraModel, z: impl Fn(usize) -> f64) -> Self {
        let pixels = self
            .world_points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| camera.project_to_pixel([x, y, z(i)]))
            .collect();
        self.pixel_points = Some(pixels);
        self
    }
}

/// Arc length over chord length of a polyline; 1 for straight lines.
pub fn curvature(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(CoreError::EmptyInput("curvature needs at least 2 points".into()));
    }
    let first = points[0];
    let last = points[points.len() - 1];
    let chord = dist(first, last);
    if chord == 0.0 {
        return Err(CoreError::InvalidParam(
            "curvature undefined for coincident endpoints".into(),
        ));
    }
    let arc: f64 = points.windows(2).map(|w| dist(w[0], w[1])).sum();
    Ok(arc / chord)
}

pub(crate) fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curvature_of_straight_path_is_one() {
        let c = curvature(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn curvature_of_right_angle() {
        let c = curvature(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]).unwrap();
        assert!((c - 2.0 / 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn curvature_of_semicircle_approaches_half_pi() {
        let points: Vec<(f64, f64)> = (0..=500)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / 500.0;
                (t.cos(), t.sin())
            })
            .collect();
        let c = curvature(&points).unwrap();
        assert!((c - std::f64::consts::FRAC_PI_2).abs() < 0.01, "got {c}");
    }

    #[test]
    fn curvature_rejects_degenerate_input() {
        assert!(curvature(&[(1.0, 1.0)]).is_err());
        assert!(curvature(&[(1.0, 1.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn scores_set_cumulative_to_min() {
        let path = CandidatePath::new(vec![(0.0, 0.0); 5])
            .with_scores(vec![0.9, 0.2, 0.8, 0.9, 0.9]);
        assert_eq!(path.cumulative_affordance, Some(0.2));
    }
}
