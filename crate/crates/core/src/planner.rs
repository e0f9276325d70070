//! Candidate-path generators standing in for the high-level planner.
//!
//! The sampling planner draws K quadratic arcs toward the goal with random
//! lateral spread; the scripted planner replays authored scenario fixtures.
//! Neither reads the elevation map: feasibility is entirely the affordance
//! stage's job.

use crate::error::{CoreError, Result};
use crate::pathspace::{CameraModel, CandidatePath};
use crate::scenario;
use crate::seeds;

/// Waypoints per candidate path.
pub const PATH_WAYPOINTS: usize = 5;

/// A request for candidate paths from the robot pose toward a goal.
#[derive(Debug, Clone)]
pub struct PlannerRequest {
    /// Robot pose (x, y, heading).
    pub robot: (f64, f64, f64),
    pub goal: (f64, f64),
    /// Number of candidates (K).
    pub k_candidates: usize,
    /// Lateral spread of the sampled mid control point, meters.
    pub spread: f64,
    /// Goals beyond this radius are rejected.
    pub planning_radius: f64,
    /// Camera for optional pixel renderings of the candidates.
    pub camera: Option<CameraModel>,
    pub seed: u64,
}

impl PlannerRequest {
    pub fn new(robot: (f64, f64, f64), goal: (f64, f64), k_candidates: usize, seed: u64) -> Self {
        Self {
            robot,
            goal,
            k_candidates,
            spread: 1.5,
            planning_radius: 30.0,
            camera: None,
            seed,
        }
    }
}

/// Sample K candidate arcs toward the goal.
///
/// Each candidate is a quadratic Bezier from the robot position to the goal
/// whose mid control point carries a Normal(0, spread) lateral offset,
/// resampled to five waypoints. Deterministic given the request seed. When a
/// camera is supplied, pixel renderings are attached; candidates whose
/// points all fall out of frame stay world-only.
pub fn sample_candidates(req: &PlannerRequest) -> Result<Vec<CandidatePath>> {
    if req.k_candidates == 0 {
        return Err(CoreError::InvalidParam("K must be >= 1".into()));
    }
    let (rx, ry, _) = req.robot;
    let dx = req.goal.0 - rx;
    let dy = req.goal.1 - ry;
    let dist = (dx * dx + dy * dy).sqrt();
    if dist < 1e-9 {
        return Err(CoreError::InvalidParam("goal coincides with the robot".into()));
    }
    if dist > req.planning_radius {
        return Err(CoreError::InvalidParam(format!(
            "goal {dist:.1} m away exceeds the {:.1} m planning radius",
            req.planning_radius
        )));
    }
    let perp = (-dy / dist, dx / dist);
    let mid = ((rx + req.goal.0) / 2.0, (ry + req.goal.1) / 2.0);

    let mut rng = seeds::stream_rng(req.seed, "planner/offsets");
    let mut candidates = Vec::with_capacity(req.k_candidates);
    for _ in 0..req.k_candidates {
        let offset = seeds::normal_sample(&mut rng) * req.spread;
        let ctrl = (mid.0 + offset * perp.0, mid.1 + offset * perp.1);
        let points: Vec<(f64, f64)> = (0..PATH_WAYPOINTS)
            .map(|i| {
                let t = i as f64 / (PATH_WAYPOINTS - 1) as f64;
                bezier2((rx, ry), ctrl, req.goal, t)
            })
            .collect();
        let mut path = CandidatePath::new(points);
        if let Some(cam) = &req.camera {
            path = path.with_pixels(cam, |_| 0.0);
            if path
                .pixel_points
                .as_ref()
                .is_some_and(|px| px.iter().all(Option::is_none))
            {
                path.pixel_points = None;
            }
        }
        candidates.push(path);
    }
    Ok(candidates)
}

fn bezier2(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64), t: f64) -> (f64, f64) {
    let u = 1.0 - t;
    (
        u * u * p0.0 + 2.0 * u * t * p1.0 + t * t * p2.0,
        u * u * p0.1 + 2.0 * u * t * p1.1 + t * t * p2.1,
    )
}

/// The authored candidate set of a scenario, expressed in the robot frame.
///
/// Fixtures are authored in world coordinates; the robot-frame view is what
/// a planner at that pose would emit. At the identity pose the fixture comes
/// back unchanged.
pub fn scripted_candidates(scenario_id: &str, robot: (f64, f64, f64)) -> Result<Vec<CandidatePath>> {
    let scenario = scenario::build(scenario_id)?;
    let (rx, ry, heading) = robot;
    let (sin_h, cos_h) = heading.sin_cos();
    Ok(scenario
        .candidates
        .into_iter()
        .map(|mut path| {
            for p in &mut path.world_points {
                let dx = p.0 - rx;
                let dy = p.1 - ry;
                *p = (cos_h * dx + sin_h * dy, -sin_h * dx + cos_h * dy);
            }
            path
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hausdorff(a: &CandidatePath, b: &CandidatePath) -> f64 {
        let one_way = |p: &CandidatePath, q: &CandidatePath| {
            p.world_points
                .iter()
                .map(|&x| {
                    q.world_points
                        .iter()
                        .map(|&y| crate::pathspace::dist(x, y))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        one_way(a, b).max(one_way(b, a))
    }

    #[test]
    fn zero_spread_collapses_to_straight_line() {
        let mut req = PlannerRequest::new((1.0, 1.0, 0.0), (6.0, 1.0), 4, 9);
        req.spread = 0.0;
        let candidates = sample_candidates(&req).unwrap();
        for c in &candidates {
            assert_eq!(c.world_points, candidates[0].world_points);
            for p in &c.world_points {
                assert!((p.1 - 1.0).abs() < 1e-12, "straight path stays on the axis");
            }
        }
    }

    #[test]
    fn candidates_start_at_robot_and_end_at_goal() {
        let req = PlannerRequest::new((2.0, 3.0, 0.5), (7.0, 3.0), 10, 4);
        let candidates = sample_candidates(&req).unwrap();
        assert_eq!(candidates.len(), 10);
        for c in &candidates {
            assert_eq!(c.len(), PATH_WAYPOINTS);
            let first = c.world_points[0];
            let last = c.world_points[PATH_WAYPOINTS - 1];
            assert!(crate::pathspace::dist(first, (2.0, 3.0)) < 1e-12);
            assert!(crate::pathspace::dist(last, (7.0, 3.0)) < 0.5);
        }
    }

    #[test]
    fn same_seed_replays_identically() {
        let req = PlannerRequest::new((0.0, 0.0, 0.0), (5.0, 2.0), 6, 77);
        assert_eq!(sample_candidates(&req).unwrap(), sample_candidates(&req).unwrap());
        let mut other = req.clone();
        other.seed = 78;
        assert_ne!(sample_candidates(&req).unwrap(), sample_candidates(&other).unwrap());
    }

    #[test]
    fn positive_spread_gives_diverse_candidates() {
        for seed in 0..20 {
            let req = PlannerRequest::new((0.0, 0.0, 0.0), (6.0, 0.0), 8, seed);
            let candidates = sample_candidates(&req).unwrap();
            let max_gap = candidates
                .iter()
                .flat_map(|a| candidates.iter().map(move |b| hausdorff(a, b)))
                .fold(0.0, f64::max);
            assert!(max_gap > 0.2, "seed {seed}: candidates too similar ({max_gap})");
        }
    }

    #[test]
    fn rejects_degenerate_requests() {
        assert!(sample_candidates(&PlannerRequest::new((1.0, 1.0, 0.0), (1.0, 1.0), 3, 0)).is_err());
        let mut req = PlannerRequest::new((0.0, 0.0, 0.0), (50.0, 0.0), 3, 0);
        req.planning_radius = 30.0;
        assert!(sample_candidates(&req).is_err());
        assert!(sample_candidates(&PlannerRequest::new((0.0, 0.0, 0.0), (5.0, 0.0), 0, 0)).is_err());
    }

    #[test]
    fn scripted_identity_pose_returns_fixture_unchanged() {
        let fixture = crate::scenario::build(crate::scenario::STAIRS_VS_RAMP).unwrap();
        let got = scripted_candidates(crate::scenario::STAIRS_VS_RAMP, (0.0, 0.0, 0.0)).unwrap();
        assert_eq!(got, fixture.candidates);
    }

    #[test]
    fn scripted_transform_is_rigid() {
        let robot = (5.0, 1.5, std::f64::consts::FRAC_PI_2);
        let got = scripted_candidates(crate::scenario::STAIRS_VS_RAMP, robot).unwrap();
        // The first waypoint of every path is the scenario start, which is
        // the robot position here, so it maps to the origin.
        for c in &got {
            assert!(c.world_points[0].0.abs() < 1e-9);
            assert!(c.world_points[0].1.abs() < 1e-9);
        }
        assert!(scripted_candidates("nope", robot).is_err());
    }

    #[test]
    fn camera_rendering_marks_visible_points() {
        let mut req = PlannerRequest::new((0.0, 0.0, 0.0), (5.0, 0.0), 3, 1);
        req.camera = Some(CameraModel::standard([0.0, 0.0, 0.6], 0.0, 0.3));
        let candidates = sample_candidates(&req).unwrap();
        assert!(candidates.iter().any(|c| c
            .pixel_points
            .as_ref()
            .is_some_and(|px| px.iter().any(Option::is_some))));

        // Goal behind the camera: world-only candidates.
        let mut behind = PlannerRequest::new((0.0, 0.0, 0.0), (-5.0, 0.0), 3, 1);
        behind.camera = Some(CameraModel::standard([0.0, 0.0, 0.6], 0.0, 0.3));
        behind.spread = 0.0;
        let candidates = sample_candidates(&behind).unwrap();
        for c in &candidates {
            assert!(c.pixel_points.is_none());
        }
    }
}
