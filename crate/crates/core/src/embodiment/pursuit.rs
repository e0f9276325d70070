//! Pure-pursuit tracking of a candidate path.

use super::{AgentState, Command, EmbodimentKind, EmbodimentSpec};
use crate::pathspace::{dist, CandidatePath};

/// Pure-pursuit curvature toward a target point: `2 * lateral / d^2` in the
/// robot frame.
pub fn pursuit_curvature(state: &AgentState, target: (f64, f64)) -> f64 {
    let dx = target.0 - state.x;
    let dy = target.1 - state.y;
    let (sin_h, cos_h) = state.heading.sin_cos();
    let lateral = -sin_h * dx + cos_h * dy;
    let d2 = dx * dx + dy * dy;
    if d2 < 1e-12 {
        0.0
    } else {
        2.0 * lateral / d2
    }
}

/// Track a path: the wheeled embodiment steers toward the lookahead point on
/// the path, the legged embodiment walks straight at it. Returns
/// [`Command::Stop`] once the agent is past the path end.
pub fn pure_pursuit_command(state: &AgentState, path: &CandidatePath, spec: &EmbodimentSpec) -> Command {
    let Some(target) = lookahead_point(state, &path.world_points, spec.lookahead) else {
        return Command::Stop;
    };
    match spec.kind {
        EmbodimentKind::Wheeled => {
            let kappa = pursuit_curvature(state, target);
            let steering = (kappa * spec.wheelbase)
                .atan()
                .clamp(-spec.max_steering, spec.max_steering);
            Command::Drive {
                speed: spec.speed,
                steering,
            }
        }
        EmbodimentKind::Legged => {
            let dx = target.0 - state.x;
            let dy = target.1 - state.y;
            let d = (dx * dx + dy * dy).sqrt();
            if d < 1e-9 {
                Command::Stop
            } else {
                Command::Velocity {
                    vx: spec.speed * dx / d,
                    vy: spec.speed * dy / d,
                }
            }
        }
    }
}

/// The point one lookahead distance past the agent's arc-length projection
/// onto the polyline, or `None` when the agent has passed the end.
fn lookahead_point(state: &AgentState, points: &[(f64, f64)], lookahead: f64) -> Option<(f64, f64)> {
    if points.is_empty() {
        return None;
    }
    if points.len() == 1 {
        let p = points[0];
        return if dist((state.x, state.y), p) < 1e-9 { None } else { Some(p) };
    }

    // Arc-length projection of the agent onto the path.
    let mut best = (f64::INFINITY, 0.0); // (distance^2, arc coordinate)
    let mut arc_start = 0.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let seg = (b.0 - a.0, b.1 - a.1);
        let len2 = seg.0 * seg.0 + seg.1 * seg.1;
        let t = if len2 < 1e-18 {
            0.0
        } else {
            (((state.x - a.0) * seg.0 + (state.y - a.1) * seg.1) / len2).clamp(0.0, 1.0)
        };
        let proj = (a.0 + t * seg.0, a.1 + t * seg.1);
        let d2 = (state.x - proj.0).powi(2) + (state.y - proj.1).powi(2);
        let len = len2.sqrt();
        if d2 < best.0 {
            best = (d2, arc_start + t * len);
        }
        arc_start += len;
    }
    let total = arc_start;
    let s_proj = best.1;
    if s_proj >= total - 1e-9 {
        return None;
    }
    Some(point_at_arc(points, (s_proj + lookahead).min(total)))
}

fn point_at_arc(points: &[(f64, f64)], s: f64) -> (f64, f64) {
    let mut remaining = s;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = dist(a, b);
        if remaining <= len || len == 0.0 {
            if len == 0.0 {
                continue;
            }
            let t = remaining / len;
            return (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
        }
        remaining -= len;
    }
    points[points.len() - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::{ElevationMap, TerrainFamily};

    fn agent(x: f64, y: f64, heading: f64) -> AgentState {
        let map = ElevationMap::flat(100, 100, 0.1, TerrainFamily::Composed, 0).unwrap();
        AgentState::on_terrain(&map, x, y, heading, &EmbodimentSpec::wheeled()).unwrap()
    }

    #[test]
    fn aligned_straight_path_needs_no_steering() {
        let state = agent(1.0, 5.0, 0.0);
        let path = CandidatePath::new(vec![(1.0, 5.0), (3.0, 5.0), (5.0, 5.0)]);
        match pure_pursuit_command(&state, &path, &EmbodimentSpec::wheeled()) {
            Command::Drive { steering, .. } => assert!(steering.abs() < 1e-9),
            other => panic!("expected drive, got {other:?}"),
        }
    }

    #[test]
    fn lateral_target_gives_two_over_distance_curvature() {
        let state = agent(1.0, 5.0, 0.0);
        let lookahead = 0.6;
        // Target exactly 90 degrees to the left at the lookahead distance.
        let kappa = pursuit_curvature(&state, (1.0, 5.0 + lookahead));
        assert!((kappa - 2.0 / lookahead).abs() < 1e-9, "kappa {kappa}");
    }

    #[test]
    fn past_path_end_signals_completion() {
        let state = agent(6.0, 5.0, 0.0);
        let path = CandidatePath::new(vec![(1.0, 5.0), (3.0, 5.0), (5.0, 5.0)]);
        assert_eq!(
            pure_pursuit_command(&state, &path, &EmbodimentSpec::wheeled()),
            Command::Stop
        );
        let empty = CandidatePath::new(vec![]);
        assert_eq!(
            pure_pursuit_command(&state, &empty, &EmbodimentSpec::wheeled()),
            Command::Stop
        );
    }

    #[test]
    fn legged_command_points_at_lookahead() {
        let state = agent(1.0, 5.0, 0.0);
        let path = CandidatePath::new(vec![(1.0, 5.0), (1.0, 8.0)]);
        match pure_pursuit_command(&state, &path, &EmbodimentSpec::legged()) {
            Command::Velocity { vx, vy } => {
                assert!(vx.abs() < 1e-9);
                assert!((vy - 1.0).abs() < 1e-9);
            }
            other => panic!("expected velocity, got {other:?}"),
        }
    }
}
