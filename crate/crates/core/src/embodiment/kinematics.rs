//! One integration step of the terrain-following kinematic surrogate.

use super::{AgentState, Command, EmbodimentKind, EmbodimentSpec};
use crate::terrain::ElevationMap;

/// Probe distance ahead of the agent used to size discrete steps, meters.
const PROBE_WINDOW: f64 = 0.15;
/// Sample spacing inside the probe window, meters.
const PROBE_STEP: f64 = 0.025;
/// Differencing span for body tilt, meters (about one support length).
const SUPPORT_SPAN: f64 = 0.4;
/// Time constant of the vertical-rate filter, seconds: the body does not
/// teleport down a riser in one integration step.
const VZ_TIME_CONSTANT: f64 = 0.25;
const GRAVITY: f64 = 9.81;

/// Advance the agent by one step of `dt` seconds.
///
/// Planar motion follows the embodiment kinematics. A climb is admissible
/// when the per-step gradient stays under `max_slope`, or when the local
/// rise over the probe window fits `max_step_up` (a mountable step); an
/// inadmissible climb cancels the planar motion ("pushing against a wall").
/// Descents always move; drops taller than `max_step_down` over the probe
/// window are unsupported and set the vertical rate to the ballistic impact
/// speed, which the fall rule then catches. Out-of-map motion clamps in
/// place like a wall.
pub fn step_agent(
    state: &AgentState,
    spec: &EmbodimentSpec,
    command: &Command,
    map: &ElevationMap,
    dt: f64,
) -> AgentState {
    let mut next = *state;
    next.t = state.t + dt;

    // Kinematics: candidate planar displacement.
    let (cvx, cvy) = commanded(spec, command, state.heading);
    let (nx, ny) = (state.x + cvx * dt, state.y + cvy * dt);

    // Wheeled heading integrates the bicycle model regardless of blockage.
    if spec.kind == EmbodimentKind::Wheeled {
        if let Command::Drive { speed, steering } = *command {
            let steer = steering.clamp(-spec.max_steering, spec.max_steering);
            let v = speed.clamp(-spec.speed, spec.speed);
            next.heading = wrap_angle(state.heading + v / spec.wheelbase * steer.tan() * dt);
        }
    }

    let moved = ((nx - state.x).powi(2) + (ny - state.y).powi(2)).sqrt();
    if moved < 1e-12 {
        next.v_planar = (0.0, 0.0);
        next.v_z = filter_vz(state.v_z, 0.0, dt);
        return next;
    }
    let dir = ((nx - state.x) / moved, (ny - state.y) / moved);

    if !map.contains(nx, ny) {
        // Wall-like blockage at the world edge.
        next.v_planar = (0.0, 0.0);
        next.v_z = filter_vz(state.v_z, 0.0, dt);
        return next;
    }

    let h_old = ground(map, state.x, state.y);
    let h_new = ground(map, nx, ny);
    let dz = h_new - h_old;

    if dz > 1e-9 {
        let slope = dz / moved;
        let step_rise = probe_extreme(map, state.x, state.y, dir, h_old).0;
        let admissible = slope <= spec.max_slope || step_rise <= spec.max_step_up;
        if !admissible {
            next.v_planar = (0.0, 0.0);
            next.v_z = filter_vz(state.v_z, 0.0, dt);
            return next;
        }
        next.v_z = filter_vz(state.v_z, dz / dt, dt);
    } else {
        let drop = -dz;
        let supported =
            drop / moved <= spec.max_slope || probe_extreme(map, state.x, state.y, dir, h_old).1 <= spec.max_step_down;
        if supported {
            next.v_z = filter_vz(state.v_z, dz / dt, dt);
        } else {
            // Unsupported drop: ballistic impact from the local edge height.
            let fall_h = probe_extreme(map, state.x, state.y, dir, h_old).1;
            next.v_z = -(2.0 * GRAVITY * fall_h).sqrt();
        }
    }

    next.x = nx;
    next.y = ny;
    next.z = h_new + spec.ride_height;
    next.v_planar = ((nx - state.x) / dt, (ny - state.y) / dt);
    if spec.kind == EmbodimentKind::Legged {
        next.heading = dir.1.atan2(dir.0);
    }

    let (pitch, roll) = body_tilt(map, spec, nx, ny, dir, h_new);
    next.pitch = pitch;
    next.roll = roll;
    next
}

fn commanded(spec: &EmbodimentSpec, command: &Command, heading: f64) -> (f64, f64) {
    match *command {
        Command::Velocity { vx, vy } => {
            let mag = (vx * vx + vy * vy).sqrt();
            if mag > spec.speed {
                let k = spec.speed / mag;
                (vx * k, vy * k)
            } else {
                (vx, vy)
            }
        }
        Command::Drive { speed, .. } => {
            let v = speed.clamp(-spec.speed, spec.speed);
            (v * heading.cos(), v * heading.sin())
        }
        Command::Stop => (0.0, 0.0),
    }
}

fn filter_vz(prev: f64, raw: f64, dt: f64) -> f64 {
    let alpha = (dt / VZ_TIME_CONSTANT).min(1.0);
    prev + alpha * (raw - prev)
}

/// Height lookup clamped into the map extent.
fn ground(map: &ElevationMap, x: f64, y: f64) -> f64 {
    let (ox, oy) = map.origin();
    let (ex, ey) = map.extent();
    let eps = map.resolution() * 1e-6;
    let cx = x.clamp(ox, ox + ex - eps);
    let cy = y.clamp(oy, oy + ey - eps);
    map.height_at(cx, cy).expect("clamped point is inside the map")
}

/// Max rise and max drop relative to `h_here` over the probe window ahead.
fn probe_extreme(map: &ElevationMap, x: f64, y: f64, dir: (f64, f64), h_here: f64) -> (f64, f64) {
    let mut rise: f64 = 0.0;
    let mut drop: f64 = 0.0;
    let mut tau = PROBE_STEP;
    while tau <= PROBE_WINDOW + 1e-12 {
        let h = ground(map, x + tau * dir.0, y + tau * dir.1);
        rise = rise.max(h - h_here);
        drop = drop.max(h_here - h);
        tau += PROBE_STEP;
    }
    (rise, drop)
}

/// Tilt from central differences over the support span, along and across the
/// motion direction. Sampled heights are clamped to what the supports can
/// actually stand on, so a wall face ahead reads as blockage, not as tilt.
fn body_tilt(
    map: &ElevationMap,
    spec: &EmbodimentSpec,
    x: f64,
    y: f64,
    dir: (f64, f64),
    h_center: f64,
) -> (f64, f64) {
    let half = SUPPORT_SPAN / 2.0;
    let reach = |px: f64, py: f64| {
        ground(map, px, py).clamp(h_center - spec.max_step_down, h_center + spec.max_step_up)
    };
    let ahead = reach(x + half * dir.0, y + half * dir.1);
    let behind = reach(x - half * dir.0, y - half * dir.1);
    let left = reach(x - half * dir.1, y + half * dir.0);
    let right = reach(x + half * dir.1, y - half * dir.0);
    let pitch = ((ahead - behind) / SUPPORT_SPAN).atan();
    let roll = ((left - right) / SUPPORT_SPAN).atan();
    (pitch, roll)
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a % std::f64::consts::TAU;
    if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    } else if a < -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    }
    a
}
