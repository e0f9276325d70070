//! Kinematic embodiment surrogates and the rollout engine.
//!
//! The legged agent is holonomic (commanded as a planar velocity); the
//! wheeled agent follows a kinematic bicycle model driven by pure pursuit.
//! Both terrain-follow on the elevation map, with height transitions gated
//! by per-embodiment admissibility thresholds. Rollouts terminate on the
//! wall rule (realized velocity projected on the command falling below a
//! threshold), the fall rule (vertical speed / tilt), horizon completion,
//! or a time cap.

mod kinematics;
mod pursuit;
mod rollout;

pub use kinematics::step_agent;
pub use pursuit::{pure_pursuit_command, pursuit_curvature};
pub use rollout::{fall_terminated, rollout, wall_terminated, write_trace_jsonl, RolloutOutcome, Termination};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::terrain::ElevationMap;

/// Integration step, seconds.
pub const DT: f64 = 0.05;
/// Wall-termination threshold on realized speed along the command, m/s.
pub const WALL_TAU: f64 = 0.3;
/// Wall terminations are suppressed for this initial acceleration window.
pub const WALL_GRACE: f64 = 0.5;
/// Fall when vertical velocity drops below this, m/s.
pub const FALL_VZ: f64 = -1.0;
/// Fall when |roll| or |pitch| exceeds this, radians (45 degrees).
pub const FALL_TILT: f64 = std::f64::consts::FRAC_PI_4;
/// Discount for the regression-variant return.
pub const GAMMA: f64 = 0.99;
/// Default commanded travel distance for data-collection rollouts, meters.
/// Kept inside the local-crop half extent so a sample's label is a function
/// of terrain the model can actually see.
pub const ROLLOUT_HORIZON_M: f64 = 1.2;
/// Rollout time cap, seconds.
pub const ROLLOUT_TIME_CAP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbodimentKind {
    Legged,
    Wheeled,
}

/// Capability thresholds and controller geometry for one embodiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbodimentSpec {
    pub kind: EmbodimentKind,
    /// Largest discrete rise mountable in one transition, meters.
    pub max_step_up: f64,
    /// Largest supported drop, meters; anything taller is a fall.
    pub max_step_down: f64,
    /// Steepest traversable sustained gradient (rise/run).
    pub max_slope: f64,
    /// Commanded travel speed, m/s.
    pub speed: f64,
    /// Body height above ground contact, meters.
    pub ride_height: f64,
    /// Bicycle wheelbase, meters (wheeled).
    pub wheelbase: f64,
    /// Steering angle limit, radians (wheeled).
    pub max_steering: f64,
    /// Pure-pursuit lookahead distance, meters (wheeled).
    pub lookahead: f64,
}

impl Default for EmbodimentSpec {
    fn default() -> Self {
        Self::legged()
    }
}

impl EmbodimentSpec {
    /// Quadruped surrogate: steps onto risers up to 0.20 m.
    pub fn legged() -> Self {
        Self {
            kind: EmbodimentKind::Legged,
            max_step_up: 0.20,
            max_step_down: 0.25,
            max_slope: 0.6,
            speed: 1.0,
            ride_height: 0.5,
            wheelbase: 0.0,
            max_steering: 0.0,
            lookahead: 0.6,
        }
    }

    /// Rover surrogate: mounts only small lips, needs gentle slopes.
    pub fn wheeled() -> Self {
        Self {
            kind: EmbodimentKind::Wheeled,
            max_step_up: 0.05,
            max_step_down: 0.12,
            max_slope: 0.35,
            speed: 1.0,
            ride_height: 0.2,
            wheelbase: 0.3,
            max_steering: 0.5,
            lookahead: 0.6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("max_step_up", self.max_step_up),
            ("max_step_down", self.max_step_down),
            ("max_slope", self.max_slope),
            ("speed", self.speed),
            ("ride_height", self.ride_height),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CoreError::InvalidParam(format!("{name} must be positive, got {v}")));
            }
        }
        if self.kind == EmbodimentKind::Wheeled && !(self.wheelbase > 0.0 && self.lookahead > 0.0) {
            return Err(CoreError::InvalidParam(
                "wheeled spec needs positive wheelbase and lookahead".into(),
            ));
        }
        Ok(())
    }
}

/// Embodiment-agnostic kinematic state advanced by [`step_agent`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AgentState {
    pub x: f64,
    pub y: f64,
    /// Terrain-following body height (ground + ride height when upright).
    pub z: f64,
    pub heading: f64,
    /// Realized planar velocity over the last step, m/s.
    pub v_planar: (f64, f64),
    /// Smoothed vertical rate; set to ballistic impact speed on
    /// unsupported drops.
    pub v_z: f64,
    pub roll: f64,
    pub pitch: f64,
    pub t: f64,
}

impl AgentState {
    /// An at-rest state standing on the terrain.
    pub fn on_terrain(map: &ElevationMap, x: f64, y: f64, heading: f64, spec: &EmbodimentSpec) -> Result<Self> {
        let ground = map.height_at(x, y)?;
        Ok(Self {
            x,
            y,
            z: ground + spec.ride_height,
            heading,
            v_planar: (0.0, 0.0),
            v_z: 0.0,
            roll: 0.0,
            pitch: 0.0,
            t: 0.0,
        })
    }

    pub fn position(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    pub fn speed(&self) -> f64 {
        (self.v_planar.0.powi(2) + self.v_planar.1.powi(2)).sqrt()
    }
}

/// A low-level command for one integration step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Command {
    /// World-frame velocity (legged).
    Velocity { vx: f64, vy: f64 },
    /// Forward speed and steering angle (wheeled bicycle model).
    Drive { speed: f64, steering: f64 },
    /// No motion; the tracker reached the end of its path.
    Stop,
}

impl Command {
    /// The commanded planar velocity vector this step.
    pub fn commanded_velocity(&self, heading: f64) -> (f64, f64) {
        match *self {
            Command::Velocity { vx, vy } => (vx, vy),
            Command::Drive { speed, .. } => (speed * heading.cos(), speed * heading.sin()),
            Command::Stop => (0.0, 0.0),
        }
    }
}
