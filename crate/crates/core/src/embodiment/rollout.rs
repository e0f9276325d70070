//! Fixed-direction rollouts with the wall/fall termination rules.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{
    step_agent, AgentState, Command, EmbodimentKind, EmbodimentSpec, DT, FALL_TILT, FALL_VZ,
    GAMMA, ROLLOUT_TIME_CAP, WALL_GRACE, WALL_TAU,
};
use crate::error::{CoreError, Result};
use crate::terrain::ElevationMap;

/// Why a rollout ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Wall,
    Fall,
    Timeout,
}

/// The outcome of one rollout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RolloutOutcome {
    pub success: bool,
    pub termination: Termination,
    pub trace: Vec<AgentState>,
    /// Discounted return for the regression variant: -gamma^(steps - 1) on a
    /// failure termination, 0 otherwise.
    pub return_value: f64,
}

/// Wall termination: after the grace window, the realized velocity projected
/// onto the commanded direction has fallen below `tau`.
pub fn wall_terminated(
    v_r: (f64, f64),
    v_c: (f64, f64),
    tau: f64,
    t: f64,
    grace: f64,
) -> Result<bool> {
    let norm = (v_c.0 * v_c.0 + v_c.1 * v_c.1).sqrt();
    if norm == 0.0 {
        return Err(CoreError::InvalidParam(
            "wall termination undefined for zero commanded velocity".into(),
        ));
    }
    Ok(t >= grace && (v_r.0 * v_c.0 + v_r.1 * v_c.1) / norm < tau)
}

/// Fall termination: vertical speed below -1 m/s, or roll/pitch beyond 45
/// degrees (strict inequalities).
pub fn fall_terminated(state: &AgentState) -> bool {
    state.v_z < FALL_VZ || state.roll.abs() > FALL_TILT || state.pitch.abs() > FALL_TILT
}

/// Drive the agent a fixed planar distance in one direction.
///
/// The legged agent holds a constant velocity command toward `direction`;
/// the wheeled agent drives a straight line (heading reset to `direction`
/// at the start, zero steering). Ends on completion of `horizon_m` realized
/// travel, wall termination, fall termination, or the time cap.
pub fn rollout(
    map: &ElevationMap,
    spec: &EmbodimentSpec,
    start: &AgentState,
    direction: f64,
    horizon_m: f64,
) -> RolloutOutcome {
    let mut state = *start;
    state.heading = direction;
    let command = match spec.kind {
        EmbodimentKind::Legged => Command::Velocity {
            vx: spec.speed * direction.cos(),
            vy: spec.speed * direction.sin(),
        },
        EmbodimentKind::Wheeled => Command::Drive {
            speed: spec.speed,
            steering: 0.0,
        },
    };
    let v_c = command.commanded_velocity(direction);

    let mut trace = vec![state];
    let mut traveled = 0.0;
    let mut steps = 0u32;
    let termination = loop {
        let next = step_agent(&state, spec, &command, map, DT);
        steps += 1;
        traveled += ((next.x - state.x).powi(2) + (next.y - state.y).powi(2)).sqrt();
        state = next;
        trace.push(state);

        if fall_terminated(&state) {
            break Termination::Fall;
        }
        if wall_terminated(state.v_planar, v_c, WALL_TAU, state.t, WALL_GRACE)
            .expect("non-zero command")
        {
            break Termination::Wall;
        }
        if traveled >= horizon_m {
            break Termination::Completed;
        }
        if state.t >= ROLLOUT_TIME_CAP {
            break Termination::Timeout;
        }
    };

    let failed = matches!(termination, Termination::Wall | Termination::Fall);
    RolloutOutcome {
        success: termination == Termination::Completed,
        termination,
        trace,
        return_value: if failed {
            -GAMMA.powi(steps.saturating_sub(1) as i32)
        } else {
            0.0
        },
    }
}

/// One JSON record per trace state, for debugging.
pub fn write_trace_jsonl<W: Write>(trace: &[AgentState], mut w: W) -> Result<()> {
    for state in trace {
        serde_json::to_writer(&mut w, state)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
