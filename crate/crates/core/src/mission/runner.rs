//! The receding-horizon mission state machine.
//!
//! PLAN projects the current mission waypoint into the camera (rotating in
//! place until it is in frame), requests K candidates, scores and selects
//! one; TRACK follows the first m path waypoints with the embodiment
//! controller until arrival or the per-plan timeout; the loop repeats until
//! the waypoint queue empties, the agent falls, or the episode cap lapses.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::score::{score_path, select_path};
use super::{MissionConfig, PlannerConfig};
use crate::affordance::AffordanceModel;
use crate::embodiment::{
    fall_terminated, pure_pursuit_command, step_agent, AgentState, Command, EmbodimentSpec, DT,
};
use crate::error::{CoreError, Result};
use crate::pathspace::{CameraModel, CandidatePath};
use crate::planner::{sample_candidates, PlannerRequest};
use crate::scenario;
use crate::seeds;
use crate::terrain::ElevationMap;

/// Rotate-in-place rate, rad/s (charged against the episode clock).
const YAW_RATE: f64 = 1.5;
/// A tracking phase ending with less net displacement than this counts as a
/// stalled plan (an intervention in the episode report).
const MIN_TRACK_PROGRESS: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissionTermination {
    GoalReached,
    Fall,
    TimeCap,
    RotateExhausted,
    PlansExhausted,
}

/// What the planner proposed at one replan, and what was chosen.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplanRecord {
    pub at: (f64, f64),
    pub rotations_before: usize,
    /// Candidates as evaluated (scored unless the run is ablated).
    pub candidates: Vec<CandidatePath>,
    /// Index into `candidates`; `None` when everything fell below the
    /// rejection threshold.
    pub chosen: Option<usize>,
}

/// The chosen candidate's tag at the first replan, if any.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlannerChoice {
    pub tag: Option<String>,
    pub index: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub success: bool,
    pub termination: MissionTermination,
    pub trace: Vec<AgentState>,
    pub replans: Vec<ReplanRecord>,
    pub steps: usize,
    pub sim_time: f64,
    /// Stalled tracking phases (no net progress before the plan timeout).
    pub interventions: usize,
}

impl EpisodeResult {
    /// Tag of the candidate executed first, for choice accounting.
    pub fn first_choice(&self) -> Option<PlannerChoice> {
        self.replans.iter().find_map(|r| {
            r.chosen.map(|i| PlannerChoice {
                tag: r.candidates[i].tag.clone(),
                index: i,
            })
        })
    }
}

/// Run one mission episode.
///
/// `model` is required unless `config.ablate_modulation` is set; the ablated
/// arm picks uniformly at random among the raw candidates.
pub fn run_mission(
    world: &ElevationMap,
    spec: &EmbodimentSpec,
    planner: &PlannerConfig,
    model: Option<&AffordanceModel>,
    start: (f64, f64, f64),
    waypoints: &[(f64, f64)],
    config: &MissionConfig,
) -> Result<EpisodeResult> {
    if waypoints.is_empty() {
        return Err(CoreError::EmptyInput("mission needs at least one waypoint".into()));
    }
    if !config.ablate_modulation && model.is_none() {
        return Err(CoreError::InvalidParam(
            "modulated missions need an affordance model".into(),
        ));
    }
    spec.validate()?;

    let mut state = AgentState::on_terrain(world, start.0, start.1, start.2, spec)?;
    let mut queue: VecDeque<(f64, f64)> = waypoints.iter().copied().collect();
    let mut trace = vec![state];
    let mut replans: Vec<ReplanRecord> = Vec::new();
    let mut interventions = 0usize;
    let mut plans_used = 0usize;
    let mut select_rng = seeds::stream_rng(config.seed, "mission/select");
    let max_rotations = (std::f64::consts::TAU / config.rotate_increment).ceil() as usize;

    let finish = |success, termination, trace: Vec<AgentState>, replans, interventions| {
        let last_t = trace.last().map_or(0.0, |s| s.t);
        Ok(EpisodeResult {
            success,
            termination,
            steps: trace.len(),
            sim_time: last_t,
            trace,
            replans,
            interventions,
        })
    };

    'mission: loop {
        // Consume any waypoint we are already standing on.
        while let Some(&goal) = queue.front() {
            if planar_dist(&state, goal) <= config.waypoint_tolerance {
                queue.pop_front();
            } else {
                break;
            }
        }
        let Some(&goal) = queue.front() else {
            return finish(true, MissionTermination::GoalReached, trace, replans, interventions);
        };

        // ROTATE until the goal projects into the frame.
        let mut rotations = 0usize;
        loop {
            if state.t >= config.episode_cap_s {
                return finish(false, MissionTermination::TimeCap, trace, replans, interventions);
            }
            if goal_in_frame(world, &state, goal, config) {
                break;
            }
            if rotations >= max_rotations {
                return finish(
                    false,
                    MissionTermination::RotateExhausted,
                    trace,
                    replans,
                    interventions,
                );
            }
            let bearing = (goal.1 - state.y).atan2(goal.0 - state.x);
            let diff = wrap_angle(bearing - state.heading);
            state.heading = wrap_angle(state.heading + config.rotate_increment * diff.signum());
            state.t += config.rotate_increment / YAW_RATE;
            rotations += 1;
            trace.push(state);
        }

        // PLAN: request, score, select.
        if let Some(max_plans) = config.max_plans {
            if plans_used >= max_plans {
                return finish(
                    false,
                    MissionTermination::PlansExhausted,
                    trace,
                    replans,
                    interventions,
                );
            }
        }
        plans_used += 1;
        let raw = match planner {
            PlannerConfig::Sampling { spread } => {
                let mut req = PlannerRequest::new(
                    (state.x, state.y, state.heading),
                    goal,
                    config.k_candidates,
                    seeds::derive(config.seed, &format!("mission/plan-{plans_used}")),
                );
                req.spread = *spread;
                sample_candidates(&req)?
            }
            PlannerConfig::Scripted { scenario } => scenario::build(scenario)?.candidates,
        };

        let (candidates, chosen) = if config.ablate_modulation {
            let idx = select_rng.gen_range(0..raw.len());
            (raw, Some(idx))
        } else {
            let model = model.expect("checked above");
            let scored = raw
                .iter()
                .map(|p| score_path(model, world, p))
                .collect::<Result<Vec<_>>>()?;
            match select_path(&scored, &config.selection, &mut select_rng) {
                Ok(idx) => (scored, Some(idx)),
                Err(CoreError::NoFeasiblePlan) => (scored, None),
                Err(other) => return Err(other),
            }
        };
        replans.push(ReplanRecord {
            at: (state.x, state.y),
            rotations_before: rotations,
            candidates: candidates.clone(),
            chosen,
        });
        let Some(chosen) = chosen else {
            // Nothing feasible: rotate a step and replan.
            state.heading = wrap_angle(state.heading + config.rotate_increment);
            state.t += config.rotate_increment / YAW_RATE;
            trace.push(state);
            continue 'mission;
        };

        // TRACK the first m waypoints of the chosen path.
        let full = &candidates[chosen].world_points;
        let m = config.m_execute.clamp(1, full.len());
        let tracked = CandidatePath::new(full[..m].to_vec());
        let track_end = tracked.world_points[m - 1];
        let track_start_pos = (state.x, state.y);
        let track_start_t = state.t;
        loop {
            if state.t >= config.episode_cap_s {
                return finish(false, MissionTermination::TimeCap, trace, replans, interventions);
            }
            if state.t - track_start_t >= config.plan_timeout_s {
                if planar_dist_xy(track_start_pos, (state.x, state.y)) < MIN_TRACK_PROGRESS {
                    interventions += 1;
                }
                continue 'mission;
            }
            let command = pure_pursuit_command(&state, &tracked, spec);
            if command == Command::Stop {
                continue 'mission;
            }
            state = step_agent(&state, spec, &command, world, DT);
            trace.push(state);
            if fall_terminated(&state) {
                return finish(false, MissionTermination::Fall, trace, replans, interventions);
            }
            if planar_dist(&state, goal) <= config.waypoint_tolerance {
                queue.pop_front();
                continue 'mission;
            }
            if planar_dist(&state, track_end) <= config.waypoint_tolerance {
                continue 'mission;
            }
        }
    }
}

/// Run the mission with selection bypassed: uniform choice among raw
/// candidates, for A/B benchmarking against the modulated arm.
pub fn ablate_modulation(
    world: &ElevationMap,
    spec: &EmbodimentSpec,
    planner: &PlannerConfig,
    start: (f64, f64, f64),
    waypoints: &[(f64, f64)],
    config: &MissionConfig,
) -> Result<EpisodeResult> {
    let mut ablated = config.clone();
    ablated.ablate_modulation = true;
    run_mission(world, spec, planner, None, start, waypoints, &ablated)
}

fn goal_in_frame(
    world: &ElevationMap,
    state: &AgentState,
    goal: (f64, f64),
    config: &MissionConfig,
) -> bool {
    let camera = CameraModel::standard(
        [state.x, state.y, state.z + config.camera_height],
        state.heading,
        config.camera_pitch,
    );
    let goal_z = world.height_at(goal.0, goal.1).unwrap_or(0.0);
    camera.project_to_pixel([goal.0, goal.1, goal_z]).is_some()
}

fn planar_dist(state: &AgentState, p: (f64, f64)) -> f64 {
    planar_dist_xy((state.x, state.y), p)
}

fn planar_dist_xy(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
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
