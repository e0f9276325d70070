//! Affordance modulation and the receding-horizon mission loop.

mod bench;
mod runner;
mod score;

pub use bench::{csv_table, markdown_table, run_benchmark, BenchmarkRow};
pub use runner::{
    ablate_modulation, run_mission, EpisodeResult, MissionTermination, PlannerChoice, ReplanRecord,
};
pub use score::{score_path, select_path};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Highest cumulative affordance wins (ties to the lowest index).
    Greedy,
    /// Sample proportional to exp(score / beta).
    Softmax,
}

/// Path selection configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionConfig {
    pub mode: SelectionMode,
    /// Softmax temperature.
    pub beta: f64,
    /// Candidates scoring below this are discarded before selection.
    pub theta_rej: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            mode: SelectionMode::Softmax,
            beta: 0.1,
            theta_rej: 0.3,
        }
    }
}

/// Mission loop configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MissionConfig {
    pub selection: SelectionConfig,
    /// Waypoints tracked per plan before replanning (m of k).
    pub m_execute: usize,
    /// Per-plan tracking timeout, seconds.
    pub plan_timeout_s: f64,
    /// Whole-episode cap, seconds.
    pub episode_cap_s: f64,
    /// Mission/path waypoint arrival tolerance, meters.
    pub waypoint_tolerance: f64,
    /// Rotate-in-place step, radians.
    pub rotate_increment: f64,
    /// Plans allowed per episode; `None` is unlimited within the time cap.
    pub max_plans: Option<usize>,
    /// Skip scoring and pick uniformly at random (the ablation arm).
    pub ablate_modulation: bool,
    /// Candidates requested from the sampling planner.
    pub k_candidates: usize,
    /// Camera mount height above the body, meters.
    pub camera_height: f64,
    /// Camera downward pitch, radians.
    pub camera_pitch: f64,
    pub seed: u64,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            selection: SelectionConfig::default(),
            m_execute: 3,
            plan_timeout_s: 20.0,
            episode_cap_s: 120.0,
            waypoint_tolerance: 0.5,
            rotate_increment: 30.0_f64.to_radians(),
            max_plans: None,
            ablate_modulation: false,
            k_candidates: 10,
            camera_height: 0.3,
            // Steep enough that the near-field blind radius stays inside the
            // waypoint tolerance: a goal we cannot see is one we have reached.
            camera_pitch: 30.0_f64.to_radians(),
            seed: 0,
        }
    }
}

/// Which planner feeds the mission loop.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PlannerConfig {
    /// Random arcs toward the goal.
    Sampling { spread: f64 },
    /// A registered scripted scenario's authored candidates.
    Scripted { scenario: String },
}
