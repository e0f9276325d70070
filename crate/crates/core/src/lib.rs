//! Desk-scale navigation affordance library.
//!
//! Everything needed to reproduce the embodiment-grounding half of a
//! hierarchical navigation stack on a laptop:
//!
//! - [`terrain`]: five procedural terrain families on a 2.5D elevation grid.
//! - [`embodiment`]: kinematic legged/wheeled agents, a rollout engine with
//!   wall/fall termination rules, and a pure-pursuit tracker.
//! - [`affordance`]: rollout-labeled dataset collection and an MLP affordance
//!   classifier (plus a return-regression variant).
//! - [`pathspace`]: candidate paths, pinhole projection, the location-token
//!   codec and prompt grammar.
//! - [`planner`]: a sampling candidate generator and scripted benchmark
//!   scenarios standing in for the high-level planner.
//! - [`mission`]: affordance scoring/selection and the receding-horizon
//!   mission state machine.
//! - [`datapipe`]: hindsight labeling of odometry logs and the offline
//!   trajectory metric suite.

pub mod affordance;
pub mod datapipe;
pub mod embodiment;
pub mod error;
pub mod mission;
pub mod pathspace;
pub mod planner;
pub mod scenario;
pub mod seeds;
pub mod terrain;

pub use error::CoreError;
pub use terrain::{ElevationMap, TerrainFamily, TerrainParams};
