//! Multi-object search on 2-D grid worlds.
//!
//! The pipeline fuses per-target semantic scores into value layers with
//! cone-shaped confidence, decays regions that have been looked at often
//! without a detection, clusters what remains into candidate points, and
//! plans over candidates and the best frontier with POUCT. Baseline and
//! ablation agents share the same simulator and maps, and the harness
//! scores batches by success rate and MSPL.

// Validation writes `!(x > 0.0)` on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod candidates;
pub mod error;
pub mod grid;
pub mod harness;
pub mod mapping;
pub mod nav;
pub mod planner;
pub mod rng;
pub mod sim;

pub use agents::{run_episode, AgentKind, AgentParams, EpisodeResult, Termination};
pub use candidates::{CandidateSet, ClusterParams, DecayParams};
pub use error::{Error, Result};
pub use grid::{Cell, CellState, GridShape, OccupancyGrid};
pub use planner::{PlanAction, PlannerModel};
pub use sim::{Pose, Scenario, SensorFrame};
