//! Single-target search POMDP and its POUCT solver.

pub mod model;
pub mod pouct;

pub use model::{generative_step, observation_prob, reward, ActionKind, PlanAction, PlanState, PlannerModel, Step};
pub use pouct::{plan, ActionStats, PlanTrace, Pouct};
