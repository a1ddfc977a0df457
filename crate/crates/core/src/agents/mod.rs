//! The full search agent, its ablations and the baselines, behind one
//! waypoint-selection interface.

mod episode;
mod policy;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::candidates::{ClusterParams, DecayParams};
use crate::planner::PlannerModel;

pub use episode::{run_episode, run_episode_with, EpisodeObserver, EpisodeResult, Termination, TraceStep};
pub use policy::{Agent, Decision, EpisodeView, GoalKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentKind {
    /// Value maps, decay, candidates and POUCT.
    Ovamos,
    /// Same candidates; greedy on decayed value instead of planning.
    OvamosNoPomdp,
    /// Full agent with the decay factor fixed at 1.
    OvamosNoDecay,
    RandomWalk,
    /// One target at a time, best frontier on that target's layer.
    GreedySingle,
    /// Best frontier on the shared map; no candidates, no planning.
    GreedyMulti,
}

impl AgentKind {
    pub const ALL: [AgentKind; 6] = [
        AgentKind::Ovamos,
        AgentKind::OvamosNoPomdp,
        AgentKind::OvamosNoDecay,
        AgentKind::RandomWalk,
        AgentKind::GreedySingle,
        AgentKind::GreedyMulti,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Ovamos => "ovamos",
            AgentKind::OvamosNoPomdp => "ovamos-no-pomdp",
            AgentKind::OvamosNoDecay => "ovamos-no-decay",
            AgentKind::RandomWalk => "random-walk",
            AgentKind::GreedySingle => "greedy-single",
            AgentKind::GreedyMulti => "greedy-multi",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AgentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| crate::error::Error::Config(format!("unknown agent {s:?}")))
    }
}

/// Everything an episode needs besides the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentParams {
    pub planner: PlannerModel,
    pub decay: DecayParams,
    pub cluster: ClusterParams,
    /// Frontier chains shorter than this are ignored.
    pub min_frontier_len: usize,
    pub step_budget: usize,
    /// An object counts as found when detected closer than this, meters.
    pub found_distance: f64,
    /// Random-walk goals are drawn within this radius, meters.
    pub random_walk_radius: f64,
    /// Look around in place before the first step.
    pub initial_scan: bool,
}

impl Default for AgentParams {
    fn default() -> Self {
        AgentParams {
            planner: PlannerModel::default(),
            decay: DecayParams::default(),
            cluster: ClusterParams::default(),
            min_frontier_len: 3,
            step_budget: 500,
            found_distance: 1.0,
            random_walk_radius: 3.0,
            initial_scan: true,
        }
    }
}
