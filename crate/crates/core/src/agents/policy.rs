use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::agents::{AgentKind, AgentParams};
use crate::candidates::{self, build_candidates, decayed_map, CandidateSet};
use crate::error::{Error, Result};
use crate::grid::{Cell, OccupancyGrid};
use crate::mapping::{aggregate, combined_updates, extract_frontiers, is_frontier_cell, ObjectMap, ValueLayer};
use crate::nav;
use crate::planner::{plan, ActionKind, PlanAction, PlanTrace};
use crate::rng::{self, Stream};
use crate::sim::{Pose, Scenario};

/// What a policy may look at when choosing the next waypoint.
pub struct EpisodeView<'a> {
    pub scenario: &'a Scenario,
    pub pose: Pose,
    /// Steps used so far.
    pub step: u64,
    pub grid: &'a OccupancyGrid,
    /// One layer per tracked, unfound target class.
    pub layers: &'a [ValueLayer],
    pub objects: &'a ObjectMap,
    pub tracked: &'a [String],
    /// Frontier waypoints already visited without clearing the frontier.
    pub ignored: &'a HashSet<Cell>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GoalKind {
    Candidate,
    Frontier,
    /// A detected instance of a tracked class.
    Object,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub waypoint: Cell,
    pub kind: GoalKind,
    pub candidates: Option<CandidateSet>,
    pub plan: Option<PlanTrace>,
}

impl Decision {
    fn simple(waypoint: Cell, kind: GoalKind) -> Self {
        Decision {
            waypoint,
            kind,
            candidates: None,
            plan: None,
        }
    }
}

/// A waypoint policy of one [`AgentKind`].
#[derive(Debug, Clone)]
pub struct Agent {
    kind: AgentKind,
    params: AgentParams,
    /// Waypoint being followed, kept until reached or invalid.
    goal: Option<(Cell, GoalKind)>,
}

/// Cells reachable from `from` on the known map, unknown treated as free.
fn reachable(grid: &OccupancyGrid, from: Cell) -> Vec<bool> {
    let shape = grid.shape();
    let mut seen = vec![false; shape.len()];
    if !grid.contains(from) {
        return seen;
    }
    seen[shape.index(from)] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        for (n, _) in nav::moves(grid, c, true) {
            let i = shape.index(n);
            if !seen[i] {
                seen[i] = true;
                queue.push_back(n);
            }
        }
    }
    seen
}

fn nearest(cells: impl Iterator<Item = Cell>, to: Cell) -> Option<Cell> {
    cells.min_by(|a, b| a.dist(to).total_cmp(&b.dist(to)).then_with(|| a.cmp(b)))
}

impl Agent {
    pub fn new(kind: AgentKind, params: AgentParams) -> Self {
        Agent {
            kind,
            params,
            goal: None,
        }
    }

    pub fn kind(&self) -> AgentKind {
        self.kind
    }

    /// Target classes this agent is searching for right now.
    pub fn tracked(&self, remaining: &[String]) -> Vec<String> {
        match self.kind {
            AgentKind::GreedySingle => remaining.iter().take(1).cloned().collect(),
            _ => remaining.to_vec(),
        }
    }

    /// Whether each target is a fresh search with empty maps.
    pub fn independent_subtasks(&self) -> bool {
        self.kind == AgentKind::GreedySingle
    }

    /// Drops the current waypoint so the next call decides afresh.
    pub fn clear_goal(&mut self) {
        self.goal = None;
    }

    /// Chooses the next waypoint. A previous waypoint is kept while it is
    /// unreached and still valid; a detected target always takes over.
    pub fn decide(&mut self, view: &EpisodeView) -> Result<Decision> {
        let d = self.choose(view)?;
        self.goal = Some((d.waypoint, d.kind));
        Ok(d)
    }

    fn still_valid(&self, view: &EpisodeView, robot: Cell, reach: &[bool]) -> Option<Decision> {
        let (goal, kind) = self.goal?;
        let shape = view.grid.shape();
        // a frontier that survives arrival is held while the robot turns in
        // place; the episode gives up on it after a full turn
        let hold = kind == GoalKind::Frontier;
        if (goal == robot && !hold) || !reach[shape.index(goal)] || view.grid.is_obstacle(goal) {
            return None;
        }
        let valid = match kind {
            GoalKind::Frontier => is_frontier_cell(view.grid, goal) && !view.ignored.contains(&goal),
            GoalKind::Random => view.grid.is_free(goal),
            GoalKind::Candidate | GoalKind::Object => true,
        };
        valid.then(|| Decision::simple(goal, kind))
    }

    fn choose(&mut self, view: &EpisodeView) -> Result<Decision> {
        let robot = view.pose.cell(view.scenario.shape);
        let reach = reachable(view.grid, robot);
        let shape = view.grid.shape();
        let ok = |c: Cell| reach[shape.index(c)];

        if self.kind != AgentKind::RandomWalk {
            let seen_targets = view
                .tracked
                .iter()
                .flat_map(|class| view.objects.cells_of(class))
                .filter(|&c| ok(c));
            if let Some(goal) = nearest(seen_targets, robot) {
                return Ok(Decision::simple(goal, GoalKind::Object));
            }
        }
        if let Some(d) = self.still_valid(view, robot, &reach) {
            return Ok(d);
        }
        if self.kind == AgentKind::RandomWalk {
            return Ok(self.random_walk(view, robot, &reach));
        }

        let shared = aggregate(view.layers);
        let usable = |min_len| {
            let mut set = extract_frontiers(view.grid, &shared, min_len);
            set.frontiers.retain(|f| ok(f.cell) && !view.ignored.contains(&f.cell));
            set
        };
        // short chains are noise while longer ones remain, but they can be
        // the only way through a doorway seen at a grazing angle
        let mut frontiers = usable(self.params.min_frontier_len);
        if frontiers.is_empty() && self.params.min_frontier_len > 1 {
            frontiers = usable(1);
        }

        if matches!(self.kind, AgentKind::GreedySingle | AgentKind::GreedyMulti) {
            return frontiers
                .best(shape.width)
                .map(|f| Decision::simple(f.cell, GoalKind::Frontier))
                .ok_or(Error::ExplorationExhausted);
        }

        let decayed = if self.kind == AgentKind::OvamosNoDecay {
            shared.v.clone()
        } else {
            decayed_map(&shared, &combined_updates(view.layers), &self.params.decay)
        };
        let clusters: Vec<Cell> = candidates::cluster(&decayed, &self.params.cluster, view.grid)
            .into_iter()
            .filter(|&c| ok(c))
            .collect();
        let set = build_candidates(&decayed, shape, &clusters, &frontiers)?;

        if self.kind == AgentKind::OvamosNoPomdp {
            return Ok(greedy_on_value(set, &decayed, |c| shape.index(c)));
        }

        let actions = action_set(&set);
        let mut rng = rng::stream(view.scenario.seed, Stream::Planner, view.step);
        let trace = plan(&set, robot, &actions, &self.params.planner, shape.resolution, &mut rng)?;
        let kind = match trace.chosen.kind {
            ActionKind::Candidate => GoalKind::Candidate,
            ActionKind::Frontier => GoalKind::Frontier,
        };
        Ok(Decision {
            waypoint: trace.chosen.goal,
            kind,
            candidates: Some(set),
            plan: Some(trace),
        })
    }

    fn random_walk(&self, view: &EpisodeView, robot: Cell, reach: &[bool]) -> Decision {
        let shape = view.grid.shape();
        let radius = self.params.random_walk_radius;
        let options: Vec<Cell> = shape
            .cells()
            .filter(|&c| c != robot && view.grid.is_free(c) && reach[shape.index(c)])
            .filter(|&c| shape.meters(robot, c) <= radius)
            .collect();
        let mut rng = rng::stream(view.scenario.seed, Stream::RandomWalk, view.step);
        let goal = options.choose(&mut rng).copied().unwrap_or(robot);
        Decision::simple(goal, GoalKind::Random)
    }
}

/// Candidates in list order, then the frontier.
pub(crate) fn action_set(set: &CandidateSet) -> Vec<PlanAction> {
    set.points
        .iter()
        .map(|&goal| PlanAction {
            goal,
            kind: ActionKind::Candidate,
        })
        .chain(set.frontier.map(|goal| PlanAction {
            goal,
            kind: ActionKind::Frontier,
        }))
        .collect()
}

/// Highest decayed value among candidates and the frontier; earlier options
/// win ties.
fn greedy_on_value(set: CandidateSet, decayed: &[f64], index: impl Fn(Cell) -> usize) -> Decision {
    let mut best: Option<(f64, Cell, GoalKind)> = None;
    let options = set
        .points
        .iter()
        .map(|&c| (c, GoalKind::Candidate))
        .chain(set.frontier.map(|c| (c, GoalKind::Frontier)));
    for (c, kind) in options {
        let v = decayed[index(c)];
        if best.is_none_or(|(bv, _, _)| v > bv) {
            best = Some((v, c, kind));
        }
    }
    let (_, waypoint, kind) = best.expect("candidate set is never empty");
    Decision {
        waypoint,
        kind,
        candidates: Some(set),
        plan: None,
    }
}
