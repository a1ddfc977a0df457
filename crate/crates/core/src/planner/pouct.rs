//! Partially observable UCT over action/observation histories.
//!
//! Each simulation samples a target location from the root belief, descends
//! the tree with UCB1 (untried actions first), expands one node, finishes with
//! a uniform-random rollout to the horizon and backs up the discounted return.
//! Posterior beliefs are never formed explicitly; each history node sees the
//! states that are consistent with it, which is the Bayesian update in
//! sampled form.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::candidates::CandidateSet;
use crate::error::{Error, Result};
use crate::grid::Cell;
use crate::planner::model::{generative_step, PlanAction, PlanState, PlannerModel};

#[derive(Debug, Clone, Default)]
struct Edge {
    visits: u32,
    q: f64,
    children: [Option<usize>; 2],
}

#[derive(Debug, Clone)]
struct Node {
    visits: u32,
    edges: Vec<Edge>,
}

impl Node {
    fn new(n_actions: usize) -> Self {
        Node {
            visits: 0,
            edges: vec![Edge::default(); n_actions],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionStats {
    pub action: PlanAction,
    pub q: f64,
    pub visits: u32,
}

/// One planning call, for traces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanTrace {
    pub root: Vec<ActionStats>,
    pub chosen: PlanAction,
}

pub struct Pouct<'a> {
    model: PlannerModel,
    resolution: f64,
    actions: &'a [PlanAction],
    robot: Cell,
    /// Target hypotheses and cumulative probabilities.
    atoms: Vec<(Cell, f64)>,
    nodes: Vec<Node>,
}

impl<'a> Pouct<'a> {
    pub fn new(
        belief: &CandidateSet,
        robot: Cell,
        actions: &'a [PlanAction],
        model: PlannerModel,
        resolution: f64,
    ) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::EmptyActionSet);
        }
        let atoms = if belief.has_belief() {
            let mut acc = 0.0;
            belief
                .points
                .iter()
                .zip(&belief.probs)
                .map(|(&c, &p)| {
                    acc += p;
                    (c, acc)
                })
                .collect()
        } else {
            let f = belief.frontier.ok_or(Error::ExplorationExhausted)?;
            vec![(f, 1.0)]
        };
        Ok(Pouct {
            model,
            resolution,
            actions,
            robot,
            atoms,
            nodes: vec![Node::new(actions.len())],
        })
    }

    fn sample_target<R: Rng + ?Sized>(&self, rng: &mut R) -> Cell {
        let total = self.atoms.last().map_or(1.0, |a| a.1);
        let x = rng.gen::<f64>() * total;
        self.atoms
            .iter()
            .find(|a| x < a.1)
            .unwrap_or_else(|| self.atoms.last().expect("non-empty belief"))
            .0
    }

    /// Runs `n` more simulations.
    pub fn run<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) {
        for _ in 0..n {
            let state = PlanState {
                robot: self.robot,
                target: self.sample_target(rng),
            };
            self.simulate(state, 0, 0, rng);
        }
    }

    fn select(&self, node: usize) -> usize {
        let n = &self.nodes[node];
        if let Some(untried) = n.edges.iter().position(|e| e.visits == 0) {
            return untried;
        }
        let log_n = (n.visits as f64).ln();
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (i, e) in n.edges.iter().enumerate() {
            let score = e.q + self.model.c_ucb * (log_n / e.visits as f64).sqrt();
            if score > best_score {
                best = i;
                best_score = score;
            }
        }
        best
    }

    fn simulate<R: Rng + ?Sized>(&mut self, state: PlanState, node: usize, depth: usize, rng: &mut R) -> f64 {
        if depth >= self.model.depth {
            return 0.0;
        }
        let a = self.select(node);
        let step = generative_step(state, self.actions[a], &self.model, self.resolution, rng);
        let obs = step.observed as usize;
        let future = match self.nodes[node].edges[a].children[obs] {
            Some(child) => self.simulate(step.next, child, depth + 1, rng),
            None => {
                if depth + 1 < self.model.depth {
                    self.nodes.push(Node::new(self.actions.len()));
                    let id = self.nodes.len() - 1;
                    self.nodes[node].edges[a].children[obs] = Some(id);
                }
                self.rollout(step.next, depth + 1, rng)
            }
        };
        let ret = step.reward + self.model.gamma * future;
        let n = &mut self.nodes[node];
        n.visits += 1;
        let e = &mut n.edges[a];
        e.visits += 1;
        e.q += (ret - e.q) / e.visits as f64;
        ret
    }

    fn rollout<R: Rng + ?Sized>(&self, mut state: PlanState, depth: usize, rng: &mut R) -> f64 {
        let mut ret = 0.0;
        let mut discount = 1.0;
        for _ in depth..self.model.depth {
            let a = *self.actions.choose(rng).expect("non-empty action set");
            let step = generative_step(state, a, &self.model, self.resolution, rng);
            ret += discount * step.reward;
            discount *= self.model.gamma;
            state = step.next;
        }
        ret
    }

    pub fn root_stats(&self) -> Vec<ActionStats> {
        self.actions
            .iter()
            .zip(&self.nodes[0].edges)
            .map(|(&action, e)| ActionStats {
                action,
                q: e.q,
                visits: e.visits,
            })
            .collect()
    }

    /// Root action with the highest value; ties and unvisited actions resolve
    /// to list order.
    pub fn best_action(&self) -> PlanAction {
        let edges = &self.nodes[0].edges;
        let mut best = 0;
        for (i, e) in edges.iter().enumerate() {
            let b = &edges[best];
            if e.visits > 0 && (b.visits == 0 || e.q > b.q) {
                best = i;
            }
        }
        self.actions[best]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Checks that every node's visit count equals the sum of its action
    /// visit counts.
    pub fn check_visit_counts(&self) -> std::result::Result<(), String> {
        for (i, n) in self.nodes.iter().enumerate() {
            let sum: u32 = n.edges.iter().map(|e| e.visits).sum();
            if sum != n.visits {
                return Err(format!("node {i}: N(h) = {} but sum of N(h,a) = {sum}", n.visits));
            }
        }
        Ok(())
    }

    /// Largest |Q(h, a)| over the whole tree.
    pub fn max_abs_q(&self) -> f64 {
        self.nodes
            .iter()
            .flat_map(|n| n.edges.iter())
            .filter(|e| e.visits > 0)
            .map(|e| e.q.abs())
            .fold(0.0, f64::max)
    }
}

/// Chooses one action by running `model.n_sims` simulations from `robot`.
pub fn plan<R: Rng + ?Sized>(
    belief: &CandidateSet,
    robot: Cell,
    actions: &[PlanAction],
    model: &PlannerModel,
    resolution: f64,
    rng: &mut R,
) -> Result<PlanTrace> {
    let mut tree = Pouct::new(belief, robot, actions, *model, resolution)?;
    if actions.len() > 1 {
        tree.run(model.n_sims, rng);
    }
    Ok(PlanTrace {
        root: tree.root_stats(),
        chosen: tree.best_action(),
    })
}
