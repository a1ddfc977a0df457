//! The single-target search POMDP: deterministic robot motion, a static
//! target, a distance-based detection model and a move/explore/find reward.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::grid::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerModel {
    pub lambda_move: f64,
    pub lambda_frontier: f64,
    pub lambda_target: f64,
    /// Discount, in (0, 1).
    pub gamma: f64,
    /// Detection threshold, meters.
    pub delta: f64,
    /// Detection decay rate beyond `delta`, per meter.
    pub beta: f64,
    /// Search horizon (tree plus rollout).
    pub depth: usize,
    pub n_sims: usize,
    /// UCB exploration constant.
    pub c_ucb: f64,
}

impl Default for PlannerModel {
    fn default() -> Self {
        let lambda_frontier = 500.0;
        let lambda_target = 500.0;
        PlannerModel {
            lambda_move: 20.0,
            lambda_frontier,
            lambda_target,
            gamma: 0.95,
            delta: 1.0,
            beta: 1.0,
            depth: 5,
            n_sims: 500,
            c_ucb: 0.5 * (lambda_frontier + lambda_target),
        }
    }
}

impl PlannerModel {
    pub fn validate(&self) -> crate::error::Result<()> {
        use crate::error::Error;
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(self.delta > 0.0) || !(self.beta > 0.0) {
            return bad("delta and beta must be positive");
        }
        if self.depth == 0 || self.n_sims == 0 {
            return bad("depth and n_sims must be at least 1");
        }
        if self.lambda_move < 0.0 || self.lambda_frontier < 0.0 || self.lambda_target < 0.0 || self.c_ucb < 0.0 {
            return bad("reward weights and c_ucb must be non-negative");
        }
        Ok(())
    }

    /// Largest single-step reward.
    pub fn r_max(&self) -> f64 {
        self.lambda_frontier + self.lambda_target
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    Candidate,
    Frontier,
}

/// `MoveTo(goal)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanAction {
    pub goal: Cell,
    pub kind: ActionKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlanState {
    pub robot: Cell,
    pub target: Cell,
}

/// `P(o = 1)` for a robot `dist` meters from the target.
pub fn observation_prob(dist: f64, model: &PlannerModel) -> f64 {
    if dist <= model.delta {
        1.0
    } else {
        (-model.beta * (dist - model.delta)).exp()
    }
}

/// Reward for moving `moved` meters with action `kind`, ending `to_target`
/// meters from the target.
pub fn reward(moved: f64, to_target: f64, kind: ActionKind, model: &PlannerModel) -> f64 {
    let mut r = -model.lambda_move * moved;
    if kind == ActionKind::Frontier {
        r += model.lambda_frontier;
    }
    if to_target <= model.delta {
        r += model.lambda_target;
    }
    r
}

/// Outcome of one generative step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub next: PlanState,
    pub observed: bool,
    pub reward: f64,
}

/// `G(s, a) -> (s', o, r)` with Euclidean distances at `resolution` m/cell.
pub fn generative_step<R: Rng + ?Sized>(
    state: PlanState,
    action: PlanAction,
    model: &PlannerModel,
    resolution: f64,
    rng: &mut R,
) -> Step {
    let next = PlanState {
        robot: action.goal,
        target: state.target,
    };
    let moved = state.robot.dist(next.robot) * resolution;
    let to_target = next.robot.dist(next.target) * resolution;
    let p = observation_prob(to_target, model);
    let observed = p >= 1.0 || rng.gen::<f64>() < p;
    Step {
        next,
        observed,
        reward: reward(moved, to_target, action.kind, model),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn observation_examples() {
        let m = PlannerModel::default();
        assert_eq!(observation_prob(m.delta, &m), 1.0);
        assert_eq!(observation_prob(0.0, &m), 1.0);
        assert!((observation_prob(m.delta + 1.0 / m.beta, &m) - (-1f64).exp()).abs() < 1e-15);
        assert!((observation_prob(2.0, &m) - 0.36788).abs() < 1e-5);
        // continuity just above delta
        assert!((observation_prob(m.delta + 1e-12, &m) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn reward_examples() {
        let m = PlannerModel::default();
        assert_eq!(reward(0.0, 0.5, ActionKind::Candidate, &m), 500.0);
        assert_eq!(reward(4.0, 10.0, ActionKind::Frontier, &m), 420.0);
        assert_eq!(reward(0.0, 10.0, ActionKind::Candidate, &m), 0.0);
    }

    #[test]
    fn target_is_static_and_certain_detection_always_fires() {
        let m = PlannerModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = PlanState {
            robot: Cell::new(0, 0),
            target: Cell::new(3, 0),
        };
        let a = PlanAction {
            goal: Cell::new(3, 0),
            kind: ActionKind::Candidate,
        };
        for _ in 0..100 {
            let step = generative_step(s, a, &m, 0.25, &mut rng);
            assert_eq!(step.next.target, s.target);
            assert_eq!(step.next.robot, a.goal);
            assert!(step.observed);
            assert_eq!(step.reward, -20.0 * 0.75 + 500.0);
        }
    }

    #[test]
    fn empirical_detection_rate_matches_closed_form() {
        let m = PlannerModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        // resolution 1 m, target 2 cells away: d = delta + 1
        let s = PlanState {
            robot: Cell::new(0, 0),
            target: Cell::new(2, 0),
        };
        let a = PlanAction {
            goal: Cell::new(0, 0),
            kind: ActionKind::Candidate,
        };
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| generative_step(s, a, &m, 1.0, &mut rng).observed)
            .count();
        let rate = hits as f64 / n as f64;
        assert!((rate - (-m.beta).exp()).abs() < 0.01, "rate {rate}");
    }
}
