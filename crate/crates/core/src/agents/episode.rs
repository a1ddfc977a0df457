use std::collections::{HashMap, HashSet};
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::agents::policy::{Agent, Decision, EpisodeView, GoalKind};
use crate::agents::{AgentKind, AgentParams};
use crate::error::{Error, Result};
use crate::grid::{Cell, CellState, OccupancyGrid};
use crate::mapping::{update_layers, update_obstacles, ObjectMap, ValueLayer};
use crate::nav;
use crate::planner::PlanTrace;
use crate::sim::{advance, sense, Pose, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    AllFound,
    StepBudget,
    ExplorationExhausted,
}

/// One decision and the step that followed it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    /// Steps used after this one.
    pub step: u64,
    pub cell: Cell,
    pub heading: f64,
    pub goal: Cell,
    pub kind: GoalKind,
    /// Meters moved in this step.
    pub distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeResult {
    pub agent: AgentKind,
    pub seed: u64,
    pub targets: Vec<String>,
    /// Step at which each target was found, in `targets` order.
    pub found_step: Vec<Option<u64>>,
    pub success: bool,
    /// Meters travelled.
    pub path_length: f64,
    pub steps: u64,
    /// Shortest tour from the start through one instance of every target;
    /// `None` when some target cannot be reached at all.
    pub optimal_length: Option<f64>,
    pub termination: Termination,
    pub trace: Vec<TraceStep>,
}

/// Hook called once per decision, before the robot moves.
pub trait EpisodeObserver {
    fn observe(&mut self, step: u64, grid: &OccupancyGrid, layers: &[ValueLayer], decision: &Decision) -> Result<()>;
}

impl EpisodeObserver for () {
    fn observe(&mut self, _: u64, _: &OccupancyGrid, _: &[ValueLayer], _: &Decision) -> Result<()> {
        Ok(())
    }
}

struct Run<'a> {
    scenario: &'a Scenario,
    params: AgentParams,
    agent: Agent,
    found: Vec<Option<u64>>,
    tracked: Vec<String>,
    grid: OccupancyGrid,
    layers: Vec<ValueLayer>,
    objects: ObjectMap,
    ignored: HashSet<Cell>,
    dwell: HashMap<Cell, u32>,
    /// Maps were reset and need a fresh look around.
    rescan: bool,
    pose: Pose,
    /// Sensor frames taken; keys the sensor noise.
    frames: u64,
    step: u64,
}

impl<'a> Run<'a> {
    fn new(scenario: &'a Scenario, kind: AgentKind, params: AgentParams) -> Self {
        let shape = scenario.shape;
        let start = scenario.start_cell();
        let agent = Agent::new(kind, params);
        let mut run = Run {
            scenario,
            params,
            found: vec![None; scenario.target_classes.len()],
            tracked: agent.tracked(&scenario.target_classes),
            agent,
            grid: OccupancyGrid::unknown(shape),
            layers: Vec::new(),
            objects: ObjectMap::default(),
            ignored: HashSet::new(),
            dwell: HashMap::new(),
            rescan: false,
            pose: Pose::at_cell(shape, start, scenario.robot_start.heading),
            frames: 0,
            step: 0,
        };
        run.reset_maps();
        run
    }

    fn reset_maps(&mut self) {
        let shape = self.scenario.shape;
        self.grid = OccupancyGrid::unknown(shape);
        self.grid.set(self.pose.cell(shape), CellState::Free);
        self.layers = self
            .tracked
            .iter()
            .map(|t| ValueLayer::new(t.as_str(), shape))
            .collect();
        self.objects = ObjectMap::default();
        self.ignored.clear();
        self.dwell.clear();
    }

    fn remaining(&self) -> Vec<String> {
        self.scenario
            .target_classes
            .iter()
            .zip(&self.found)
            .filter(|(_, f)| f.is_none())
            .map(|(t, _)| t.clone())
            .collect()
    }

    fn all_found(&self) -> bool {
        self.found.iter().all(Option::is_some)
    }

    /// Takes one reading at the current pose and updates every map.
    fn perceive(&mut self) {
        let shape = self.scenario.shape;
        let frame = sense(self.scenario, &self.pose, self.frames, &self.tracked);
        self.frames += 1;
        update_obstacles(&mut self.grid, &frame);
        update_layers(&mut self.layers, &frame, self.scenario.sensor.fov);
        self.objects.record(&frame, self.step);

        let robot = self.pose.cell(shape);
        let mut newly = false;
        for det in &frame.detections {
            if !self.tracked.contains(&det.class_label) {
                continue;
            }
            if shape.meters(robot, det.cell) >= self.params.found_distance {
                continue;
            }
            for (t, f) in self.scenario.target_classes.iter().zip(self.found.iter_mut()) {
                if *t == det.class_label && f.is_none() {
                    *f = Some(self.step);
                    newly = true;
                }
            }
        }
        if newly {
            self.agent.clear_goal();
            self.tracked = self.agent.tracked(&self.remaining());
            if self.agent.independent_subtasks() {
                self.reset_maps();
                self.rescan = true;
            } else {
                let tracked = &self.tracked;
                self.layers.retain(|l| tracked.contains(&l.target_class));
            }
        }
    }

    fn turns_per_circle(&self) -> u32 {
        (TAU / self.scenario.sensor.fov).ceil() as u32
    }

    /// Looks around in place without using steps.
    fn initial_scan(&mut self) {
        self.rescan = false;
        let heading = self.pose.heading;
        let fov = self.scenario.sensor.fov;
        for k in 0..self.turns_per_circle() {
            if self.all_found() {
                break;
            }
            let shape = self.scenario.shape;
            self.pose = Pose::at_cell(shape, self.pose.cell(shape), heading + k as f64 * fov);
            self.perceive();
        }
        let shape = self.scenario.shape;
        self.pose = Pose::at_cell(shape, self.pose.cell(shape), heading);
    }

    /// One step toward `goal`. Standing still turns the robot by one field
    /// of view instead.
    fn step_toward(&mut self, decision: &Decision) -> Result<f64> {
        let shape = self.scenario.shape;
        let here = self.pose.cell(shape);
        let moved = if decision.waypoint == here {
            None
        } else {
            match advance(self.scenario, &self.pose, decision.waypoint, &mut self.grid, Some(1)) {
                Ok(a) if a.steps > 0 => Some(a),
                Ok(_) | Err(Error::NoPath { .. }) => None,
                Err(e) => return Err(e),
            }
        };
        self.step += 1;
        match moved {
            Some(a) => {
                self.pose = a.pose;
                Ok(a.distance)
            }
            None => {
                let heading = self.pose.heading + self.scenario.sensor.fov;
                self.pose = Pose::at_cell(shape, here, heading);
                let n = self.dwell.entry(decision.waypoint).or_insert(0);
                *n += 1;
                if decision.kind == GoalKind::Frontier && *n >= self.turns_per_circle() {
                    self.ignored.insert(decision.waypoint);
                }
                Ok(0.0)
            }
        }
    }
}

/// Runs one episode to completion.
///
/// Search failures are reported in the result; errors are reserved for
/// invalid inputs.
pub fn run_episode(scenario: &Scenario, kind: AgentKind, params: &AgentParams) -> Result<EpisodeResult> {
    run_episode_with(scenario, kind, params, &mut ())
}

/// [`run_episode`] with a per-decision observer.
pub fn run_episode_with(
    scenario: &Scenario,
    kind: AgentKind,
    params: &AgentParams,
    observer: &mut dyn EpisodeObserver,
) -> Result<EpisodeResult> {
    scenario.validate()?;
    params.planner.validate()?;
    let groups: Vec<Vec<Cell>> = scenario
        .target_classes
        .iter()
        .map(|t| scenario.instances_of(t).collect())
        .collect();
    let optimal_length = match nav::optimal_group_tour_length(&scenario.truth, scenario.start_cell(), &groups) {
        Ok(l) => Some(l),
        Err(Error::UnreachableTarget { .. }) => None,
        Err(e) => return Err(e),
    };

    let mut run = Run::new(scenario, kind, *params);
    if params.initial_scan {
        run.initial_scan();
    } else {
        run.perceive();
    }

    let mut trace = Vec::new();
    let mut path_length = 0.0;
    let termination = loop {
        if run.all_found() {
            break Termination::AllFound;
        }
        if run.step >= params.step_budget as u64 {
            break Termination::StepBudget;
        }
        if run.rescan {
            run.initial_scan();
            continue;
        }
        let view = EpisodeView {
            scenario,
            pose: run.pose,
            step: run.step,
            grid: &run.grid,
            layers: &run.layers,
            objects: &run.objects,
            tracked: &run.tracked,
            ignored: &run.ignored,
        };
        let decision = match run.agent.decide(&view) {
            Ok(d) => d,
            Err(Error::ExplorationExhausted) => break Termination::ExplorationExhausted,
            Err(e) => return Err(e),
        };
        observer.observe(run.step, &run.grid, &run.layers, &decision)?;
        let distance = run.step_toward(&decision)?;
        path_length += distance;
        run.perceive();
        trace.push(TraceStep {
            step: run.step,
            cell: run.pose.cell(scenario.shape),
            heading: run.pose.heading,
            goal: decision.waypoint,
            kind: decision.kind,
            distance,
            plan: decision.plan,
        });
    };

    Ok(EpisodeResult {
        agent: kind,
        seed: scenario.seed,
        targets: scenario.target_classes.clone(),
        success: run.all_found(),
        found_step: run.found,
        path_length,
        steps: run.step,
        optimal_length,
        termination,
        trace,
    })
}
