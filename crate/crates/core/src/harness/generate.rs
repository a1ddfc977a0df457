//! Random rooms-and-corridors scenarios.
//!
//! The map is split recursively into rooms by one-cell walls with doorways,
//! then cluttered with small furniture blocks. A block is kept only if every
//! free cell stays reachable from every other. Targets go on free cells at
//! least `min_target_distance` from the start, and at least one of them is
//! hidden from the start cell whenever the layout allows it.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Cell, CellState, GridShape, OccupancyGrid};
use crate::nav;
use crate::rng::{self, Stream};
use crate::sim::{line_of_sight, NoiseSpec, ObjectInstance, Pose, Scenario, SensorSpec};

const CLASSES: [&str; 12] = [
    "bed",
    "bottle",
    "chair",
    "couch",
    "cup",
    "laptop",
    "microwave",
    "oven",
    "plant",
    "sink",
    "toilet",
    "tv",
];

const ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorSpec {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    /// Fraction of room floor covered by furniture.
    pub obstacle_density: f64,
    /// Number of target classes.
    pub targets: usize,
    /// Extra non-target objects.
    pub distractors: usize,
    /// Rooms wider than this are split, cells.
    pub max_room: usize,
    pub door_width: usize,
    pub min_target_distance: f64,
    pub sensor: SensorSpec,
    pub noise: NoiseSpec,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            width: 40,
            height: 40,
            resolution: 0.5,
            obstacle_density: 0.1,
            targets: 3,
            distractors: 3,
            max_room: 24,
            door_width: 2,
            min_target_distance: 4.0,
            sensor: SensorSpec::default(),
            noise: NoiseSpec::default(),
        }
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, reason: &str| Err(Error::Config(format!("generator.{field}: {reason}")));
        if self.width < 8 || self.height < 8 {
            return bad("width", "grid must be at least 8x8");
        }
        if !(self.resolution > 0.0) {
            return bad("resolution", "must be positive");
        }
        if !(0.0..1.0).contains(&self.obstacle_density) {
            return bad("obstacle_density", "must lie in [0, 1)");
        }
        if self.targets == 0 || self.targets + self.distractors > CLASSES.len() {
            return bad("targets", &format!("need 1..={} classes in total", CLASSES.len()));
        }
        if self.max_room < 4 {
            return bad("max_room", "must be at least 4");
        }
        if self.door_width == 0 {
            return bad("door_width", "must be positive");
        }
        Ok(())
    }
}

/// Splits `[x0, x1] x [y0, y1]` (inclusive interior) with walls.
fn divide(grid: &mut OccupancyGrid, spec: &GeneratorSpec, rng: &mut ChaCha8Rng, x0: i32, y0: i32, x1: i32, y1: i32) {
    let w = x1 - x0 + 1;
    let h = y1 - y0 + 1;
    let max = spec.max_room as i32;
    let min = (max / 2).max(3);
    let vertical = if w > max && h > max { w >= h } else { w > max };
    if !vertical && h <= max {
        return;
    }
    let door = spec.door_width as i32;
    if vertical {
        if w < 2 * min + 1 {
            return;
        }
        let x = rng.gen_range(x0 + min..=x1 - min);
        let d = rng.gen_range(y0..=(y1 - door + 1).max(y0));
        for y in y0..=y1 {
            if !(d..d + door).contains(&y) {
                grid.set(Cell::new(x, y), CellState::Obstacle);
            }
        }
        divide(grid, spec, rng, x0, y0, x - 1, y1);
        divide(grid, spec, rng, x + 1, y0, x1, y1);
    } else {
        if h < 2 * min + 1 {
            return;
        }
        let y = rng.gen_range(y0 + min..=y1 - min);
        let d = rng.gen_range(x0..=(x1 - door + 1).max(x0));
        for x in x0..=x1 {
            if !(d..d + door).contains(&x) {
                grid.set(Cell::new(x, y), CellState::Obstacle);
            }
        }
        divide(grid, spec, rng, x0, y0, x1, y - 1);
        divide(grid, spec, rng, x0, y + 1, x1, y1);
    }
}

/// Whether every free cell is reachable from `from`.
fn connected(grid: &OccupancyGrid, from: Cell) -> bool {
    let costs = nav::dijkstra_costs(grid, from, false);
    grid.states()
        .iter()
        .zip(&costs)
        .all(|(&s, c)| s != CellState::Free || c.is_some())
}

fn layout(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Option<OccupancyGrid> {
    let shape = GridShape::new(spec.width, spec.height, spec.resolution);
    let mut grid = OccupancyGrid::filled(shape, CellState::Free);
    let (w, h) = (spec.width as i32, spec.height as i32);
    for c in shape.cells() {
        if c.x == 0 || c.y == 0 || c.x == w - 1 || c.y == h - 1 {
            grid.set(c, CellState::Obstacle);
        }
    }
    divide(&mut grid, spec, rng, 1, 1, w - 2, h - 2);
    let anchor = shape.cells().find(|&c| grid.is_free(c))?;
    if !connected(&grid, anchor) {
        return None;
    }

    let floor = grid.count(CellState::Free);
    let goal = (spec.obstacle_density * floor as f64).round() as usize;
    let mut placed = 0;
    let mut failures = 0;
    while placed < goal {
        if failures > 400 {
            return None;
        }
        let bw = rng.gen_range(1..=3);
        let bh = rng.gen_range(1..=2);
        let (bw, bh) = if rng.gen_bool(0.5) { (bw, bh) } else { (bh, bw) };
        let x = rng.gen_range(1..w - 1);
        let y = rng.gen_range(1..h - 1);
        let block: Vec<Cell> = (0..bh)
            .flat_map(|dy| (0..bw).map(move |dx| Cell::new(x + dx, y + dy)))
            .filter(|&c| grid.is_free(c))
            .take(goal - placed)
            .collect();
        if block.is_empty() {
            failures += 1;
            continue;
        }
        for &c in &block {
            grid.set(c, CellState::Obstacle);
        }
        let anchor = shape.cells().find(|&c| grid.is_free(c));
        if anchor.is_some_and(|a| connected(&grid, a)) {
            placed += block.len();
        } else {
            for &c in &block {
                grid.set(c, CellState::Free);
            }
            failures += 1;
        }
    }
    Some(grid)
}

fn attempt(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Option<Scenario> {
    let truth = layout(spec, rng)?;
    let shape = truth.shape();
    let free: Vec<Cell> = shape.cells().filter(|&c| truth.is_free(c)).collect();
    let start = *free.choose(rng)?;

    let far: Vec<Cell> = free
        .iter()
        .copied()
        .filter(|&c| shape.meters(start, c) >= spec.min_target_distance)
        .collect();
    let hidden: Vec<Cell> = far
        .iter()
        .copied()
        .filter(|&c| !line_of_sight(&truth, start, c))
        .collect();
    let n_objects = spec.targets + spec.distractors;
    if far.len() < n_objects {
        return None;
    }

    let mut classes: Vec<&str> = CLASSES.to_vec();
    classes.shuffle(rng);
    let mut cells: Vec<Cell> = Vec::with_capacity(n_objects);
    if let Some(&h) = hidden.choose(rng) {
        cells.push(h);
    }
    while cells.len() < n_objects {
        let c = *far.choose(rng)?;
        if !cells.contains(&c) {
            cells.push(c);
        }
    }
    let object_instances = cells
        .iter()
        .zip(&classes)
        .map(|(&cell, &class)| ObjectInstance {
            class_label: class.to_string(),
            cell,
        })
        .collect();
    let mut target_classes: Vec<String> = classes[..spec.targets].iter().map(|s| s.to_string()).collect();
    // the hidden object is the first one placed; keep it from always being
    // searched first
    target_classes.shuffle(rng);

    let heading = rng.gen_range(0..4) as f64 * std::f64::consts::FRAC_PI_2;
    let scenario = Scenario {
        shape,
        truth,
        object_instances,
        target_classes,
        robot_start: Pose::at_cell(shape, start, heading),
        seed: rng.gen::<u64>() >> 1,
        sensor: spec.sensor,
        noise: spec.noise,
    };
    scenario.validate().ok()?;
    Some(scenario)
}

/// Generates scenario `index` of the set keyed by `master_seed`.
pub fn generate_scenario(spec: &GeneratorSpec, master_seed: u64, index: u64) -> Result<Scenario> {
    spec.validate()?;
    let mut rng = rng::stream(master_seed, Stream::Generator, index);
    for _ in 0..ATTEMPTS {
        if let Some(s) = attempt(spec, &mut rng) {
            return Ok(s);
        }
    }
    Err(Error::Infeasible(format!(
        "no valid layout after {ATTEMPTS} attempts (density {}, {}x{})",
        spec.obstacle_density, spec.width, spec.height
    )))
}

/// Generates `n` scenarios. Each depends only on `(spec, master_seed, index)`.
pub fn generate_scenarios(spec: &GeneratorSpec, n: usize, master_seed: u64) -> Result<Vec<Scenario>> {
    (0..n as u64).map(|i| generate_scenario(spec, master_seed, i)).collect()
}
