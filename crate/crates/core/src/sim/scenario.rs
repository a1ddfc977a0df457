//! Scenario definition and its TOML document format.
//!
//! ```toml
//! grid_width = 5
//! grid_height = 5
//! resolution = 0.25
//! seed = 7
//! target_classes = ["mug"]
//! # one string per row, row 0 = north; '#' obstacle, '.' free
//! obstacles = [".....", ".....", "..#..", ".....", "....."]
//!
//! [robot_start]
//! x = 0.125
//! y = 0.125
//! heading = 0.0
//!
//! [sensor]
//! fov = 1.5707963267948966
//! view_range = 5.0
//! detect_range = 1.5
//! miss_prob = 0.0
//!
//! [noise]
//! scorer_sigma = 6.0
//! scorer_noise_sd = 0.05
//! ambient_score = 0.1
//!
//! [[object_instances]]
//! class_label = "mug"
//! cell = [4, 4]
//! ```

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Cell, CellState, GridShape, OccupancyGrid};

/// Robot pose: metric position and heading in `[0, 2π)`.
///
/// Heading is measured in grid coordinates (x east, y south), so `π/2`
/// faces south.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    /// Pose at the center of `cell`.
    pub fn at_cell(shape: GridShape, cell: Cell, heading: f64) -> Self {
        let (x, y) = shape.center(cell);
        Pose {
            x,
            y,
            heading: wrap_angle(heading),
        }
    }

    pub fn cell(&self, shape: GridShape) -> Cell {
        shape.cell_at(self.x, self.y)
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    /// Horizontal field of view, radians.
    pub fov: f64,
    /// Ray-cast range for mapping, meters.
    pub view_range: f64,
    /// Ground-truth detection radius, meters.
    pub detect_range: f64,
    /// Chance that a visible in-range object is missed on a given step.
    pub miss_prob: f64,
}

impl Default for SensorSpec {
    fn default() -> Self {
        SensorSpec {
            fov: std::f64::consts::FRAC_PI_2,
            view_range: 5.0,
            detect_range: 1.5,
            miss_prob: 0.3,
        }
    }
}

/// Parameters of the simulated semantic scorer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Distance falloff of the score, meters.
    pub scorer_sigma: f64,
    pub scorer_noise_sd: f64,
    /// Score reported when no instance of a class is in view.
    pub ambient_score: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            scorer_sigma: 6.0,
            scorer_noise_sd: 0.05,
            ambient_score: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub class_label: String,
    pub cell: Cell,
}

/// An immutable search problem: map, objects, targets, sensor and noise.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub shape: GridShape,
    /// Ground-truth map; every cell is `Free` or `Obstacle`.
    pub truth: OccupancyGrid,
    pub object_instances: Vec<ObjectInstance>,
    pub target_classes: Vec<String>,
    pub robot_start: Pose,
    pub seed: u64,
    pub sensor: SensorSpec,
    pub noise: NoiseSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    grid_width: usize,
    grid_height: usize,
    resolution: f64,
    seed: u64,
    target_classes: Vec<String>,
    obstacles: Vec<String>,
    robot_start: Pose,
    sensor: SensorSpec,
    noise: NoiseSpec,
    #[serde(default)]
    object_instances: Vec<DocInstance>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DocInstance {
    class_label: String,
    cell: [i32; 2],
}

fn float(x: f64) -> String {
    toml::Value::Float(x).to_string()
}

fn string(s: &str) -> String {
    toml::Value::String(s.to_owned()).to_string()
}

impl ScenarioDoc {
    /// Writes the document in the layout shown in the module docs: one
    /// obstacle row per line, inline cell pairs.
    fn render(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let list = |items: &[String]| items.iter().map(|s| string(s)).collect::<Vec<_>>().join(", ");
        let _ = writeln!(out, "grid_width = {}", self.grid_width);
        let _ = writeln!(out, "grid_height = {}", self.grid_height);
        let _ = writeln!(out, "resolution = {}", float(self.resolution));
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "target_classes = [{}]", list(&self.target_classes));
        let _ = writeln!(out, "obstacles = [");
        for row in &self.obstacles {
            let _ = writeln!(out, "    {},", string(row));
        }
        let _ = writeln!(out, "]");
        let p = &self.robot_start;
        let _ = writeln!(
            out,
            "\n[robot_start]\nx = {}\ny = {}\nheading = {}",
            float(p.x),
            float(p.y),
            float(p.heading)
        );
        let s = &self.sensor;
        let _ = writeln!(
            out,
            "\n[sensor]\nfov = {}\nview_range = {}\ndetect_range = {}\nmiss_prob = {}",
            float(s.fov),
            float(s.view_range),
            float(s.detect_range),
            float(s.miss_prob)
        );
        let n = &self.noise;
        let _ = writeln!(
            out,
            "\n[noise]\nscorer_sigma = {}\nscorer_noise_sd = {}\nambient_score = {}",
            float(n.scorer_sigma),
            float(n.scorer_noise_sd),
            float(n.ambient_score)
        );
        for o in &self.object_instances {
            let _ = writeln!(
                out,
                "\n[[object_instances]]\nclass_label = {}\ncell = [{}, {}]",
                string(&o.class_label),
                o.cell[0],
                o.cell[1]
            );
        }
        out
    }
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: ScenarioDoc = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(doc)
    }

    pub fn to_toml(&self) -> Result<String> {
        if self.seed > i64::MAX as u64 {
            return Err(Error::validation("seed", "must be below 2^63 to fit a TOML integer"));
        }
        Ok(self.to_doc().render())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        Self::from_toml(&text).map_err(|e| e.in_file(path))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = self.to_toml().map_err(|e| e.in_file(path))?;
        std::fs::write(path, text).map_err(|e| Error::from(e).in_file(path))?;
        Ok(())
    }

    fn from_doc(doc: ScenarioDoc) -> Result<Self> {
        if doc.grid_width == 0 || doc.grid_height == 0 {
            return Err(Error::validation("grid_width", "grid must be at least 1x1"));
        }
        if !(doc.resolution > 0.0 && doc.resolution.is_finite()) {
            return Err(Error::validation("resolution", "must be positive"));
        }
        let shape = GridShape::new(doc.grid_width, doc.grid_height, doc.resolution);
        if doc.obstacles.len() != doc.grid_height {
            return Err(Error::validation(
                "obstacles",
                format!("expected {} rows, found {}", doc.grid_height, doc.obstacles.len()),
            ));
        }
        let mut truth = OccupancyGrid::filled(shape, CellState::Free);
        for (y, row) in doc.obstacles.iter().enumerate() {
            if row.chars().count() != doc.grid_width {
                return Err(Error::validation(
                    "obstacles",
                    format!(
                        "row {y} has {} columns, expected {}",
                        row.chars().count(),
                        doc.grid_width
                    ),
                ));
            }
            for (x, ch) in row.chars().enumerate() {
                match ch {
                    '#' => truth.set(Cell::new(x as i32, y as i32), CellState::Obstacle),
                    '.' => {}
                    other => {
                        return Err(Error::validation(
                            "obstacles",
                            format!("row {y} column {x}: unexpected character {other:?}"),
                        ))
                    }
                }
            }
        }
        let scenario = Scenario {
            shape,
            truth,
            object_instances: doc
                .object_instances
                .into_iter()
                .map(|o| ObjectInstance {
                    class_label: o.class_label,
                    cell: Cell::new(o.cell[0], o.cell[1]),
                })
                .collect(),
            target_classes: doc.target_classes,
            robot_start: doc.robot_start,
            seed: doc.seed,
            sensor: doc.sensor,
            noise: doc.noise,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn to_doc(&self) -> ScenarioDoc {
        let obstacles = (0..self.shape.height as i32)
            .map(|y| {
                (0..self.shape.width as i32)
                    .map(|x| {
                        if self.truth.is_obstacle(Cell::new(x, y)) {
                            '#'
                        } else {
                            '.'
                        }
                    })
                    .collect()
            })
            .collect();
        ScenarioDoc {
            grid_width: self.shape.width,
            grid_height: self.shape.height,
            resolution: self.shape.resolution,
            seed: self.seed,
            target_classes: self.target_classes.clone(),
            obstacles,
            robot_start: self.robot_start,
            sensor: self.sensor,
            noise: self.noise,
            object_instances: self
                .object_instances
                .iter()
                .map(|o| DocInstance {
                    class_label: o.class_label.clone(),
                    cell: [o.cell.x, o.cell.y],
                })
                .collect(),
        }
    }

    /// Checks every structural invariant, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.truth.shape() != self.shape {
            return Err(Error::validation("obstacles", "grid shape mismatch"));
        }
        let start = self.robot_start;
        if !(start.x.is_finite() && start.y.is_finite()) {
            return Err(Error::validation("robot_start", "non-finite position"));
        }
        if !(0.0..std::f64::consts::TAU).contains(&start.heading) {
            return Err(Error::validation("robot_start.heading", "must lie in [0, 2π)"));
        }
        let start_cell = start.cell(self.shape);
        if !self.shape.contains(start_cell) {
            return Err(Error::validation(
                "robot_start",
                format!("cell {start_cell} is out of bounds"),
            ));
        }
        if self.truth.is_obstacle(start_cell) {
            return Err(Error::validation(
                "robot_start",
                format!("cell {start_cell} is an obstacle"),
            ));
        }
        for (i, o) in self.object_instances.iter().enumerate() {
            if !self.shape.contains(o.cell) {
                return Err(Error::validation(
                    format!("object_instances[{i}].cell"),
                    format!("{} is out of bounds", o.cell),
                ));
            }
            if self.truth.is_obstacle(o.cell) {
                return Err(Error::validation(
                    format!("object_instances[{i}].cell"),
                    format!("{} is an obstacle", o.cell),
                ));
            }
        }
        if self.target_classes.is_empty() {
            return Err(Error::validation("target_classes", "at least one target is required"));
        }
        for (k, class) in self.target_classes.iter().enumerate() {
            if self.target_classes[..k].contains(class) {
                return Err(Error::validation(
                    "target_classes",
                    format!("duplicate class {class:?}"),
                ));
            }
            if !self.object_instances.iter().any(|o| &o.class_label == class) {
                return Err(Error::validation(
                    "target_classes",
                    format!("class {class:?} has no object instance"),
                ));
            }
        }
        let s = &self.sensor;
        if !(s.fov > 0.0 && s.fov <= std::f64::consts::TAU) {
            return Err(Error::validation("sensor.fov", "must lie in (0, 2π]"));
        }
        if !(s.view_range > 0.0) {
            return Err(Error::validation("sensor.view_range", "must be positive"));
        }
        if !(s.detect_range >= 0.0 && s.detect_range <= s.view_range) {
            return Err(Error::validation("sensor.detect_range", "must lie in [0, view_range]"));
        }
        if !(0.0..1.0).contains(&s.miss_prob) {
            return Err(Error::validation("sensor.miss_prob", "must lie in [0, 1)"));
        }
        let n = &self.noise;
        if !(n.scorer_sigma > 0.0) {
            return Err(Error::validation("noise.scorer_sigma", "must be positive"));
        }
        if !(n.scorer_noise_sd >= 0.0) {
            return Err(Error::validation("noise.scorer_noise_sd", "must be non-negative"));
        }
        if !(0.0..1.0).contains(&n.ambient_score) {
            return Err(Error::validation("noise.ambient_score", "must lie in [0, 1)"));
        }
        Ok(())
    }

    pub fn start_cell(&self) -> Cell {
        self.robot_start.cell(self.shape)
    }

    /// Cells of all instances of `class`, in document order.
    pub fn instances_of<'a>(&'a self, class: &'a str) -> impl Iterator<Item = Cell> + 'a {
        self.object_instances
            .iter()
            .filter(move |o| o.class_label == class)
            .map(|o| o.cell)
    }
}
