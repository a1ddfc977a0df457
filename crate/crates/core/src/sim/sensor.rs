//! One simulated sensor reading: visibility, noisy detections and the
//! semantic scorer that stands in for an image-text similarity model.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::grid::Cell;
use crate::rng::{self, Stream};
use crate::sim::raycast;
use crate::sim::scenario::{Pose, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub class_label: String,
    pub cell: Cell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorFrame {
    pub pose: Pose,
    /// Free cells in view, row-major order.
    pub visible_cells: Vec<Cell>,
    /// Obstacle cells hit by rays, row-major order.
    pub obstacle_hits: Vec<Cell>,
    pub detections: Vec<Detection>,
    /// One score in `[0, 1]` per requested class.
    pub scores: BTreeMap<String, f64>,
}

impl SensorFrame {
    pub fn sees(&self, cell: Cell) -> bool {
        self.visible_cells.binary_search(&cell).is_ok()
    }
}

fn class_key(class: &str) -> u64 {
    // FNV-1a; stable across platforms and releases.
    class.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Noise-free scorer response for a class whose nearest visible instance is
/// `nearest` meters away (or none in view).
pub fn base_score(nearest: Option<f64>, sigma: f64, ambient: f64) -> f64 {
    match nearest {
        Some(d) => (-d / sigma).exp().clamp(ambient, 1.0),
        None => ambient,
    }
}

/// Reads the sensor at `pose` on `step`, scoring each class in `classes`.
///
/// Deterministic in `(scenario.seed, step, pose, classes)`. Each class gets
/// its own scorer stream, so dropping a found class leaves the others intact.
pub fn sense(scenario: &Scenario, pose: &Pose, step: u64, classes: &[String]) -> SensorFrame {
    let shape = scenario.shape;
    let vis = raycast::cast(&scenario.truth, &scenario.sensor, pose);
    let origin = pose.cell(shape);
    let visible = |c: Cell| vis.free.binary_search(&c).is_ok();

    let mut detector = rng::stream(scenario.seed, Stream::Detector, step);
    let mut detections = Vec::new();
    for inst in &scenario.object_instances {
        if !visible(inst.cell) || shape.meters(origin, inst.cell) > scenario.sensor.detect_range {
            continue;
        }
        let draw: f64 = detector.gen();
        if draw >= scenario.sensor.miss_prob {
            detections.push(Detection {
                class_label: inst.class_label.clone(),
                cell: inst.cell,
            });
        }
    }

    let noise = &scenario.noise;
    let mut scores = BTreeMap::new();
    for class in classes {
        let nearest = scenario
            .instances_of(class)
            .filter(|&c| visible(c))
            .map(|c| shape.meters(origin, c))
            .min_by(f64::total_cmp);
        let mut score = base_score(nearest, noise.scorer_sigma, noise.ambient_score);
        if noise.scorer_noise_sd > 0.0 {
            let mut rng = rng::stream(scenario.seed ^ class_key(class), Stream::Scorer, step);
            let normal = Normal::new(0.0, noise.scorer_noise_sd).expect("finite sd");
            score += normal.sample(&mut rng);
        }
        scores.insert(class.clone(), score.clamp(0.0, 1.0));
    }

    SensorFrame {
        pose: *pose,
        visible_cells: vis.free,
        obstacle_hits: vis.obstacles,
        detections,
        scores,
    }
}
