//! Per-target value layers with cone-weighted confidence fusion, and the
//! shared map aggregated from them.

use serde::Serialize;

use crate::grid::GridShape;
use crate::sim::raycast::bearing_offset;
use crate::sim::SensorFrame;

const CONE_EPS: f64 = 1e-12;

/// Confidence of an observation at angle `offset` from the optical axis:
/// `cos²(offset / (fov/2) · π/2)`. `None` outside the cone.
pub fn cone_confidence(offset: f64, fov: f64) -> Option<f64> {
    let half = fov / 2.0;
    let offset = offset.abs();
    if offset > half + CONE_EPS {
        return None;
    }
    let ratio = (offset / half).min(1.0);
    let c = (ratio * std::f64::consts::FRAC_PI_2).cos();
    Some(c * c)
}

/// Confidence-weighted fusion of a new observation into a cell.
///
/// Returns `(v_new, c_new)`, or `None` when both confidences are zero and the
/// cell must be left untouched.
pub fn fuse_cell(v_curr: f64, c_curr: f64, v_prev: f64, c_prev: f64) -> Option<(f64, f64)> {
    let total = c_curr + c_prev;
    if total <= 0.0 {
        return None;
    }
    let v = (c_curr * v_curr + c_prev * v_prev) / total;
    let c = (c_curr * c_curr + c_prev * c_prev) / total;
    Some((v, c))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueLayer {
    pub target_class: String,
    #[serde(skip)]
    pub shape: GridShape,
    pub v: Vec<f64>,
    pub c: Vec<f64>,
    pub u: Vec<u32>,
}

impl ValueLayer {
    pub fn new(target_class: impl Into<String>, shape: GridShape) -> Self {
        ValueLayer {
            target_class: target_class.into(),
            shape,
            v: vec![0.0; shape.len()],
            c: vec![0.0; shape.len()],
            u: vec![0; shape.len()],
        }
    }
}

/// Fuses one frame into every layer.
///
/// Each visible cell gets the frame's score for the layer's class with the
/// cone confidence at its bearing; its update count goes up by one. Layers
/// whose class has no score in the frame are skipped.
pub fn update_layers(layers: &mut [ValueLayer], frame: &SensorFrame, fov: f64) {
    let Some(first) = layers.first() else { return };
    let shape = first.shape;
    let weights: Vec<(usize, f64)> = frame
        .visible_cells
        .iter()
        .filter_map(|&cell| {
            let offset = bearing_offset(shape, &frame.pose, cell);
            cone_confidence(offset, fov).map(|c| (shape.index(cell), c))
        })
        .collect();
    for layer in layers.iter_mut() {
        let Some(&score) = frame.scores.get(&layer.target_class) else {
            continue;
        };
        for &(i, c_curr) in &weights {
            if let Some((v, c)) = fuse_cell(score, c_curr, layer.v[i], layer.c[i]) {
                layer.v[i] = v;
                layer.c[i] = c;
                layer.u[i] += 1;
            }
        }
    }
}

/// Shared value map built from the layers of the remaining targets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharedValueMap {
    #[serde(skip)]
    pub shape: GridShape,
    pub v: Vec<f64>,
    pub contributing_classes: Vec<String>,
}

impl SharedValueMap {
    pub fn get(&self, cell: crate::grid::Cell) -> f64 {
        self.v[self.shape.index(cell)]
    }
}

/// Min-max normalizes each layer over its observed cells (a constant layer
/// maps to 0.5) and averages the results. Cells never observed in any layer
/// get 0; an unobserved cell contributes 0 from that layer.
pub fn aggregate(layers: &[ValueLayer]) -> SharedValueMap {
    assert!(!layers.is_empty(), "aggregate needs at least one layer");
    let shape = layers[0].shape;
    let mut sum = vec![0.0; shape.len()];
    for layer in layers {
        let observed = || layer.v.iter().zip(&layer.u).filter(|(_, &u)| u > 0).map(|(&v, _)| v);
        let lo = observed().fold(f64::INFINITY, f64::min);
        let hi = observed().fold(f64::NEG_INFINITY, f64::max);
        for (i, acc) in sum.iter_mut().enumerate() {
            if layer.u[i] == 0 {
                continue;
            }
            *acc += if hi > lo { (layer.v[i] - lo) / (hi - lo) } else { 0.5 };
        }
    }
    let n = layers.len() as f64;
    SharedValueMap {
        shape,
        v: sum.into_iter().map(|s| (s / n).clamp(0.0, 1.0)).collect(),
        contributing_classes: layers.iter().map(|l| l.target_class.clone()).collect(),
    }
}

/// Cellwise maximum update count across layers.
pub fn combined_updates(layers: &[ValueLayer]) -> Vec<u32> {
    let len = layers.first().map_or(0, |l| l.u.len());
    (0..len)
        .map(|i| layers.iter().map(|l| l.u[i]).max().unwrap_or(0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cell;
    use crate::sim::Pose;
    use proptest::prelude::*;
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    #[test]
    fn cone_examples() {
        let fov = 79f64.to_radians();
        assert_eq!(cone_confidence(0.0, fov), Some(1.0));
        assert!(cone_confidence(fov / 2.0, fov).unwrap().abs() < 1e-15);
        assert!((cone_confidence(fov / 4.0, fov).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(cone_confidence(fov / 2.0 + 1e-6, fov), None);
    }

    #[test]
    fn fuse_examples() {
        let (v, c) = fuse_cell(0.7, 0.4, 0.123, 0.0).unwrap();
        assert!((v - 0.7).abs() < 1e-15 && (c - 0.4).abs() < 1e-15);
        let (v, c) = fuse_cell(0.2, 0.3, 0.6, 0.3).unwrap();
        assert!((v - 0.4).abs() < 1e-15 && (c - 0.3).abs() < 1e-15);
        let (v, c) = fuse_cell(0.8, 0.5, 0.2, 0.25).unwrap();
        assert!((v - 0.6).abs() < 1e-12);
        assert!((c - 0.3125 / 0.75).abs() < 1e-12);
        assert_eq!(fuse_cell(0.5, 0.0, 0.5, 0.0), None);
    }

    proptest! {
        #[test]
        fn fusion_is_convex_and_confidence_biased(
            vc in 0.0..=1.0f64, cc in 0.0..=1.0f64, vp in 0.0..=1.0f64, cp in 0.0..=1.0f64,
        ) {
            prop_assume!(cc + cp > 1e-9);
            let (v, c) = fuse_cell(vc, cc, vp, cp).unwrap();
            prop_assert!(v >= vc.min(vp) - 1e-12 && v <= vc.max(vp) + 1e-12);
            prop_assert!(c >= cc.min(cp) - 1e-12 && c <= cc.max(cp) + 1e-12);
            // closer to the larger confidence than the plain mean is
            prop_assert!(c >= (cc + cp) / 2.0 - 1e-12);
        }
    }

    fn frame(pose: Pose, cells: &[Cell], class: &str, score: f64) -> SensorFrame {
        let mut scores = BTreeMap::new();
        scores.insert(class.to_string(), score);
        let mut visible_cells = cells.to_vec();
        visible_cells.sort();
        SensorFrame {
            pose,
            visible_cells,
            obstacle_hits: vec![],
            detections: vec![],
            scores,
        }
    }

    #[test]
    fn empty_frame_changes_nothing() {
        let shape = GridShape::new(5, 5, 1.0);
        let mut layers = vec![ValueLayer::new("mug", shape)];
        let before = layers.clone();
        let f = frame(Pose::at_cell(shape, Cell::new(2, 2), 0.0), &[], "mug", 0.9);
        update_layers(&mut layers, &f, PI / 2.0);
        assert_eq!(layers, before);
    }

    #[test]
    fn first_observation_takes_score_and_cone_value() {
        let shape = GridShape::new(5, 5, 1.0);
        let mut layers = vec![ValueLayer::new("mug", shape)];
        let pose = Pose::at_cell(shape, Cell::new(0, 0), 0.0);
        let target = Cell::new(3, 1);
        let f = frame(pose, &[target], "mug", 0.9);
        update_layers(&mut layers, &f, PI / 2.0);
        let i = shape.index(target);
        let offset = (1.0f64).atan2(3.0);
        let expect_c = ((offset / (PI / 4.0)) * PI / 2.0).cos().powi(2);
        assert!((layers[0].v[i] - 0.9).abs() < 1e-15);
        assert!((layers[0].c[i] - expect_c).abs() < 1e-12);
        assert_eq!(layers[0].u[i], 1);
        assert_eq!(layers[0].u.iter().sum::<u32>(), 1);
    }

    #[test]
    fn aggregate_single_and_identical_layers() {
        let shape = GridShape::new(2, 2, 1.0);
        let mut a = ValueLayer::new("a", shape);
        a.v = vec![0.2, 0.6, 0.4, 0.0];
        a.u = vec![1, 2, 1, 0];
        let one = aggregate(&[a.clone()]);
        for (got, want) in one.v.iter().zip([0.0, 1.0, 0.5, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let mut b = a.clone();
        b.target_class = "b".into();
        assert_eq!(aggregate(&[a, b]).v, one.v);
    }

    #[test]
    fn constant_layer_normalizes_to_half() {
        let shape = GridShape::new(3, 1, 1.0);
        let mut a = ValueLayer::new("a", shape);
        a.v = vec![0.3, 0.3, 0.0];
        a.u = vec![1, 4, 0];
        assert_eq!(aggregate(&[a]).v, vec![0.5, 0.5, 0.0]);
    }
}
