use std::collections::BTreeMap;

use serde::Serialize;

use crate::grid::Cell;
use crate::sim::SensorFrame;

/// Every detected object, keyed by class. Entries are only ever added.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ObjectMap {
    pub entries: BTreeMap<String, Vec<(Cell, u64)>>,
}

impl ObjectMap {
    pub fn record(&mut self, frame: &SensorFrame, step: u64) {
        for det in &frame.detections {
            let list = self.entries.entry(det.class_label.clone()).or_default();
            if !list.iter().any(|(c, _)| *c == det.cell) {
                list.push((det.cell, step));
            }
        }
    }

    pub fn cells_of(&self, class: &str) -> impl Iterator<Item = Cell> + '_ {
        self.entries.get(class).into_iter().flatten().map(|(c, _)| *c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Detection, Pose};

    #[test]
    fn one_entry_per_class_and_cell() {
        let frame = SensorFrame {
            pose: Pose {
                x: 0.5,
                y: 0.5,
                heading: 0.0,
            },
            visible_cells: vec![Cell::new(1, 1)],
            obstacle_hits: vec![],
            detections: vec![Detection {
                class_label: "mug".into(),
                cell: Cell::new(1, 1),
            }],
            scores: Default::default(),
        };
        let mut m = ObjectMap::default();
        m.record(&frame, 2);
        m.record(&frame, 5);
        assert_eq!(m.entries["mug"], vec![(Cell::new(1, 1), 2)]);
    }
}
