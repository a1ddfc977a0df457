//! Waypoint following on the robot's own obstacle map.

use crate::error::{Error, Result};
use crate::grid::{Cell, CellState, OccupancyGrid};
use crate::nav;
use crate::sim::scenario::{Pose, Scenario};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Advance {
    pub pose: Pose,
    /// Meters travelled.
    pub distance: f64,
    /// Cell transitions made.
    pub steps: usize,
}

/// Moves the robot toward `waypoint` along A* paths planned on `known`, with
/// unknown cells treated as free.
///
/// Before each cell transition the move is checked against the ground truth.
/// A blocked move marks the offending obstacle cells in `known` and triggers
/// a replan. At most `max_steps` transitions are made (`None` = until the
/// waypoint is reached). Heading follows the last motion segment.
pub fn advance(
    scenario: &Scenario,
    pose: &Pose,
    waypoint: Cell,
    known: &mut OccupancyGrid,
    max_steps: Option<usize>,
) -> Result<Advance> {
    let shape = scenario.shape;
    let truth = &scenario.truth;
    let from = pose.cell(shape);
    let mut here = from;
    let mut heading = pose.heading;
    let mut distance = 0.0;
    let mut steps = 0usize;
    let limit = max_steps.unwrap_or(usize::MAX);

    'outer: while here != waypoint && steps < limit {
        let path = nav::shortest_path(known, here, waypoint, true).map_err(|_| Error::NoPath {
            from: here,
            to: waypoint,
        })?;
        for next in path.cells.iter().skip(1).copied() {
            if steps >= limit {
                break 'outer;
            }
            let mut blocked = false;
            if truth.is_obstacle(next) {
                known.set(next, CellState::Obstacle);
                blocked = true;
            }
            if next.x != here.x && next.y != here.y {
                let a = Cell::new(next.x, here.y);
                let b = Cell::new(here.x, next.y);
                if truth.is_obstacle(a) && truth.is_obstacle(b) {
                    known.set(a, CellState::Obstacle);
                    known.set(b, CellState::Obstacle);
                    blocked = true;
                }
            }
            if blocked {
                continue 'outer;
            }
            distance += shape.meters(here, next);
            heading = ((next.y - here.y) as f64).atan2((next.x - here.x) as f64);
            here = next;
            steps += 1;
            if known.get(here) == CellState::Unknown {
                known.set(here, CellState::Free);
            }
        }
    }
    Ok(Advance {
        pose: Pose::at_cell(shape, here, heading),
        distance,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridShape;
    use crate::sim::scenario::{NoiseSpec, ObjectInstance, SensorSpec};

    fn scenario(width: usize, height: usize, res: f64, walls: &[Cell]) -> Scenario {
        let shape = GridShape::new(width, height, res);
        let mut truth = OccupancyGrid::filled(shape, CellState::Free);
        for &w in walls {
            truth.set(w, CellState::Obstacle);
        }
        Scenario {
            shape,
            truth,
            object_instances: vec![ObjectInstance {
                class_label: "mug".into(),
                cell: Cell::new(width as i32 - 1, 0),
            }],
            target_classes: vec!["mug".into()],
            robot_start: Pose::at_cell(shape, Cell::new(0, 0), 0.0),
            seed: 1,
            sensor: SensorSpec::default(),
            noise: NoiseSpec::default(),
        }
    }

    #[test]
    fn staying_put_costs_nothing() {
        let s = scenario(5, 5, 0.5, &[]);
        let mut known = OccupancyGrid::unknown(s.shape);
        let r = advance(&s, &s.robot_start, Cell::new(0, 0), &mut known, None).unwrap();
        assert_eq!(r.distance, 0.0);
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn straight_corridor() {
        let s = scenario(7, 1, 0.5, &[]);
        let mut known = OccupancyGrid::unknown(s.shape);
        let r = advance(&s, &s.robot_start, Cell::new(6, 0), &mut known, None).unwrap();
        assert!((r.distance - 3.0).abs() < 1e-12);
        assert_eq!(r.steps, 6);
        assert_eq!(r.pose.cell(s.shape), Cell::new(6, 0));
        assert_eq!(r.pose.heading, 0.0);
    }

    #[test]
    fn detour_discovers_hidden_wall() {
        let walls: Vec<Cell> = (0..5).map(|y| Cell::new(3, y)).collect();
        let s = scenario(7, 7, 1.0, &walls);
        let mut known = OccupancyGrid::unknown(s.shape);
        let r = advance(&s, &s.robot_start, Cell::new(6, 0), &mut known, None).unwrap();
        let oracle = nav::dijkstra_length(&s.truth, Cell::new(0, 0), Cell::new(6, 0), false).unwrap();
        assert!(r.distance >= oracle - 1e-12);
        assert_eq!(r.pose.cell(s.shape), Cell::new(6, 0));
        assert!(known.is_obstacle(Cell::new(3, 0)));
    }

    #[test]
    fn step_limit_is_respected() {
        let s = scenario(10, 1, 1.0, &[]);
        let mut known = OccupancyGrid::unknown(s.shape);
        let r = advance(&s, &s.robot_start, Cell::new(9, 0), &mut known, Some(2)).unwrap();
        assert_eq!(r.steps, 2);
        assert_eq!(r.pose.cell(s.shape), Cell::new(2, 0));
    }

    #[test]
    fn enclosed_waypoint_reports_no_path() {
        let walls: Vec<Cell> = (0..3).map(|y| Cell::new(2, y)).collect();
        let s = scenario(5, 3, 1.0, &walls);
        let mut known = OccupancyGrid::unknown(s.shape);
        assert!(matches!(
            advance(&s, &s.robot_start, Cell::new(4, 1), &mut known, None),
            Err(Error::NoPath { .. })
        ));
    }
}
