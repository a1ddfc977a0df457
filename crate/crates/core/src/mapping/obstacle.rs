use crate::grid::{CellState, OccupancyGrid};
use crate::sim::SensorFrame;

/// Marks visible free cells `Free` and ray-hit obstacles `Obstacle`.
/// Known obstacles are never overwritten.
pub fn update_obstacles(grid: &mut OccupancyGrid, frame: &SensorFrame) {
    for &c in &frame.visible_cells {
        if grid.get(c) == CellState::Unknown {
            grid.set(c, CellState::Free);
        }
    }
    for &c in &frame.obstacle_hits {
        grid.set(c, CellState::Obstacle);
    }
}
