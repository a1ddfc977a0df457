//! Cell coordinates and the ternary occupancy grid shared by every map.

use serde::{Deserialize, Serialize};

/// A grid cell. `x` is the column (east), `y` the row (south); row 0 is north.
/// Cells order row-major: by `y`, then `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    /// Euclidean distance in cell units.
    pub fn dist(self, other: Cell) -> f64 {
        let dx = (self.x - other.x) as f64;
        let dy = (self.y - other.y) as f64;
        dx.hypot(dy)
    }

    /// The 8 neighbours, in a fixed order.
    pub fn neighbors8(self) -> impl Iterator<Item = Cell> {
        NEIGHBORS8
            .iter()
            .map(move |&(dx, dy)| Cell::new(self.x + dx, self.y + dy))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub(crate) const NEIGHBORS8: [(i32, i32); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellState {
    Unknown,
    Free,
    Obstacle,
}

/// Width, height and metric resolution of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridShape {
    pub width: usize,
    pub height: usize,
    /// Meters per cell.
    pub resolution: f64,
}

impl GridShape {
    pub fn new(width: usize, height: usize, resolution: f64) -> Self {
        GridShape {
            width,
            height,
            resolution,
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as usize) < self.width && (c.y as usize) < self.height
    }

    /// Row-major index. Panics on out-of-bounds cells in debug builds.
    pub fn index(&self, c: Cell) -> usize {
        debug_assert!(self.contains(c), "cell {c} outside {}x{}", self.width, self.height);
        c.y as usize * self.width + c.x as usize
    }

    pub fn cell(&self, index: usize) -> Cell {
        Cell::new((index % self.width) as i32, (index / self.width) as i32)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.len()).map(move |i| self.cell(i))
    }

    /// Metric position of a cell center.
    pub fn center(&self, c: Cell) -> (f64, f64) {
        (
            (c.x as f64 + 0.5) * self.resolution,
            (c.y as f64 + 0.5) * self.resolution,
        )
    }

    /// The cell containing a metric point.
    pub fn cell_at(&self, x: f64, y: f64) -> Cell {
        Cell::new(
            (x / self.resolution).floor() as i32,
            (y / self.resolution).floor() as i32,
        )
    }

    /// Euclidean distance between two cell centers, in meters.
    pub fn meters(&self, a: Cell, b: Cell) -> f64 {
        a.dist(b) * self.resolution
    }
}

/// Ternary obstacle/free/unknown map.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    shape: GridShape,
    cells: Vec<CellState>,
}

impl OccupancyGrid {
    /// A grid with every cell in `fill`.
    pub fn filled(shape: GridShape, fill: CellState) -> Self {
        OccupancyGrid {
            shape,
            cells: vec![fill; shape.len()],
        }
    }

    pub fn unknown(shape: GridShape) -> Self {
        Self::filled(shape, CellState::Unknown)
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn width(&self) -> usize {
        self.shape.width
    }

    pub fn height(&self) -> usize {
        self.shape.height
    }

    pub fn resolution(&self) -> f64 {
        self.shape.resolution
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.shape.contains(c)
    }

    /// State of `c`; cells outside the grid read as `Obstacle`.
    pub fn get(&self, c: Cell) -> CellState {
        if self.shape.contains(c) {
            self.cells[self.shape.index(c)]
        } else {
            CellState::Obstacle
        }
    }

    pub fn set(&mut self, c: Cell, state: CellState) {
        let i = self.shape.index(c);
        self.cells[i] = state;
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.get(c) == CellState::Free
    }

    pub fn is_obstacle(&self, c: Cell) -> bool {
        self.get(c) == CellState::Obstacle
    }

    pub fn states(&self) -> &[CellState] {
        &self.cells
    }

    pub fn count(&self, state: CellState) -> usize {
        self.cells.iter().filter(|&&s| s == state).count()
    }
}
