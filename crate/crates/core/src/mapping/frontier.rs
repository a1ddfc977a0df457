//! Frontier extraction: chains of free cells bordering unknown space.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::grid::{Cell, CellState, OccupancyGrid};
use crate::mapping::value::SharedValueMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frontier {
    /// Midpoint of the chain; an exploration waypoint.
    pub cell: Cell,
    /// Mean shared value over the chain.
    pub score: f64,
    pub len: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FrontierSet {
    pub frontiers: Vec<Frontier>,
}

impl FrontierSet {
    pub fn is_empty(&self) -> bool {
        self.frontiers.is_empty()
    }

    /// Highest-scoring frontier; ties go to the lowest row-major cell.
    pub fn best(&self, width: usize) -> Option<Frontier> {
        let key = |f: &Frontier| f.cell.y as usize * width + f.cell.x as usize;
        self.frontiers.iter().copied().reduce(|best, f| {
            if f.score > best.score || (f.score == best.score && key(&f) < key(&best)) {
                f
            } else {
                best
            }
        })
    }
}

/// Free cell with at least one unknown 8-neighbour.
pub fn is_frontier_cell(grid: &OccupancyGrid, c: Cell) -> bool {
    grid.is_free(c)
        && c.neighbors8()
            .any(|n| grid.contains(n) && grid.get(n) == CellState::Unknown)
}

/// BFS over the component from `start`; returns (cell, hop distance, parent).
fn bfs(members: &[bool], grid: &OccupancyGrid, start: Cell) -> Vec<(Cell, usize, Option<Cell>)> {
    let shape = grid.shape();
    let mut seen = vec![false; shape.len()];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([(start, 0usize, None)]);
    seen[shape.index(start)] = true;
    while let Some((c, d, p)) = queue.pop_front() {
        order.push((c, d, p));
        for n in c.neighbors8() {
            if grid.contains(n) && members[shape.index(n)] && !seen[shape.index(n)] {
                seen[shape.index(n)] = true;
                queue.push_back((n, d + 1, Some(c)));
            }
        }
    }
    order
}

/// Farthest cell in a BFS order; ties go to the lowest row-major cell.
fn farthest(order: &[(Cell, usize, Option<Cell>)]) -> Cell {
    order
        .iter()
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| (b.0.y, b.0.x).cmp(&(a.0.y, a.0.x))))
        .expect("component is non-empty")
        .0
}

/// Groups frontier cells into 8-connected chains and emits one waypoint per
/// chain of at least `min_len` cells.
///
/// A chain's midpoint is the middle cell of the hop-shortest path between its
/// two ends, where the ends are found by a double sweep: the cell farthest
/// from the chain's first row-major cell, then the cell farthest from that.
pub fn extract_frontiers(grid: &OccupancyGrid, shared: &SharedValueMap, min_len: usize) -> FrontierSet {
    let shape = grid.shape();
    let members: Vec<bool> = shape.cells().map(|c| is_frontier_cell(grid, c)).collect();
    let mut assigned = vec![false; shape.len()];
    let mut out = FrontierSet::default();
    for i in 0..shape.len() {
        if !members[i] || assigned[i] {
            continue;
        }
        let seed = shape.cell(i);
        let sweep = bfs(&members, grid, seed);
        for &(c, _, _) in &sweep {
            assigned[shape.index(c)] = true;
        }
        if sweep.len() < min_len.max(1) {
            continue;
        }
        let end_a = farthest(&sweep);
        let from_a = bfs(&members, grid, end_a);
        let end_b = farthest(&from_a);
        let mut path = vec![end_b];
        let parents: HashMap<Cell, Cell> = from_a.iter().filter_map(|e| e.2.map(|p| (e.0, p))).collect();
        while let Some(&p) = parents.get(path.last().unwrap()) {
            path.push(p);
        }
        path.reverse();
        let mid = path[(path.len() - 1) / 2];
        let score = sweep.iter().map(|e| shared.get(e.0)).sum::<f64>() / sweep.len() as f64;
        out.frontiers.push(Frontier {
            cell: mid,
            score,
            len: sweep.len(),
        });
    }
    out
}
