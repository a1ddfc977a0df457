//! 8-connected grid paths with no corner cutting.
//!
//! Path costs are kept as `(orthogonal steps, diagonal steps)` and compared
//! exactly, so A* and the Dijkstra reference agree to the last bit.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::grid::{Cell, CellState, OccupancyGrid};

/// Path cost `orth + diag·√2` in cell units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct StepCost {
    pub orth: u32,
    pub diag: u32,
}

impl StepCost {
    pub const ZERO: StepCost = StepCost { orth: 0, diag: 0 };

    pub fn cells(self) -> f64 {
        self.orth as f64 + self.diag as f64 * std::f64::consts::SQRT_2
    }

    pub fn meters(self, resolution: f64) -> f64 {
        self.cells() * resolution
    }

    fn add(self, other: StepCost) -> StepCost {
        StepCost {
            orth: self.orth + other.orth,
            diag: self.diag + other.diag,
        }
    }

    /// Octile distance between two cells.
    pub fn octile(a: Cell, b: Cell) -> StepCost {
        let dx = (a.x - b.x).unsigned_abs();
        let dy = (a.y - b.y).unsigned_abs();
        StepCost {
            orth: dx.max(dy) - dx.min(dy),
            diag: dx.min(dy),
        }
    }
}

impl Ord for StepCost {
    fn cmp(&self, other: &Self) -> Ordering {
        // sign of p + q·√2
        let p = self.orth as i64 - other.orth as i64;
        let q = self.diag as i64 - other.diag as i64;
        match (p.signum(), q.signum()) {
            (0, s) | (s, 0) => s.cmp(&0),
            (a, b) if a == b => a.cmp(&0),
            (a, _) => {
                // opposite signs: compare p² with 2q²
                let lhs = (p * p) as i128;
                let rhs = 2 * (q * q) as i128;
                if a > 0 {
                    lhs.cmp(&rhs)
                } else {
                    rhs.cmp(&lhs)
                }
            }
        }
    }
}

impl PartialOrd for StepCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub cells: Vec<Cell>,
    pub cost: StepCost,
    /// Meters.
    pub length: f64,
}

fn passable(grid: &OccupancyGrid, c: Cell, unknown_is_free: bool) -> bool {
    match grid.get(c) {
        CellState::Free => true,
        CellState::Unknown => unknown_is_free && grid.contains(c),
        CellState::Obstacle => false,
    }
}

/// Moves out of `c`, honoring the corner rule: a diagonal step is refused
/// when both orthogonal cells it squeezes between are obstacles.
pub(crate) fn moves(
    grid: &OccupancyGrid,
    c: Cell,
    unknown_is_free: bool,
) -> impl Iterator<Item = (Cell, StepCost)> + '_ {
    crate::grid::NEIGHBORS8.iter().filter_map(move |&(dx, dy)| {
        let n = Cell::new(c.x + dx, c.y + dy);
        if !passable(grid, n, unknown_is_free) {
            return None;
        }
        if dx != 0 && dy != 0 {
            let a = Cell::new(c.x + dx, c.y);
            let b = Cell::new(c.x, c.y + dy);
            if grid.is_obstacle(a) && grid.is_obstacle(b) {
                return None;
            }
            Some((n, StepCost { orth: 0, diag: 1 }))
        } else {
            Some((n, StepCost { orth: 1, diag: 0 }))
        }
    })
}

fn finish(grid: &OccupancyGrid, parent: &[usize], goal: Cell, cost: StepCost) -> PathResult {
    let shape = grid.shape();
    let mut cells = vec![goal];
    let mut i = shape.index(goal);
    while parent[i] != usize::MAX {
        i = parent[i];
        cells.push(shape.cell(i));
    }
    cells.reverse();
    PathResult {
        cells,
        cost,
        length: cost.meters(shape.resolution),
    }
}

/// Optimal 8-connected path by A* with the octile heuristic.
pub fn shortest_path(grid: &OccupancyGrid, from: Cell, to: Cell, unknown_is_free: bool) -> Result<PathResult> {
    let shape = grid.shape();
    let no_path = || Error::NoPath { from, to };
    if !grid.contains(from) || !passable(grid, to, unknown_is_free) {
        return Err(no_path());
    }
    let n = shape.len();
    let mut g = vec![None::<StepCost>; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    let start = shape.index(from);
    g[start] = Some(StepCost::ZERO);
    open.push(Reverse((StepCost::octile(from, to), StepCost::octile(from, to), start)));
    while let Some(Reverse((_, _, i))) = open.pop() {
        if closed[i] {
            continue;
        }
        closed[i] = true;
        let c = shape.cell(i);
        let gc = g[i].expect("opened nodes have a cost");
        if c == to {
            return Ok(finish(grid, &parent, to, gc));
        }
        for (nb, step) in moves(grid, c, unknown_is_free) {
            let j = shape.index(nb);
            if closed[j] {
                continue;
            }
            let cand = gc.add(step);
            if g[j].is_none_or(|old| cand < old) {
                g[j] = Some(cand);
                parent[j] = i;
                let h = StepCost::octile(nb, to);
                open.push(Reverse((cand.add(h), h, j)));
            }
        }
    }
    Err(no_path())
}

/// Single-source Dijkstra costs from `from`; `None` where unreachable.
pub fn dijkstra_costs(grid: &OccupancyGrid, from: Cell, unknown_is_free: bool) -> Vec<Option<StepCost>> {
    let shape = grid.shape();
    let mut dist = vec![None::<StepCost>; shape.len()];
    if !grid.contains(from) {
        return dist;
    }
    let mut heap = BinaryHeap::new();
    let s = shape.index(from);
    dist[s] = Some(StepCost::ZERO);
    heap.push(Reverse((StepCost::ZERO, s)));
    while let Some(Reverse((d, i))) = heap.pop() {
        if dist[i].is_some_and(|best| d > best) {
            continue;
        }
        for (nb, step) in moves(grid, shape.cell(i), unknown_is_free) {
            let j = shape.index(nb);
            let cand = d.add(step);
            if dist[j].is_none_or(|old| cand < old) {
                dist[j] = Some(cand);
                heap.push(Reverse((cand, j)));
            }
        }
    }
    dist
}

/// Path length by Dijkstra, used as the reference for A*.
pub fn dijkstra_length(grid: &OccupancyGrid, from: Cell, to: Cell, unknown_is_free: bool) -> Result<f64> {
    if !grid.contains(to) {
        return Err(Error::NoPath { from, to });
    }
    dijkstra_costs(grid, from, unknown_is_free)[grid.shape().index(to)]
        .map(|c| c.meters(grid.resolution()))
        .ok_or(Error::NoPath { from, to })
}

/// Shortest open tour from `start` visiting every target, in meters.
pub fn optimal_tour_length(truth: &OccupancyGrid, start: Cell, targets: &[Cell]) -> Result<f64> {
    let groups: Vec<Vec<Cell>> = targets.iter().map(|&t| vec![t]).collect();
    optimal_group_tour_length(truth, start, &groups)
}

/// Shortest open tour visiting one cell from each group; groups model
/// classes with several instances.
pub fn optimal_group_tour_length(truth: &OccupancyGrid, start: Cell, groups: &[Vec<Cell>]) -> Result<f64> {
    if groups.len() > 6 {
        return Err(Error::Config(format!(
            "tour over {} targets; at most 6 supported",
            groups.len()
        )));
    }
    let shape = truth.shape();
    let nodes: Vec<Cell> = std::iter::once(start).chain(groups.iter().flatten().copied()).collect();
    let tables: Vec<Vec<Option<StepCost>>> = nodes.iter().map(|&c| dijkstra_costs(truth, c, false)).collect();
    let dist = |a: usize, b: Cell| tables[a][shape.index(b)].map(StepCost::cells);

    let mut offset = 1;
    let mut group_nodes = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        let reachable: Vec<usize> = (0..g.len())
            .map(|k| offset + k)
            .filter(|&k| dist(0, nodes[k]).is_some())
            .collect();
        if reachable.is_empty() {
            return Err(Error::UnreachableTarget {
                index: gi,
                cell: g.first().copied().unwrap_or(start),
            });
        }
        group_nodes.push(reachable);
        offset += g.len();
    }

    fn search(
        at: usize,
        so_far: f64,
        remaining: &mut Vec<usize>,
        group_nodes: &[Vec<usize>],
        nodes: &[Cell],
        dist: &dyn Fn(usize, Cell) -> Option<f64>,
        best: &mut f64,
    ) {
        if remaining.is_empty() {
            *best = best.min(so_far);
            return;
        }
        for k in 0..remaining.len() {
            let gi = remaining.swap_remove(k);
            for &node in &group_nodes[gi] {
                if let Some(d) = dist(at, nodes[node]) {
                    search(node, so_far + d, remaining, group_nodes, nodes, dist, best);
                }
            }
            remaining.push(gi);
            let last = remaining.len() - 1;
            remaining.swap(k, last);
        }
    }

    let mut best = f64::INFINITY;
    let mut remaining: Vec<usize> = (0..groups.len()).collect();
    search(0, 0.0, &mut remaining, &group_nodes, &nodes, &dist, &mut best);
    Ok(best * shape.resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridShape;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn open(w: usize, h: usize, res: f64) -> OccupancyGrid {
        OccupancyGrid::filled(GridShape::new(w, h, res), CellState::Free)
    }

    fn random_grid(rng: &mut ChaCha8Rng, w: usize, h: usize, density: f64) -> OccupancyGrid {
        let mut g = open(w, h, 0.25);
        for c in g.shape().cells().collect::<Vec<_>>() {
            if rng.gen::<f64>() < density {
                g.set(c, CellState::Obstacle);
            }
        }
        g
    }

    #[test]
    fn cost_ordering_is_exact() {
        let a = StepCost { orth: 3, diag: 0 };
        let b = StepCost { orth: 0, diag: 2 };
        assert!(a > b); // 3 > 2.828
        let c = StepCost { orth: 1, diag: 1 };
        let d = StepCost { orth: 0, diag: 2 };
        assert!(c < d);
        assert_eq!(
            StepCost { orth: 2, diag: 1 }.cmp(&StepCost { orth: 2, diag: 1 }),
            Ordering::Equal
        );
    }

    #[test]
    fn same_cell_has_zero_length() {
        let g = open(5, 5, 0.5);
        let p = shortest_path(&g, Cell::new(2, 2), Cell::new(2, 2), false).unwrap();
        assert_eq!(p.length, 0.0);
        assert_eq!(p.cells, vec![Cell::new(2, 2)]);
    }

    #[test]
    fn open_diagonal() {
        let g = open(10, 10, 0.5);
        let p = shortest_path(&g, Cell::new(0, 0), Cell::new(9, 9), false).unwrap();
        assert_eq!(p.length, 9.0 * std::f64::consts::SQRT_2 * 0.5);
        assert_eq!(p.cells.len(), 10);
    }

    #[test]
    fn no_corner_cutting() {
        let mut g = open(3, 3, 1.0);
        g.set(Cell::new(1, 0), CellState::Obstacle);
        g.set(Cell::new(0, 1), CellState::Obstacle);
        assert!(shortest_path(&g, Cell::new(0, 0), Cell::new(1, 1), false).is_err());
        g.set(Cell::new(0, 1), CellState::Free);
        let p = shortest_path(&g, Cell::new(0, 0), Cell::new(1, 1), false).unwrap();
        assert_eq!(p.cost, StepCost { orth: 0, diag: 1 });
    }

    #[test]
    fn unknown_cells_only_when_allowed() {
        let mut g = OccupancyGrid::unknown(GridShape::new(5, 1, 1.0));
        g.set(Cell::new(0, 0), CellState::Free);
        g.set(Cell::new(4, 0), CellState::Free);
        assert!(shortest_path(&g, Cell::new(0, 0), Cell::new(4, 0), false).is_err());
        assert_eq!(
            shortest_path(&g, Cell::new(0, 0), Cell::new(4, 0), true)
                .unwrap()
                .length,
            4.0
        );
    }

    #[test]
    fn astar_matches_dijkstra_on_random_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let g = random_grid(&mut rng, 25, 25, 0.3);
            let a = Cell::new(rng.gen_range(0..25), rng.gen_range(0..25));
            let b = Cell::new(rng.gen_range(0..25), rng.gen_range(0..25));
            if g.is_obstacle(a) {
                continue;
            }
            let astar = shortest_path(&g, a, b, false).map(|p| p.length).ok();
            let dij = dijkstra_length(&g, a, b, false).ok();
            assert_eq!(astar, dij);
        }
    }

    #[test]
    fn paths_are_valid_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = random_grid(&mut rng, 30, 30, 0.25);
        let a = g.shape().cells().find(|&c| g.is_free(c)).unwrap();
        for b in g.shape().cells().filter(|&c| g.is_free(c)).step_by(37) {
            if let Ok(p) = shortest_path(&g, a, b, false) {
                let mut total = StepCost::ZERO;
                for w in p.cells.windows(2) {
                    let step = moves(&g, w[0], false).find(|(n, _)| *n == w[1]).expect("adjacent move");
                    total = total.add(step.1);
                }
                assert_eq!(total, p.cost);
            }
        }
    }

    #[test]
    fn tour_of_one_is_the_path() {
        let g = open(12, 12, 0.25);
        let t = optimal_tour_length(&g, Cell::new(0, 0), &[Cell::new(7, 3)]).unwrap();
        let p = shortest_path(&g, Cell::new(0, 0), Cell::new(7, 3), false).unwrap();
        assert!((t - p.length).abs() < 1e-12);
    }

    #[test]
    fn symmetric_targets_either_order() {
        let g = open(11, 11, 1.0);
        let t = optimal_tour_length(&g, Cell::new(5, 5), &[Cell::new(0, 5), Cell::new(10, 5)]).unwrap();
        assert!((t - 15.0).abs() < 1e-12);
    }

    #[test]
    fn unreachable_target_is_named() {
        let mut g = open(5, 5, 1.0);
        for c in Cell::new(3, 3).neighbors8().collect::<Vec<_>>() {
            g.set(c, CellState::Obstacle);
        }
        match optimal_tour_length(&g, Cell::new(0, 0), &[Cell::new(0, 4), Cell::new(3, 3)]) {
            Err(Error::UnreachableTarget { index, cell }) => {
                assert_eq!(index, 1);
                assert_eq!(cell, Cell::new(3, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
