//! Reference implementations and fixture builders shared by the integration
//! tests. Everything here is written independently of the library code it
//! checks: plain loops, floats, no shared helpers.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use mosearch::mapping::{extract_frontiers, SharedValueMap};
use mosearch::planner::{observation_prob, PlanAction, PlannerModel};
use mosearch::sim::{NoiseSpec, ObjectInstance, SensorSpec};
use mosearch::{Cell, CellState, GridShape, OccupancyGrid, Pose, Scenario};

/// Grid from rows of `#` (obstacle), `.` (free) and `?` (unknown).
pub fn grid(rows: &[&str], resolution: f64) -> OccupancyGrid {
    let shape = GridShape::new(rows[0].len(), rows.len(), resolution);
    let mut g = OccupancyGrid::unknown(shape);
    for (y, row) in rows.iter().enumerate() {
        for (x, ch) in row.chars().enumerate() {
            let s = match ch {
                '#' => CellState::Obstacle,
                '.' => CellState::Free,
                _ => CellState::Unknown,
            };
            g.set(Cell::new(x as i32, y as i32), s);
        }
    }
    g
}

/// A scenario on `rows` with the given objects; the first object's class
/// is the only target unless `targets` is given.
pub fn scenario(
    rows: &[&str],
    resolution: f64,
    start: Cell,
    heading: f64,
    objects: &[(&str, Cell)],
    targets: &[&str],
) -> Scenario {
    let truth = grid(rows, resolution);
    let shape = truth.shape();
    Scenario {
        shape,
        truth,
        object_instances: objects
            .iter()
            .map(|&(class, cell)| ObjectInstance {
                class_label: class.to_string(),
                cell,
            })
            .collect(),
        target_classes: targets.iter().map(|s| s.to_string()).collect(),
        robot_start: Pose::at_cell(shape, start, heading),
        seed: 17,
        sensor: SensorSpec {
            miss_prob: 0.0,
            ..SensorSpec::default()
        },
        noise: NoiseSpec::default(),
    }
}

pub fn open_rows(w: usize, h: usize) -> Vec<String> {
    (0..h)
        .map(|y| {
            (0..w)
                .map(|x| {
                    if x == 0 || y == 0 || x == w - 1 || y == h - 1 {
                        '#'
                    } else {
                        '.'
                    }
                })
                .collect()
        })
        .collect()
}

pub fn as_strs(rows: &[String]) -> Vec<&str> {
    rows.iter().map(String::as_str).collect()
}

/// Dijkstra over 8 neighbours with float costs and the no-corner-cut rule,
/// on a grid where only `Free` cells are passable. Returns cell-unit costs.
pub fn dijkstra_ref(g: &OccupancyGrid, from: Cell) -> Vec<Option<f64>> {
    let (w, h) = (g.width() as i32, g.height() as i32);
    let idx = |c: Cell| (c.y * w + c.x) as usize;
    let mut dist = vec![None::<f64>; (w * h) as usize];
    let mut done = vec![false; (w * h) as usize];
    dist[idx(from)] = Some(0.0);
    loop {
        let mut best: Option<(f64, Cell)> = None;
        for y in 0..h {
            for x in 0..w {
                let c = Cell::new(x, y);
                if let (false, Some(d)) = (done[idx(c)], dist[idx(c)]) {
                    if best.is_none_or(|(b, _)| d < b) {
                        best = Some((d, c));
                    }
                }
            }
        }
        let Some((d, c)) = best else { break };
        done[idx(c)] = true;
        for dy in -1..=1 {
            for dx in -1..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let n = Cell::new(c.x + dx, c.y + dy);
                if n.x < 0 || n.y < 0 || n.x >= w || n.y >= h || g.get(n) != CellState::Free {
                    continue;
                }
                let diagonal = dx != 0 && dy != 0;
                if diagonal
                    && g.get(Cell::new(c.x + dx, c.y)) == CellState::Obstacle
                    && g.get(Cell::new(c.x, c.y + dy)) == CellState::Obstacle
                {
                    continue;
                }
                let nd = d + if diagonal { std::f64::consts::SQRT_2 } else { 1.0 };
                if dist[idx(n)].is_none_or(|old| nd < old - 1e-12) {
                    dist[idx(n)] = Some(nd);
                }
            }
        }
    }
    dist
}

pub fn ref_length(g: &OccupancyGrid, a: Cell, b: Cell) -> Option<f64> {
    dijkstra_ref(g, a)[(b.y * g.width() as i32 + b.x) as usize].map(|d| d * g.resolution())
}

/// Every ordering of `items`.
pub fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// O(n²) DBSCAN. Core points are linked when within `eps`; each linked
/// component is a cluster, numbered by its lowest core index. A border
/// point belongs to the lowest-numbered cluster with a core within `eps`.
/// Returns clusters as sets of point indices.
pub fn dbscan_ref(points: &[[f64; 2]], eps: f64, min_pts: usize) -> Vec<HashSet<usize>> {
    let n = points.len();
    let close = |i: usize, j: usize| (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1]) <= eps;
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| close(i, j)).count() >= min_pts)
        .collect();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(comp: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while comp[r] != r {
            r = comp[r];
        }
        comp[i] = r;
        r
    }
    for i in 0..n {
        for j in 0..i {
            if core[i] && core[j] && close(i, j) {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                let (lo, hi) = (a.min(b), a.max(b));
                comp[hi] = lo;
            }
        }
    }
    // roots are the lowest index in each component
    let mut label = vec![None::<usize>; n];
    for i in 0..n {
        if core[i] {
            label[i] = Some(find(&mut comp, i));
        }
    }
    for i in 0..n {
        if !core[i] {
            label[i] = (0..n)
                .filter(|&j| core[j] && close(i, j))
                .map(|j| find(&mut comp, j))
                .min();
        }
    }
    let mut roots: Vec<usize> = label.iter().flatten().copied().collect();
    roots.sort_unstable();
    roots.dedup();
    roots
        .iter()
        .map(|&r| (0..n).filter(|&i| label[i] == Some(r)).collect())
        .collect()
}

/// Exact expected-value search over the planner's generative model: the
/// target is drawn from `belief`, robot moves are deterministic, each step
/// yields a binary observation, and the posterior is formed explicitly.
/// Returns the optimal value of every root action.
pub fn expectimax(
    belief: &[(Cell, f64)],
    robot: Cell,
    actions: &[PlanAction],
    model: &PlannerModel,
    resolution: f64,
) -> Vec<f64> {
    fn value(
        belief: &[(Cell, f64)],
        robot: Cell,
        actions: &[PlanAction],
        model: &PlannerModel,
        res: f64,
        depth: usize,
    ) -> f64 {
        if depth == model.depth {
            return 0.0;
        }
        actions
            .iter()
            .map(|a| q(belief, robot, a, actions, model, res, depth))
            .fold(f64::NEG_INFINITY, f64::max)
    }
    fn q(
        belief: &[(Cell, f64)],
        robot: Cell,
        a: &PlanAction,
        actions: &[PlanAction],
        model: &PlannerModel,
        res: f64,
        depth: usize,
    ) -> f64 {
        let dx = (a.goal.x - robot.x) as f64;
        let dy = (a.goal.y - robot.y) as f64;
        let moved = dx.hypot(dy) * res;
        let mut total = 0.0;
        let mut post = [Vec::new(), Vec::new()];
        let mut mass = [0.0, 0.0];
        for &(t, p) in belief {
            let d = ((t.x - a.goal.x) as f64).hypot((t.y - a.goal.y) as f64) * res;
            let mut r = -model.lambda_move * moved;
            if a.kind == mosearch::planner::ActionKind::Frontier {
                r += model.lambda_frontier;
            }
            if d <= model.delta {
                r += model.lambda_target;
            }
            total += p * r;
            let p1 = observation_prob(d, model);
            for (o, po) in [(0, 1.0 - p1), (1, p1)] {
                if p * po > 0.0 {
                    post[o].push((t, p * po));
                    mass[o] += p * po;
                }
            }
        }
        for o in 0..2 {
            if mass[o] > 0.0 {
                let b: Vec<(Cell, f64)> = post[o].iter().map(|&(t, w)| (t, w / mass[o])).collect();
                total += model.gamma * mass[o] * value(&b, a.goal, actions, model, res, depth + 1);
            }
        }
        total
    }
    actions
        .iter()
        .map(|a| q(belief, robot, a, actions, model, resolution, 0))
        .collect()
}

/// Brute-force frontier cells and their 8-connected components.
pub fn reference_chains(g: &OccupancyGrid) -> Vec<Vec<Cell>> {
    let (w, h) = (g.width() as i32, g.height() as i32);
    let inside = |c: Cell| c.x >= 0 && c.y >= 0 && c.x < w && c.y < h;
    let is_frontier = |c: Cell| {
        g.get(c) == CellState::Free
            && (-1..=1).any(|dy| {
                (-1..=1).any(|dx| {
                    let n = Cell::new(c.x + dx, c.y + dy);
                    (dx, dy) != (0, 0) && inside(n) && g.get(n) == CellState::Unknown
                })
            })
    };
    let cells: Vec<Cell> = g.shape().cells().filter(|&c| is_frontier(c)).collect();
    let mut seen = HashSet::new();
    let mut chains = Vec::new();
    for &c in &cells {
        if !seen.insert(c) {
            continue;
        }
        let mut chain = vec![];
        let mut queue = VecDeque::from([c]);
        while let Some(p) = queue.pop_front() {
            chain.push(p);
            for &q in &cells {
                if (q.x - p.x).abs() <= 1 && (q.y - p.y).abs() <= 1 && seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        chains.push(chain);
    }
    chains
}

/// Checks `extract_frontiers` against the reference chains: one waypoint
/// per long-enough chain, lying on it, with the chain's size and mean value.
pub fn check_frontiers(g: &OccupancyGrid, shared: &SharedValueMap, min_len: usize) {
    let set = extract_frontiers(g, shared, min_len);
    let chains: Vec<Vec<Cell>> = reference_chains(g)
        .into_iter()
        .filter(|ch| ch.len() >= min_len.max(1))
        .collect();
    assert_eq!(set.frontiers.len(), chains.len());
    for ch in &chains {
        let hits: Vec<_> = set.frontiers.iter().filter(|f| ch.contains(&f.cell)).collect();
        assert_eq!(hits.len(), 1, "one waypoint per chain");
        let f = hits[0];
        assert_eq!(f.len, ch.len());
        let mean = ch.iter().map(|&c| shared.get(c)).sum::<f64>() / ch.len() as f64;
        assert!((f.score - mean).abs() < 1e-12);
    }
}
