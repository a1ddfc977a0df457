//! Field-of-view ray casting on the ground-truth grid.
//!
//! Rays run between cell centers. A ray is blocked by every obstacle cell its
//! segment touches, corners included (supercover). Cell centers sit on
//! half-integer coordinates, so the traversal is done in exact integer
//! arithmetic on doubled coordinates.
//!
//! A free cell is seen when the ray to its center is clear. An obstacle cell
//! is seen when it is the first obstacle touched by the ray to some cell in
//! the cone, so walls met at a grazing angle are still mapped.

use std::f64::consts::PI;

use crate::grid::{Cell, GridShape, OccupancyGrid};
use crate::sim::scenario::{Pose, SensorSpec};

/// Every cell whose closed square the segment between the centers of `a` and
/// `b` touches.
pub fn supercover(a: Cell, b: Cell) -> Vec<Cell> {
    let (a, b) = if a.x <= b.x { (a, b) } else { (b, a) };
    let (ax, ay) = (2 * a.x as i64 + 1, 2 * a.y as i64 + 1);
    let (bx, by) = (2 * b.x as i64 + 1, 2 * b.y as i64 + 1);
    let dx = bx - ax;
    let dy = by - ay;
    if dx == 0 {
        let (lo, hi) = (a.y.min(b.y), a.y.max(b.y));
        return (lo..=hi).map(|y| Cell::new(a.x, y)).collect();
    }
    let mut out = Vec::new();
    // y(x) * dx, exact.
    let scaled_y = |x: i64| ay * dx + (x - ax) * dy;
    let span = 2 * dx;
    for col in a.x..=b.x {
        let xl = (2 * col as i64).max(ax);
        let xr = (2 * col as i64 + 2).min(bx);
        let (y0, y1) = (scaled_y(xl), scaled_y(xr));
        let (lo, hi) = (y0.min(y1), y0.max(y1));
        let first = ceil_div(lo, span) - 1;
        let last = floor_div(hi, span);
        for row in first..=last {
            out.push(Cell::new(col, row as i32));
        }
    }
    out
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// True when no obstacle other than the endpoints lies on the segment.
pub fn line_of_sight(truth: &OccupancyGrid, from: Cell, to: Cell) -> bool {
    supercover(from, to)
        .into_iter()
        .all(|c| c == from || c == to || !truth.is_obstacle(c))
}

/// Absolute angle between the heading and the bearing to `cell`, in `[0, π]`.
/// The robot's own cell has offset 0.
pub fn bearing_offset(shape: GridShape, pose: &Pose, cell: Cell) -> f64 {
    let origin = pose.cell(shape);
    if origin == cell {
        return 0.0;
    }
    let dx = (cell.x - origin.x) as f64;
    let dy = (cell.y - origin.y) as f64;
    let diff = dy.atan2(dx) - pose.heading;
    let wrapped = (diff + PI).rem_euclid(2.0 * PI) - PI;
    wrapped.abs()
}

const ANGLE_EPS: f64 = 1e-12;

/// Result of one ray cast: free cells in view and the obstacle cells the
/// rays hit. Both are sorted in row-major order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Visibility {
    pub free: Vec<Cell>,
    pub obstacles: Vec<Cell>,
}

/// Ray parameter, as `num / den` with `den > 0`, at which the segment from
/// the center of `from` to the center of `to` first touches `cell`.
/// Assumes the segment touches it.
fn entry(from: Cell, to: Cell, cell: Cell) -> (i64, i64) {
    let axis = |a: i32, b: i32, lo: i32| -> Option<(i64, i64)> {
        let (a, d, lo) = (2 * a as i64 + 1, 2 * (b - a) as i64, 2 * lo as i64);
        match d.signum() {
            1 => Some((lo - a, d)),
            -1 => Some((a - lo - 2, -d)),
            _ => None,
        }
    };
    let mut best = (0, 1);
    for t in [axis(from.x, to.x, cell.x), axis(from.y, to.y, cell.y)]
        .into_iter()
        .flatten()
    {
        if t.0 * best.1 > best.0 * t.1 {
            best = t;
        }
    }
    best
}

/// Casts the sensor cone from `pose` over the ground-truth grid.
pub fn cast(truth: &OccupancyGrid, sensor: &SensorSpec, pose: &Pose) -> Visibility {
    let shape = truth.shape();
    let origin = pose.cell(shape);
    let reach = (sensor.view_range / shape.resolution).ceil() as i32 + 1;
    let half_fov = sensor.fov / 2.0;
    let mut vis = Visibility::default();
    let mut hits = std::collections::BTreeSet::new();
    let y0 = (origin.y - reach).max(0);
    let y1 = (origin.y + reach).min(shape.height as i32 - 1);
    let x0 = (origin.x - reach).max(0);
    let x1 = (origin.x + reach).min(shape.width as i32 - 1);
    for y in y0..=y1 {
        for x in x0..=x1 {
            let c = Cell::new(x, y);
            if shape.meters(origin, c) > sensor.view_range {
                continue;
            }
            if bearing_offset(shape, pose, c) > half_fov + ANGLE_EPS {
                continue;
            }
            let mut first: Vec<(Cell, (i64, i64))> = Vec::new();
            for o in supercover(origin, c) {
                if o == origin || !truth.is_obstacle(o) {
                    continue;
                }
                let t = entry(origin, c, o);
                match first.first() {
                    Some(&(_, b)) if t.0 * b.1 > b.0 * t.1 => {}
                    Some(&(_, b)) if t.0 * b.1 == b.0 * t.1 => first.push((o, t)),
                    _ => first = vec![(o, t)],
                }
            }
            if first.is_empty() {
                vis.free.push(c);
                continue;
            }
            hits.extend(
                first
                    .into_iter()
                    .map(|(o, _)| o)
                    .filter(|&o| shape.meters(origin, o) <= sensor.view_range),
            );
        }
    }
    vis.obstacles = hits.into_iter().collect();
    vis
}

/// Free cells inside the view cone with an unobstructed line of sight.
pub fn visible_cells(truth: &OccupancyGrid, sensor: &SensorSpec, pose: &Pose) -> Vec<Cell> {
    cast(truth, sensor, pose).free
}
