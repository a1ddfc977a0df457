//! Decayed values, high-value clusters, candidate points and the discrete
//! belief over them.

pub mod dbscan;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Cell, GridShape, OccupancyGrid};
use crate::mapping::{FrontierSet, SharedValueMap};

pub use dbscan::{dbscan, Clustering};

/// Sigmoid decay on update counts: half value at `tau` updates, softness
/// `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayParams {
    pub tau: f64,
    pub kappa: f64,
}

impl Default for DecayParams {
    fn default() -> Self {
        DecayParams { tau: 15.0, kappa: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterParams {
    /// Neighbourhood radius, in cells.
    pub eps: f64,
    pub min_pts: usize,
    /// Cells with decayed value at or above this are clustered.
    pub value_threshold: f64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            eps: 3.0,
            min_pts: 4,
            value_threshold: 0.5,
        }
    }
}

/// `1 / (1 + exp((u - tau) / kappa))`
pub fn decay_factor(updates: u32, params: &DecayParams) -> f64 {
    1.0 / (1.0 + ((updates as f64 - params.tau) / params.kappa).exp())
}

/// Shared values scaled by the decay of each cell's combined update count.
pub fn decayed_map(shared: &SharedValueMap, updates: &[u32], params: &DecayParams) -> Vec<f64> {
    assert_eq!(shared.v.len(), updates.len(), "map shapes differ");
    shared
        .v
        .iter()
        .zip(updates)
        .map(|(&v, &u)| v * decay_factor(u, params))
        .collect()
}

/// Free cell nearest to a metric point in cell units; ties go to the lowest
/// row-major cell.
fn nearest_free(grid: &OccupancyGrid, x: f64, y: f64) -> Option<Cell> {
    let mut best: Option<(f64, Cell)> = None;
    for c in grid.shape().cells() {
        if !grid.is_free(c) {
            continue;
        }
        let d = (c.x as f64 - x).powi(2) + (c.y as f64 - y).powi(2);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, c));
        }
    }
    best.map(|(_, c)| c)
}

/// Thresholds the decayed map, clusters the surviving cells, and returns each
/// cluster's value-weighted centroid snapped to the nearest known-free cell.
pub fn cluster(decayed: &[f64], params: &ClusterParams, grid: &OccupancyGrid) -> Vec<Cell> {
    let shape = grid.shape();
    let cells: Vec<Cell> = (0..decayed.len())
        .filter(|&i| decayed[i] >= params.value_threshold)
        .map(|i| shape.cell(i))
        .collect();
    let points: Vec<[f64; 2]> = cells.iter().map(|c| [c.x as f64, c.y as f64]).collect();
    let clustering = dbscan(&points, params.eps, params.min_pts);
    let mut out = Vec::new();
    for members in clustering.clusters() {
        let (mut wx, mut wy, mut w) = (0.0, 0.0, 0.0);
        for &m in &members {
            let v = decayed[shape.index(cells[m])];
            wx += v * cells[m].x as f64;
            wy += v * cells[m].y as f64;
            w += v;
        }
        if w <= 0.0 {
            continue;
        }
        if let Some(c) = nearest_free(grid, wx / w, wy / w) {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

/// Candidate points with their probabilities, plus the selected frontier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSet {
    pub points: Vec<Cell>,
    pub probs: Vec<f64>,
    pub frontier: Option<Cell>,
}

impl CandidateSet {
    pub fn has_belief(&self) -> bool {
        !self.points.is_empty()
    }
}

/// Normalizes decayed values at the candidate points into a distribution and
/// picks the best frontier. Candidates with zero decayed value are dropped.
pub fn build_candidates(
    decayed: &[f64],
    shape: GridShape,
    clusters: &[Cell],
    frontiers: &FrontierSet,
) -> Result<CandidateSet> {
    let weighted: Vec<(Cell, f64)> = clusters
        .iter()
        .map(|&c| (c, decayed[shape.index(c)]))
        .filter(|&(_, v)| v > 0.0)
        .collect();
    let frontier = frontiers.best(shape.width).map(|f| f.cell);
    if weighted.is_empty() && frontier.is_none() {
        return Err(Error::ExplorationExhausted);
    }
    let total: f64 = weighted.iter().map(|(_, v)| v).sum();
    Ok(CandidateSet {
        points: weighted.iter().map(|(c, _)| *c).collect(),
        probs: weighted.iter().map(|(_, v)| v / total).collect(),
        frontier,
    })
}
