//! Success rate and multi-object success weighted by path length.

use crate::error::{Error, Result};

/// The three quantities MSPL needs from one episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRow {
    pub success: bool,
    /// Path actually travelled, meters.
    pub path_length: f64,
    /// Optimal tour length; may be missing for failed episodes.
    pub optimal_length: Option<f64>,
}

/// Fraction of episodes in which every target was found. Empty input gives 0.
pub fn success_rate(rows: &[MetricRow]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    rows.iter().filter(|r| r.success).count() as f64 / rows.len() as f64
}

/// Mean over episodes of `S · l / max(p, l)`. Empty input gives 0.
pub fn mspl(rows: &[MetricRow]) -> Result<f64> {
    let mut total = 0.0;
    for (i, r) in rows.iter().enumerate() {
        if !(r.path_length >= 0.0) {
            return Err(Error::InvalidRow {
                row: i,
                reason: format!("path length {} is negative", r.path_length),
            });
        }
        let l = match r.optimal_length {
            Some(l) if l > 0.0 => l,
            Some(l) => {
                return Err(Error::InvalidRow {
                    row: i,
                    reason: format!("optimal length {l} is not positive"),
                })
            }
            None if r.success => {
                return Err(Error::InvalidRow {
                    row: i,
                    reason: "successful episode without an optimal length".into(),
                })
            }
            None => continue,
        };
        if r.success {
            total += l / r.path_length.max(l);
        }
    }
    Ok(if rows.is_empty() {
        0.0
    } else {
        total / rows.len() as f64
    })
}
