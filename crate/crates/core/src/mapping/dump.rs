//! Line-delimited JSON dumps of map state for golden-file tests and replay.
//!
//! Each line is one record with a header (`step`, `kind`, `class`, `width`,
//! `height`, `resolution`) followed by flat row-major arrays.

use std::io::Write;

use serde::Serialize;

use crate::grid::{CellState, OccupancyGrid};
use crate::mapping::value::{SharedValueMap, ValueLayer};

#[derive(Debug, Serialize)]
pub struct MapRecord<'a> {
    pub step: u64,
    pub kind: &'static str,
    pub class: Option<&'a str>,
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<&'a [u32]>,
    /// Occupancy codes: 0 unknown, 1 free, 2 obstacle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<u8>>,
}

pub fn occupancy_code(s: CellState) -> u8 {
    match s {
        CellState::Unknown => 0,
        CellState::Free => 1,
        CellState::Obstacle => 2,
    }
}

/// Writes the obstacle grid, every value layer, the shared map and the
/// decayed map for one step.
pub fn write_step<W: Write>(
    out: &mut W,
    step: u64,
    grid: &OccupancyGrid,
    layers: &[ValueLayer],
    shared: Option<&SharedValueMap>,
    decayed: Option<&[f64]>,
) -> std::io::Result<()> {
    let shape = grid.shape();
    let header = |kind, class| MapRecord {
        step,
        kind,
        class,
        width: shape.width,
        height: shape.height,
        resolution: shape.resolution,
        v: None,
        c: None,
        u: None,
        cells: None,
    };
    let mut emit = |rec: MapRecord| -> std::io::Result<()> {
        serde_json::to_writer(&mut *out, &rec)?;
        out.write_all(b"\n")
    };
    emit(MapRecord {
        cells: Some(grid.states().iter().map(|&s| occupancy_code(s)).collect()),
        ..header("obstacle", None)
    })?;
    for layer in layers {
        emit(MapRecord {
            v: Some(&layer.v),
            c: Some(&layer.c),
            u: Some(&layer.u),
            ..header("value", Some(&layer.target_class))
        })?;
    }
    if let Some(shared) = shared {
        emit(MapRecord {
            v: Some(&shared.v),
            ..header("shared", None)
        })?;
    }
    if let Some(decayed) = decayed {
        emit(MapRecord {
            v: Some(decayed),
            ..header("decayed", None)
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridShape;

    #[test]
    fn records_carry_headers_and_flat_arrays() {
        let shape = GridShape::new(3, 2, 0.25);
        let grid = OccupancyGrid::unknown(shape);
        let layer = ValueLayer::new("mug", shape);
        let mut buf = Vec::new();
        write_step(&mut buf, 4, &grid, &[layer], None, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0]["kind"], "obstacle");
        assert_eq!(lines[0]["cells"].as_array().unwrap().len(), 6);
        assert_eq!(lines[1]["class"], "mug");
        assert_eq!(lines[1]["width"], 3);
        assert_eq!(lines[1]["resolution"], 0.25);
        assert_eq!(lines[1]["u"].as_array().unwrap().len(), 6);
    }
}
