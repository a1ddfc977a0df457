//! Obstacle, frontier, object and per-target value maps.

pub mod dump;
pub mod frontier;
pub mod objects;
pub mod obstacle;
pub mod value;

pub use frontier::{extract_frontiers, is_frontier_cell, Frontier, FrontierSet};
pub use objects::ObjectMap;
pub use obstacle::update_obstacles;
pub use value::{aggregate, combined_updates, cone_confidence, fuse_cell, update_layers, SharedValueMap, ValueLayer};
