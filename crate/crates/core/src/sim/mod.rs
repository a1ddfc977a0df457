//! Deterministic grid-world simulator: scenarios, ray-cast sensing, a noisy
//! detector, a semantic scorer, and waypoint motion.

pub mod motion;
pub mod raycast;
pub mod scenario;
pub mod sensor;

pub use motion::{advance, Advance};
pub use raycast::{bearing_offset, cast, line_of_sight, supercover, visible_cells, Visibility};
pub use scenario::{wrap_angle, NoiseSpec, ObjectInstance, Pose, Scenario, SensorSpec};
pub use sensor::{base_score, sense, Detection, SensorFrame};
