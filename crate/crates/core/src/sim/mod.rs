//! 2D simulation of a differential-drive robot with a forward distance
//! sensor and two light sensors.

pub mod geometry;
pub mod robot;
pub mod world;

pub use geometry::{normalize_angle, Circle, Segment, Vec2};
pub use robot::{LightSide, Pose, RobotParams, SimState, Simulator, MAX_TICK};
pub use world::{load_world, resolve_world, Light, WorldError, WorldModel, BUNDLED_WORLDS};
