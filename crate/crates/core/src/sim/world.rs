//! World description and the JSON world-file format:
//!
//! ```json
//! {"walls": [[x1, y1, x2, y2]], "circles": [[cx, cy, r]],
//!  "lights": [[x, y, intensity]], "robot_start": [x, y, theta]}
//! ```
//!
//! Lengths are meters, angles radians. Every key is optional; the robot
//! starts at the origin facing +x by default.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geometry::{normalize_angle, Circle, Segment, Vec2};
use super::robot::Pose;

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("world file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("reading world file {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("world schema error at {location}: {message}")]
    Schema { location: String, message: String },
    #[error("robot start position is inside {obstacle}")]
    StartInsideObstacle { obstacle: String },
    #[error("unknown bundled world {0:?}")]
    UnknownBundled(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Light {
    pub position: Vec2,
    /// Raw sensor units times square meters.
    pub intensity: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WorldModel {
    pub walls: Vec<Segment>,
    pub circles: Vec<Circle>,
    pub lights: Vec<Light>,
    pub robot_start: Pose,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldFile {
    #[serde(default)]
    walls: Vec<[f64; 4]>,
    #[serde(default)]
    circles: Vec<[f64; 3]>,
    #[serde(default)]
    lights: Vec<[f64; 3]>,
    #[serde(default)]
    robot_start: [f64; 3],
}

const EMPTY_WORLD: &str = include_str!("../../worlds/empty.world.json");
const CORRIDOR_WORLD: &str = include_str!("../../worlds/corridor.world.json");
const LIGHTS_WORLD: &str = include_str!("../../worlds/lights.world.json");

/// Names accepted by [`WorldModel::bundled`].
pub const BUNDLED_WORLDS: [&str; 3] = ["empty", "corridor", "lights"];

fn schema(location: impl Into<String>, message: impl Into<String>) -> WorldError {
    WorldError::Schema {
        location: location.into(),
        message: message.into(),
    }
}

impl WorldModel {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_json(text: &str) -> Result<Self, WorldError> {
        let file: WorldFile = serde_json::from_str(text).map_err(|e| {
            schema(
                format!("line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        Self::from_file(file)
    }

    /// One of the fixtures shipped with the crate, by name (`empty`,
    /// `corridor`, `lights`).
    pub fn bundled(name: &str) -> Result<Self, WorldError> {
        let text = match name {
            "empty" => EMPTY_WORLD,
            "corridor" => CORRIDOR_WORLD,
            "lights" => LIGHTS_WORLD,
            other => return Err(WorldError::UnknownBundled(other.to_string())),
        };
        Self::from_json(text)
    }

    pub fn to_json(&self) -> String {
        let file = WorldFile {
            walls: self
                .walls
                .iter()
                .map(|w| [w.a.x, w.a.y, w.b.x, w.b.y])
                .collect(),
            circles: self
                .circles
                .iter()
                .map(|c| [c.center.x, c.center.y, c.radius])
                .collect(),
            lights: self
                .lights
                .iter()
                .map(|l| [l.position.x, l.position.y, l.intensity])
                .collect(),
            robot_start: [
                self.robot_start.x,
                self.robot_start.y,
                self.robot_start.theta,
            ],
        };
        serde_json::to_string(&file).expect("world serializes")
    }

    fn from_file(file: WorldFile) -> Result<Self, WorldError> {
        let finite = |field: String, values: &[f64]| {
            if values.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(schema(field, "values must be finite numbers"))
            }
        };

        let mut walls = Vec::with_capacity(file.walls.len());
        for (i, w) in file.walls.iter().enumerate() {
            finite(format!("walls[{i}]"), w)?;
            walls.push(Segment::new(Vec2::new(w[0], w[1]), Vec2::new(w[2], w[3])));
        }
        let mut circles = Vec::with_capacity(file.circles.len());
        for (i, c) in file.circles.iter().enumerate() {
            finite(format!("circles[{i}]"), c)?;
            if c[2] <= 0.0 {
                return Err(schema(format!("circles[{i}]"), "radius must be positive"));
            }
            circles.push(Circle {
                center: Vec2::new(c[0], c[1]),
                radius: c[2],
            });
        }
        let mut lights = Vec::with_capacity(file.lights.len());
        for (i, l) in file.lights.iter().enumerate() {
            finite(format!("lights[{i}]"), l)?;
            if l[2] < 0.0 {
                return Err(schema(
                    format!("lights[{i}]"),
                    "intensity must be non-negative",
                ));
            }
            lights.push(Light {
                position: Vec2::new(l[0], l[1]),
                intensity: l[2],
            });
        }
        let s = file.robot_start;
        finite("robot_start".into(), &s)?;
        let world = WorldModel {
            walls,
            circles,
            lights,
            robot_start: Pose::new(s[0], s[1], normalize_angle(s[2])),
        };
        world.check_start(0.0)?;
        Ok(world)
    }

    /// Fails if a disc of `radius` at the start position overlaps an
    /// obstacle. A zero radius checks the centre point only.
    pub fn check_start(&self, radius: f64) -> Result<(), WorldError> {
        let p = self.robot_start.position();
        for (i, c) in self.circles.iter().enumerate() {
            if c.signed_distance(p) < radius {
                return Err(WorldError::StartInsideObstacle {
                    obstacle: format!("circles[{i}]"),
                });
            }
        }
        for (i, w) in self.walls.iter().enumerate() {
            let d = w.distance_to(p);
            if d < radius || d == 0.0 {
                return Err(WorldError::StartInsideObstacle {
                    obstacle: format!("walls[{i}]"),
                });
            }
        }
        Ok(())
    }
}

/// Loads a world file from disk.
pub fn load_world(path: impl AsRef<Path>) -> Result<WorldModel, WorldError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| {
        if source.kind() == io::ErrorKind::NotFound {
            WorldError::FileNotFound(path.to_path_buf())
        } else {
            WorldError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    WorldModel::from_json(&text)
}

/// Resolves a `--world` argument: an existing file path, else a bundled
/// fixture name (with or without the `.world.json` suffix).
pub fn resolve_world(arg: &str) -> Result<WorldModel, WorldError> {
    let path = Path::new(arg);
    if path.exists() {
        return load_world(path);
    }
    let name = arg.trim_end_matches(".world.json");
    if BUNDLED_WORLDS.contains(&name) {
        return WorldModel::bundled(name);
    }
    Err(WorldError::FileNotFound(path.to_path_buf()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_corridor_has_two_walls_and_no_lights() {
        let w = WorldModel::bundled("corridor").unwrap();
        assert_eq!(w.walls.len(), 2);
        assert!(w.lights.is_empty());
    }

    #[test]
    fn empty_lists_are_an_open_world() {
        let w = WorldModel::from_json(
            r#"{"walls": [], "circles": [], "lights": [], "robot_start": [0, 0, 0]}"#,
        )
        .unwrap();
        assert_eq!(w, WorldModel::empty());
        assert_eq!(WorldModel::bundled("empty").unwrap(), WorldModel::empty());
    }

    #[test]
    fn start_inside_circle_is_rejected() {
        let err =
            WorldModel::from_json(r#"{"circles": [[0.1, 0, 0.5]], "robot_start": [0, 0, 0]}"#)
                .unwrap_err();
        assert!(
            matches!(err, WorldError::StartInsideObstacle { .. }),
            "{err}"
        );
    }

    #[test]
    fn schema_errors_carry_a_location() {
        let err = WorldModel::from_json("{\n  \"walls\": [[0, 1, 2]]\n}").unwrap_err();
        match err {
            WorldError::Schema { location, .. } => {
                assert!(location.starts_with("line 2"), "{location}")
            }
            other => panic!("unexpected {other}"),
        }
        let err = WorldModel::from_json(r#"{"circles": [[5, 5, -1]]}"#).unwrap_err();
        assert!(err.to_string().contains("circles[0]"));
        let err = WorldModel::from_json(r#"{"wals": []}"#).unwrap_err();
        assert!(matches!(err, WorldError::Schema { .. }));
    }

    #[test]
    fn missing_file() {
        let err = load_world("/definitely/not/here.world.json").unwrap_err();
        assert!(matches!(err, WorldError::FileNotFound(_)));
    }

    #[test]
    fn json_round_trips() {
        let w = WorldModel::bundled("lights").unwrap();
        assert_eq!(WorldModel::from_json(&w.to_json()).unwrap(), w);
    }

    #[test]
    fn resolve_by_name() {
        assert!(resolve_world("corridor").is_ok());
        assert!(resolve_world("corridor.world.json").is_ok());
        assert!(resolve_world("nowhere").is_err());
    }
}
