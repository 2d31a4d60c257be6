//! Kinematic differential-drive robot.

use serde::Serialize;

use super::geometry::{normalize_angle, Vec2};
use super::world::{WorldError, WorldModel};
use crate::interp::RobotInterface;
use crate::lang::SensorName;

/// Longest interval integrated in one piece; longer ticks are split.
pub const MAX_TICK: f64 = 0.1;
/// Overlap tolerance for the collision test, in meters.
const CONTACT_EPS: f64 = 1e-12;
const TURN_EPS: f64 = 1e-9;
const LIGHT_MAX: f64 = 1023.0;
const LIGHT_MIN_DISTANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotParams {
    /// Wheel speed at 100% power, m/s.
    pub v_max: f64,
    /// Distance between the wheels, m.
    pub wheelbase: f64,
    pub body_radius: f64,
    /// Distance sensor range, cm.
    pub distance_max: f64,
    /// Light sensor gain reference: readings scale by
    /// `light_scale / DEFAULT_LIGHT_SCALE`, so the default is unity gain.
    pub light_scale: f64,
}

pub const DEFAULT_LIGHT_SCALE: f64 = 100.0;

impl Default for RobotParams {
    fn default() -> Self {
        Self {
            v_max: 0.5,
            wheelbase: 0.12,
            body_radius: 0.08,
            distance_max: 400.0,
            light_scale: DEFAULT_LIGHT_SCALE,
        }
    }
}

impl RobotParams {
    pub fn validate(&self) -> Result<(), String> {
        let fields = [
            ("v_max", self.v_max),
            ("wheelbase", self.wheelbase),
            ("body_radius", self.body_radius),
            ("distance_max", self.distance_max),
            ("light_scale", self.light_scale),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

/// Position in meters and heading in radians, counterclockwise from +x.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn heading(&self) -> Vec2 {
        Vec2::from_angle(self.theta)
    }

    /// Pose after moving for `t` seconds at linear speed `v` and angular
    /// speed `omega`, integrated exactly along the arc.
    pub fn advance(&self, v: f64, omega: f64, t: f64) -> Pose {
        if omega.abs() > TURN_EPS {
            let theta1 = self.theta + omega * t;
            let r = v / omega;
            Pose {
                x: self.x + r * (theta1.sin() - self.theta.sin()),
                y: self.y - r * (theta1.cos() - self.theta.cos()),
                theta: normalize_angle(theta1),
            }
        } else {
            let (s, c) = self.theta.sin_cos();
            Pose {
                x: self.x + v * t * c,
                y: self.y + v * t * s,
                theta: self.theta,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LightSide {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimState {
    pub pose: Pose,
    pub motor_left: f64,
    pub motor_right: f64,
    pub collided: bool,
    pub beeps: u32,
}

#[derive(Debug, Clone)]
pub struct Simulator {
    params: RobotParams,
    world: WorldModel,
    state: SimState,
}

impl Simulator {
    pub fn new(world: WorldModel, params: RobotParams) -> Result<Self, WorldError> {
        params.validate().map_err(|message| WorldError::Schema {
            location: "robot params".into(),
            message,
        })?;
        world.check_start(params.body_radius)?;
        let state = SimState {
            pose: world.robot_start,
            motor_left: 0.0,
            motor_right: 0.0,
            collided: false,
            beeps: 0,
        };
        Ok(Self {
            params,
            world,
            state,
        })
    }

    pub fn with_defaults(world: WorldModel) -> Result<Self, WorldError> {
        Self::new(world, RobotParams::default())
    }

    pub fn params(&self) -> &RobotParams {
        &self.params
    }

    pub fn world(&self) -> &WorldModel {
        &self.world
    }

    pub fn state(&self) -> SimState {
        self.state
    }

    pub fn pose(&self) -> Pose {
        self.state.pose
    }

    pub fn set_pose(&mut self, pose: Pose) {
        self.state.pose = Pose {
            theta: normalize_angle(pose.theta),
            ..pose
        };
    }

    /// Stores wheel setpoints in percent, clamped to `[-100, 100]`.
    pub fn set_motors(&mut self, left: f64, right: f64) {
        self.state.motor_left = left.clamp(-100.0, 100.0);
        self.state.motor_right = right.clamp(-100.0, 100.0);
    }

    /// Signed wheel speeds `(left, right)` in m/s.
    pub fn wheel_speeds(&self) -> (f64, f64) {
        let k = self.params.v_max / 100.0;
        (self.state.motor_left * k, self.state.motor_right * k)
    }

    /// Linear and angular body velocity.
    pub fn body_velocity(&self) -> (f64, f64) {
        let (vl, vr) = self.wheel_speeds();
        ((vl + vr) / 2.0, (vr - vl) / self.params.wheelbase)
    }

    pub fn beep(&mut self) {
        self.state.beeps += 1;
    }

    /// Smallest gap between the body disc centred at `p` and any obstacle;
    /// negative when they overlap.
    pub fn clearance_at(&self, p: Vec2) -> f64 {
        let r = self.params.body_radius;
        let walls = self.world.walls.iter().map(|w| w.distance_to(p) - r);
        let circles = self.world.circles.iter().map(|c| c.signed_distance(p) - r);
        walls.chain(circles).fold(f64::INFINITY, f64::min)
    }

    pub fn clearance(&self) -> f64 {
        self.clearance_at(self.state.pose.position())
    }

    /// Advances the simulation by `dt` seconds. Motion that would push the
    /// body into an obstacle stops at the point of contact.
    pub fn tick(&mut self, dt: f64) -> SimState {
        if dt.is_nan() || dt <= 0.0 || !dt.is_finite() {
            return self.state;
        }
        let pieces = (dt / MAX_TICK).ceil().max(1.0) as usize;
        let piece = dt / pieces as f64;
        for _ in 0..pieces {
            self.tick_piece(piece);
        }
        self.state
    }

    fn tick_piece(&mut self, dt: f64) {
        let (v, omega) = self.body_velocity();
        let start = self.state.pose;
        if v == 0.0 {
            // Spinning in place never changes the footprint.
            if omega != 0.0 {
                self.state.pose = start.advance(0.0, omega, dt);
            }
            return;
        }

        let blocked = |pose: &Pose| self.clearance_at(pose.position()) < -CONTACT_EPS;
        let step_len = self.params.body_radius / 4.0;
        let samples = ((v.abs() * dt) / step_len).ceil().max(1.0) as usize;
        let mut safe = 0.0;
        for k in 1..=samples {
            let s = dt * k as f64 / samples as f64;
            if blocked(&start.advance(v, omega, s)) {
                let (mut lo, mut hi) = (safe, s);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if blocked(&start.advance(v, omega, mid)) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                self.state.pose = start.advance(v, omega, lo);
                self.state.collided = true;
                return;
            }
            safe = s;
        }
        self.state.pose = start.advance(v, omega, dt);
        self.state.collided = false;
    }

    fn sensor_origin(&self, angle_offset: f64) -> Vec2 {
        let pose = self.state.pose;
        pose.position() + Vec2::from_angle(pose.theta + angle_offset) * self.params.body_radius
    }

    /// Distance in cm from the front of the body to the nearest obstacle
    /// straight ahead, capped at the sensor range.
    pub fn read_distance(&self) -> f64 {
        let origin = self.sensor_origin(0.0);
        let dir = self.state.pose.heading();
        let walls = self
            .world
            .walls
            .iter()
            .filter_map(|w| w.ray_hit(origin, dir));
        let circles = self
            .world
            .circles
            .iter()
            .filter_map(|c| c.ray_hit(origin, dir));
        let nearest = walls.chain(circles).fold(f64::INFINITY, f64::min);
        (nearest * 100.0).min(self.params.distance_max)
    }

    /// Summed inverse-square light at the sensor mounted 45 degrees to the
    /// given side, clamped to `0..=1023`.
    pub fn read_light(&self, side: LightSide) -> f64 {
        let offset = match side {
            LightSide::Left => std::f64::consts::FRAC_PI_4,
            LightSide::Right => -std::f64::consts::FRAC_PI_4,
        };
        let at = self.sensor_origin(offset);
        let gain = self.params.light_scale / DEFAULT_LIGHT_SCALE;
        let total = gain
            * self
                .world
                .lights
                .iter()
                .map(|l| {
                    let d = at.distance(l.position).max(LIGHT_MIN_DISTANCE);
                    l.intensity / (d * d)
                })
                .fold(0.0, |acc, v| acc + v);
        total.clamp(0.0, LIGHT_MAX)
    }
}

impl RobotInterface for Simulator {
    fn set_motors(&mut self, left: f64, right: f64) {
        Simulator::set_motors(self, left, right);
    }

    fn read_sensor(&self, sensor: SensorName) -> f64 {
        match sensor {
            SensorName::Distance => self.read_distance(),
            SensorName::LightL => self.read_light(LightSide::Left),
            SensorName::LightR => self.read_light(LightSide::Right),
        }
    }

    fn beep(&mut self) {
        Simulator::beep(self);
    }
}
