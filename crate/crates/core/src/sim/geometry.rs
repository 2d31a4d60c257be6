//! Small 2D vector toolkit: distances and ray casts against segments and
//! circles.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).length()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2) -> Self {
        Self { a, b }
    }

    pub fn distance_to(&self, p: Vec2) -> f64 {
        let ab = self.b - self.a;
        let len2 = ab.dot(ab);
        if len2 == 0.0 {
            return p.distance(self.a);
        }
        let u = ((p - self.a).dot(ab) / len2).clamp(0.0, 1.0);
        p.distance(self.a + ab * u)
    }

    /// Distance along the ray `origin + t * dir` (unit `dir`) to the first
    /// point of the segment, if any.
    pub fn ray_hit(&self, origin: Vec2, dir: Vec2) -> Option<f64> {
        let ab = self.b - self.a;
        let ao = self.a - origin;
        let denom = dir.cross(ab);
        if denom.abs() < 1e-15 {
            // Parallel. Only a collinear segment can be hit.
            if ao.cross(dir).abs() > 1e-12 {
                return None;
            }
            let ta = ao.dot(dir);
            let tb = (self.b - origin).dot(dir);
            let (near, far) = if ta <= tb { (ta, tb) } else { (tb, ta) };
            return if far < 0.0 { None } else { Some(near.max(0.0)) };
        }
        let t = ao.cross(ab) / denom;
        let u = ao.cross(dir) / denom;
        (t >= 0.0 && (0.0..=1.0).contains(&u)).then_some(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
}

impl Circle {
    /// Distance from `p` to the circle's boundary, negative inside.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        p.distance(self.center) - self.radius
    }

    pub fn ray_hit(&self, origin: Vec2, dir: Vec2) -> Option<f64> {
        let oc = origin - self.center;
        let c = oc.dot(oc) - self.radius * self.radius;
        if c <= 0.0 {
            return Some(0.0);
        }
        let b = oc.dot(dir);
        let disc = b * b - c;
        if disc < 0.0 {
            return None;
        }
        let t = -b - disc.sqrt();
        (t >= 0.0).then_some(t)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let a = theta.rem_euclid(TAU);
    if a > PI {
        a - TAU
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ray_against_perpendicular_segment() {
        let wall = Segment::new(Vec2::new(1.0, -1.0), Vec2::new(1.0, 1.0));
        assert_eq!(
            wall.ray_hit(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)),
            Some(1.0)
        );
        assert_eq!(
            wall.ray_hit(Vec2::new(0.0, 0.0), Vec2::new(-1.0, 0.0)),
            None
        );
        assert_eq!(wall.ray_hit(Vec2::new(0.0, 2.0), Vec2::new(1.0, 0.0)), None);
    }

    #[test]
    fn ray_against_collinear_segment() {
        let wall = Segment::new(Vec2::new(2.0, 0.0), Vec2::new(3.0, 0.0));
        assert_eq!(
            wall.ray_hit(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)),
            Some(2.0)
        );
        assert_eq!(
            wall.ray_hit(Vec2::new(2.5, 0.0), Vec2::new(1.0, 0.0)),
            Some(0.0)
        );
        assert_eq!(wall.ray_hit(Vec2::new(4.0, 0.0), Vec2::new(1.0, 0.0)), None);
    }

    #[test]
    fn ray_against_circle() {
        let c = Circle {
            center: Vec2::new(3.0, 0.0),
            radius: 1.0,
        };
        let hit = c.ray_hit(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)).unwrap();
        assert!((hit - 2.0).abs() < 1e-12);
        assert_eq!(
            c.ray_hit(Vec2::new(3.0, 0.5), Vec2::new(1.0, 0.0)),
            Some(0.0)
        );
        assert_eq!(c.ray_hit(Vec2::new(0.0, 2.0), Vec2::new(1.0, 0.0)), None);
    }

    #[test]
    fn segment_distance() {
        let s = Segment::new(Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0));
        assert_eq!(s.distance_to(Vec2::new(1.0, 3.0)), 3.0);
        assert_eq!(s.distance_to(Vec2::new(5.0, 4.0)), 5.0);
    }

    #[test]
    fn angles_wrap_into_half_open_range() {
        assert_eq!(normalize_angle(PI), PI);
        assert!((normalize_angle(-PI) - PI).abs() < 1e-15);
        assert!((normalize_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(normalize_angle(0.25), 0.25);
    }
}
