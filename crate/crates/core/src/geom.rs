//! Shared geometric types and frame conventions.
//!
//! All coordinates live in the ego frame: x forward, y left, z up, with the
//! origin on the ground directly below the sensor. Yaw is measured about +z
//! from the +x axis. Bounding boxes rotate only about the ground normal, so a
//! single yaw angle is enough; there is no general 3D rotation here.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

/// 2D vector in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z component of the 2D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 1e-12).then(|| self * (1.0 / n))
    }

    /// Counter-clockwise perpendicular (rotation by +90 degrees).
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

impl Add for Vec2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// 3D vector in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 1e-12).then(|| self * (1.0 / n))
    }

    pub fn xy(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

impl Add for Vec3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Neg for Vec3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Wrap an angle to [-pi, pi).
///
/// Panics on non-finite input; every angle in this crate is produced by
/// `atan2` or bounded arithmetic, so a NaN here is always a caller bug.
pub fn wrap_angle(theta: f64) -> f64 {
    assert!(theta.is_finite(), "wrap_angle: non-finite angle {theta}");
    let mut r = (theta + PI).rem_euclid(TAU) - PI;
    if r >= PI {
        r -= TAU;
    }
    r
}

/// Wrap an angle to [-pi/2, pi/2), identifying directions that differ by pi.
pub fn wrap_half_angle(theta: f64) -> f64 {
    assert!(theta.is_finite(), "wrap_half_angle: non-finite angle {theta}");
    let mut r = (theta + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
    if r >= FRAC_PI_2 {
        r -= PI;
    }
    r
}

/// Smallest rotation magnitude mapping heading `a` onto heading `b`, modulo
/// pi. Bounding boxes have no front/back distinction, so headings that differ
/// by pi compare equal. Result in [0, pi/2].
pub fn heading_difference(a: f64, b: f64) -> f64 {
    assert!(a.is_finite() && b.is_finite(), "heading_difference: non-finite input");
    let m = (a - b).rem_euclid(PI);
    let folded = if m > FRAC_PI_2 { PI - m } else { m };
    folded.abs() // strips a possible negative zero
}

/// One lidar return. `ring` is the emitting laser index when known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub ring: Option<u32>,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z, ring: None }
    }

    pub const fn with_ring(x: f64, y: f64, z: f64, ring: u32) -> Self {
        Self { x, y, z, ring: Some(ring) }
    }

    pub fn pos(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }
}

/// One sensor frame. May be empty; all points share the same frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<Point3>,
    pub frame_id: String,
    pub timestamp: f64,
}

impl PointCloud {
    pub fn new(frame_id: impl Into<String>, timestamp: f64) -> Self {
        Self { points: Vec::new(), frame_id: frame_id.into(), timestamp }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Plane {p : normal . p + offset = 0} with unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane3 {
    pub normal: Vec3,
    pub offset: f64,
}

impl Plane3 {
    /// Builds a plane, renormalizing `normal`. Panics on a near-zero normal.
    pub fn new(normal: Vec3, offset: f64) -> Self {
        let n = normal.norm();
        assert!(n > 1e-12, "Plane3: degenerate normal");
        Self { normal: normal * (1.0 / n), offset: offset / n }
    }

    pub fn from_point_normal(point: Vec3, normal: Vec3) -> Self {
        let n = normal.normalized().expect("Plane3: degenerate normal");
        Self { normal: n, offset: -n.dot(point) }
    }

    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p) + self.offset
    }

    /// Orthogonal projection of `p` onto the plane.
    pub fn project(&self, p: Vec3) -> Vec3 {
        p - self.normal * self.signed_distance(p)
    }

    /// Flips orientation if needed so that normal.z >= 0 (ground convention).
    pub fn canonical_ground(self) -> Self {
        if self.normal.z < 0.0 {
            Self { normal: -self.normal, offset: -self.offset }
        } else {
            self
        }
    }
}

/// 2D line through `point` along unit `direction`.
///
/// The direction is canonicalized to the right half-turn (x > 0, or x == 0
/// with y > 0) so that a vertical line always reports direction (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line2 {
    pub point: Vec2,
    pub direction: Vec2,
}

impl Line2 {
    pub fn new(point: Vec2, direction: Vec2) -> Self {
        let d = direction.normalized().expect("Line2: degenerate direction");
        let d = if d.x < 0.0 || (d.x == 0.0 && d.y < 0.0) { -d } else { d };
        Self { point, direction: d }
    }

    /// Line through two distinct points.
    pub fn through(a: Vec2, b: Vec2) -> Self {
        Self::new(a, b - a)
    }

    /// Direction angle; in (-pi/2, pi/2] by canonicalization.
    pub fn angle(&self) -> f64 {
        self.direction.angle()
    }

    pub fn distance(&self, p: Vec2) -> f64 {
        (p - self.point).cross(self.direction).abs()
    }
}

/// Oriented 3D bounding box: the pipeline output consumed by planning.
///
/// `yaw` is the estimated obstacle heading (modulo pi; boxes have no
/// front/back distinction) and `length` is the extent along it, `width`
/// across. A partially observed obstacle can legitimately be wider than it
/// is long: a vehicle seen back-on shows its full width but almost no
/// depth, while its heading points into the unobserved axis. When no
/// heading is available the box is axis-aligned with yaw fixed at 0.
///
/// `height_is_lower_bound` marks boxes whose top came from the highest lidar
/// return rather than the true obstacle height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox3 {
    pub center: Vec3,
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub yaw: f64,
    pub heading_valid: bool,
    pub height_is_lower_bound: bool,
}

impl OrientedBox3 {
    pub fn new(
        center: Vec3,
        length: f64,
        width: f64,
        height: f64,
        yaw: f64,
        heading_valid: bool,
        height_is_lower_bound: bool,
    ) -> Self {
        assert!(length > 0.0 && width > 0.0 && height > 0.0, "OrientedBox3: non-positive extent");
        let yaw = if heading_valid { wrap_angle(yaw) } else { 0.0 };
        Self { center, length, width, height, yaw, heading_valid, height_is_lower_bound }
    }

    /// Footprint corners on the ground plane, counter-clockwise.
    pub fn footprint(&self) -> [Vec2; 4] {
        let c = self.center.xy();
        let hl = self.length * 0.5;
        let hw = self.width * 0.5;
        [
            c + Vec2::new(hl, hw).rotated(self.yaw),
            c + Vec2::new(-hl, hw).rotated(self.yaw),
            c + Vec2::new(-hl, -hw).rotated(self.yaw),
            c + Vec2::new(hl, -hw).rotated(self.yaw),
        ]
    }

    /// All eight corners, bottom face first.
    pub fn corners(&self) -> [Vec3; 8] {
        let fp = self.footprint();
        let zb = self.center.z - self.height * 0.5;
        let zt = self.center.z + self.height * 0.5;
        [
            Vec3::new(fp[0].x, fp[0].y, zb),
            Vec3::new(fp[1].x, fp[1].y, zb),
            Vec3::new(fp[2].x, fp[2].y, zb),
            Vec3::new(fp[3].x, fp[3].y, zb),
            Vec3::new(fp[0].x, fp[0].y, zt),
            Vec3::new(fp[1].x, fp[1].y, zt),
            Vec3::new(fp[2].x, fp[2].y, zt),
            Vec3::new(fp[3].x, fp[3].y, zt),
        ]
    }

    /// Ground-plane distance from `p` to the footprint rectangle (0 inside).
    pub fn footprint_distance(&self, p: Vec2) -> f64 {
        let local = (p - self.center.xy()).rotated(-self.yaw);
        let dx = (local.x.abs() - self.length * 0.5).max(0.0);
        let dy = (local.y.abs() - self.width * 0.5).max(0.0);
        dx.hypot(dy)
    }

    /// Nearest-face distance from the ego origin; the evaluation metric.
    pub fn nearest_face_distance(&self) -> f64 {
        self.footprint_distance(Vec2::new(0.0, 0.0))
    }
}

/// 2D pose: position plus heading, yaw wrapped to [-pi, pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, yaw: f64) -> Self {
        assert!(x.is_finite() && y.is_finite(), "Pose2: non-finite position");
        Self { x, y, yaw: wrap_angle(yaw) }
    }

    pub fn xy(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// Orthonormal frame attached to a ground plane: `ez` is the plane normal,
/// `ex` the projection of ego-forward onto the plane, `origin` the projection
/// of the ego origin. Grid projection, plane fitting and box construction all
/// share this frame so their 2D coordinates agree.
#[derive(Debug, Clone, Copy)]
pub struct GroundFrame {
    pub origin: Vec3,
    pub ex: Vec3,
    pub ey: Vec3,
    pub ez: Vec3,
}

impl GroundFrame {
    pub fn from_plane(plane: &Plane3) -> Self {
        let ez = plane.normal;
        assert!(ez.z > 0.0, "GroundFrame: plane must be ground-canonical (normal.z > 0)");
        let fwd = Vec3::new(1.0, 0.0, 0.0);
        let ex = (fwd - ez * fwd.dot(ez))
            .normalized()
            .expect("GroundFrame: ground normal parallel to forward axis");
        let ey = ez.cross(ex);
        Self { origin: -ez * plane.offset, ex, ey, ez }
    }

    /// In-plane 2D coordinates of the orthogonal projection of `p`.
    pub fn project(&self, p: Vec3) -> Vec2 {
        let q = p - self.origin;
        Vec2::new(q.dot(self.ex), q.dot(self.ey))
    }

    /// Inverse of `project` at a given height above the plane.
    pub fn lift(&self, q: Vec2, height: f64) -> Vec3 {
        self.origin + self.ex * q.x + self.ey * q.y + self.ez * height
    }

    /// Signed height of `p` above the plane.
    pub fn height(&self, p: Vec3) -> f64 {
        (p - self.origin).dot(self.ez)
    }
}
