//! Small 2D vector/point type and polygon helpers shared by the mesh and
//! element modules.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// A point or displacement in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product `self x other`.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalize(self) -> Vec2 {
        self / self.norm()
    }

    /// Rotation by -90 degrees: the global edge normal for tangent `self`.
    pub fn rot_minus_90(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
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
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

/// Signed area of a polygon given by its vertex loop (positive when
/// counterclockwise), via the shoelace formula.
pub fn signed_area(loop_pts: &[Vec2]) -> f64 {
    let n = loop_pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = loop_pts[i];
        let b = loop_pts[(i + 1) % n];
        acc += a.cross(b);
    }
    0.5 * acc
}

/// Area-weighted centroid of a simple polygon (triangle-fan formula from the
/// origin; exact for any simple polygon regardless of convexity).
pub fn centroid(loop_pts: &[Vec2]) -> Vec2 {
    let n = loop_pts.len();
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let a = loop_pts[i];
        let b = loop_pts[(i + 1) % n];
        let w = a.cross(b);
        area2 += w;
        cx += (a.x + b.x) * w;
        cy += (a.y + b.y) * w;
    }
    Vec2::new(cx / (3.0 * area2), cy / (3.0 * area2))
}

/// Maximum pairwise vertex distance.
pub fn diameter(loop_pts: &[Vec2]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..loop_pts.len() {
        for j in i + 1..loop_pts.len() {
            d = d.max(loop_pts[i].dist(loop_pts[j]));
        }
    }
    d
}

/// Proper segment intersection test (shared endpoints do not count).
fn segments_cross(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = (p2 - p1).cross(q1 - p1);
    let d2 = (p2 - p1).cross(q2 - p1);
    let d3 = (q2 - q1).cross(p1 - q1);
    let d4 = (q2 - q1).cross(p2 - q1);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Whether a closed vertex loop bounds a simple polygon. Repeated vertices
/// and crossings between non-adjacent sides both fail; collinear (flat)
/// vertices are allowed.
pub fn is_simple_polygon(loop_pts: &[Vec2]) -> bool {
    let n = loop_pts.len();
    for i in 0..n {
        for j in i + 1..n {
            if loop_pts[i] == loop_pts[j] {
                return false;
            }
        }
    }
    for i in 0..n {
        let (a1, a2) = (loop_pts[i], loop_pts[(i + 1) % n]);
        for j in i + 1..n {
            // Skip adjacent sides (they share an endpoint).
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (b1, b2) = (loop_pts[j], loop_pts[(j + 1) % n]);
            if segments_cross(a1, a2, b1, b2) {
                return false;
            }
        }
    }
    true
}
