//! Planar points, rectangles and convex-polygon helpers.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Rotates by -90 degrees; for a counter-clockwise edge this is the outward normal direction.
    pub fn perp_cw(self) -> Self {
        Self::new(self.y, -self.x)
    }
}

impl Add for Point2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Axis-aligned rectangle given by its lower-left and upper-right corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn new(min: Point2, max: Point2) -> Result<Self> {
        let finite = [min.x, min.y, max.x, max.y].iter().all(|v| v.is_finite());
        if !finite || max.x <= min.x || max.y <= min.y {
            return invalid(format!(
                "degenerate domain ({}, {}) - ({}, {})",
                min.x, min.y, max.x, max.y
            ));
        }
        Ok(Self { min, max })
    }

    pub fn square(side: f64) -> Result<Self> {
        Self::new(Point2::new(0.0, 0.0), Point2::new(side, side))
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Corners in counter-clockwise order starting at the lower-left.
    pub fn corners(&self) -> [Point2; 4] {
        [
            self.min,
            Point2::new(self.max.x, self.min.y),
            self.max,
            Point2::new(self.min.x, self.max.y),
        ]
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
    }

    /// Index of the side (0 bottom, 1 right, 2 top, 3 left) that contains both points, if any.
    pub fn common_side(&self, a: Point2, b: Point2, tol: f64) -> Option<usize> {
        let on = |p: Point2, side: usize| match side {
            0 => (p.y - self.min.y).abs() <= tol,
            1 => (p.x - self.max.x).abs() <= tol,
            2 => (p.y - self.max.y).abs() <= tol,
            _ => (p.x - self.min.x).abs() <= tol,
        };
        (0..4).find(|&s| on(a, s) && on(b, s))
    }
}

/// Signed area of a closed polygon (positive when counter-clockwise).
pub fn signed_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i].cross(poly[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

/// Area centroid of a simple polygon with non-zero area.
pub fn centroid(poly: &[Point2]) -> Point2 {
    let n = poly.len();
    // shift to the first vertex to limit cancellation
    let o = poly[0];
    let mut a = 0.0;
    let mut c = Point2::default();
    for i in 0..n {
        let p = poly[i] - o;
        let q = poly[(i + 1) % n] - o;
        let w = p.cross(q);
        a += w;
        c = c + (p + q) * w;
    }
    o + c * (1.0 / (3.0 * a))
}

pub fn perimeter(poly: &[Point2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].distance(poly[(i + 1) % n])).sum()
}

/// Largest vertex-to-vertex distance.
pub fn diameter(poly: &[Point2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in poly.iter().enumerate() {
        for b in &poly[i + 1..] {
            d = d.max(a.distance(*b));
        }
    }
    d
}

/// True when every turn is a left turn (within `tol` relative to the edge lengths).
pub fn is_convex_ccw(poly: &[Point2], tol: f64) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        let e1 = b - a;
        let e2 = c - b;
        e1.cross(e2) >= -tol * e1.norm() * e2.norm()
    })
}

/// Extents `(long, short)` of the minimum-width bounding box of a convex polygon.
///
/// Rotating calipers: the minimum-width box of a convex polygon has one side
/// flush with a polygon edge, so only edge directions need to be tried.
pub fn min_width_box(poly: &[Point2]) -> (f64, f64) {
    let n = poly.len();
    let mut best: Option<(f64, f64)> = None;
    for i in 0..n {
        let e = poly[(i + 1) % n] - poly[i];
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        let u = e * (1.0 / len);
        let v = u.perp_cw();
        let (mut umin, mut umax, mut vmin, mut vmax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in poly {
            let (a, b) = (p.dot(u), p.dot(v));
            umin = umin.min(a);
            umax = umax.max(a);
            vmin = vmin.min(b);
            vmax = vmax.max(b);
        }
        let along = umax - umin;
        let width = vmax - vmin;
        if best.is_none_or(|(_, w)| width < w) {
            best = Some((along, width));
        }
    }
    let (a, w) = best.unwrap_or((0.0, 0.0));
    (a.max(w), a.min(w))
}

/// Diameter of the largest disc inscribed in a convex counter-clockwise polygon.
///
/// The optimal centre is equidistant from (at least) three edge lines, so every
/// triple of edge offsets is intersected and the largest feasible radius kept.
pub fn inscribed_diameter(poly: &[Point2]) -> f64 {
    let n = poly.len();
    // inward unit normal m_i and offset c_i with m_i . x >= c_i inside
    let lines: Vec<(Point2, f64)> = (0..n)
        .filter_map(|i| {
            let a = poly[i];
            let e = poly[(i + 1) % n] - a;
            let len = e.norm();
            (len > 0.0).then(|| {
                let m = Point2::new(-e.y, e.x) * (1.0 / len);
                (m, m.dot(a))
            })
        })
        .collect();
    let feasible = |p: Point2, r: f64| {
        lines
            .iter()
            .all(|(m, c)| m.dot(p) - c >= r * (1.0 - 1e-9) - 1e-12)
    };
    let mut best: f64 = 0.0;
    let m = lines.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                // solve m.x - r = c for the three lines
                let rows = [lines[i], lines[j], lines[k]];
                let mat = nalgebra::Matrix3::from_fn(|r, c| match c {
                    0 => rows[r].0.x,
                    1 => rows[r].0.y,
                    _ => -1.0,
                });
                let rhs = nalgebra::Vector3::new(rows[0].1, rows[1].1, rows[2].1);
                if let Some(sol) = mat.lu().solve(&rhs) {
                    let (p, r) = (Point2::new(sol[0], sol[1]), sol[2]);
                    if r.is_finite() && r > best && feasible(p, r) {
                        best = r;
                    }
                }
            }
        }
    }
    2.0 * best
}

/// Clips a convex polygon to the half-plane `{x : (x - origin) . normal <= 0}`.
///
/// Each vertex carries a tag describing the edge that starts at it; the new edge
/// created along the clipping line receives `line_tag`.
pub fn clip_tagged<T: Copy>(
    poly: &[(Point2, T)],
    origin: Point2,
    normal: Point2,
    line_tag: T,
) -> Vec<(Point2, T)> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    let side = |p: Point2| (p - origin).dot(normal);
    for i in 0..n {
        let (p, tag_p) = poly[i];
        let (q, _) = poly[(i + 1) % n];
        let sp = side(p);
        let sq = side(q);
        if sp <= 0.0 {
            out.push((p, tag_p));
            if sq > 0.0 {
                let t = sp / (sp - sq);
                out.push((p + (q - p) * t, line_tag));
            }
        } else if sq <= 0.0 {
            let t = sp / (sp - sq);
            out.push((p + (q - p) * t, tag_p));
        }
    }
    out
}
