//! Convex polygons carrying the focal segments, and the dashed rays that
//! extend their sides.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::chart::{LocalFrame, Polarity};
use crate::error::{PolyError, Result};

pub type Point = Vector2<f64>;

/// Traversal direction of the vertex list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    CounterClockwise,
}

/// A validated convex polygon in canonical placement.
///
/// Side `k` runs from vertex `k` to vertex `k + 1` (cyclically) and has
/// length `2 * f[k]`. `gamma[k]` is the interior angle at vertex `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonSpec {
    pub f: Vec<f64>,
    pub gamma: Vec<f64>,
    pub vertices: Vec<Point>,
    pub orientation: Orientation,
}

impl PolygonSpec {
    pub fn n(&self) -> usize {
        self.f.len()
    }

    pub fn vertex(&self, k: usize) -> Point {
        self.vertices[k % self.n()]
    }

    /// Semifocal distance of side `k`, with cyclic indexing.
    pub fn semifocal(&self, k: isize) -> f64 {
        self.f[k.rem_euclid(self.n() as isize) as usize]
    }

    pub fn angle(&self, k: isize) -> f64 {
        self.gamma[k.rem_euclid(self.n() as isize) as usize]
    }

    pub fn is_square(&self) -> bool {
        self.n() == 4
    }

    pub fn centroid(&self) -> Point {
        let n = self.n() as f64;
        self.vertices.iter().fold(Point::zeros(), |acc, v| acc + v) / n
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|k| {
                let a = self.vertices[k];
                let b = self.vertices[(k + 1) % n];
                a.x * b.y - b.x * a.y
            })
            .sum::<f64>()
            / 2.0
    }

    /// Largest semifocal distance; used as the length scale of tolerances.
    pub fn scale(&self) -> f64 {
        self.f.iter().cloned().fold(0.0, f64::max)
    }

    /// Signed distance of `p` from the line of side `k`; positive on the
    /// interior side.
    pub fn side_distance(&self, k: usize, p: Point) -> f64 {
        let a = self.vertex(k);
        let b = self.vertex(k + 1);
        let d = b - a;
        cross(d, p - a) / d.norm()
    }

    /// Euclidean distance from `p` to the polygon perimeter.
    pub fn perimeter_distance(&self, p: Point) -> f64 {
        (0..self.n())
            .map(|k| segment_distance(p, self.vertex(k), self.vertex(k + 1)))
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let t = ((p - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// Interior angle opposite side `a` of a triangle with sides `a`, `b`, `c`
/// (half-angle form, accurate for slivers).
pub(crate) fn triangle_angle(a: f64, b: f64, c: f64) -> f64 {
    let s = 0.5 * (a + b + c);
    2.0 * ((s - b) * (s - c)).sqrt().atan2((s * (s - a)).sqrt())
}

/// Builds a triangle (three semifocal distances) or a square (four equal
/// ones) in canonical placement: vertex 1 at the origin, side 12 along +x,
/// counterclockwise.
pub fn build_polygon(f: &[f64]) -> Result<PolygonSpec> {
    if f.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
        return Err(PolyError::DegenerateGeometry(format!(
            "semifocal distances must be positive and finite, got {f:?}"
        )));
    }
    match f.len() {
        3 => build_triangle(f[0], f[1], f[2]),
        4 => {
            let equal = f.iter().all(|&v| (v - f[0]).abs() <= 1e-12 * f[0]);
            if !equal {
                return Err(PolyError::Unsupported(
                    "only squares are supported among quadrilaterals".into(),
                ));
            }
            Ok(build_square(f[0]))
        }
        n if n < 3 => Err(PolyError::DegenerateGeometry(format!(
            "a polygon needs at least 3 sides, got {n}"
        ))),
        n => Err(PolyError::Unsupported(format!(
            "{n}-gons are not supported (triangle or square only)"
        ))),
    }
}

/// Square with all semifocal distances equal to `f`.
pub fn build_square(f: f64) -> PolygonSpec {
    let l = 2.0 * f;
    PolygonSpec {
        f: vec![f; 4],
        gamma: vec![PI / 2.0; 4],
        vertices: vec![
            Point::new(0.0, 0.0),
            Point::new(l, 0.0),
            Point::new(l, l),
            Point::new(0.0, l),
        ],
        orientation: Orientation::CounterClockwise,
    }
}

fn build_triangle(f1: f64, f2: f64, f3: f64) -> Result<PolygonSpec> {
    let (l12, l23, l31) = (2.0 * f1, 2.0 * f2, 2.0 * f3);
    if l12 >= l23 + l31 || l23 >= l12 + l31 || l31 >= l12 + l23 {
        return Err(PolyError::DegenerateGeometry(format!(
            "side lengths ({l12}, {l23}, {l31}) violate the triangle inequality"
        )));
    }
    let g1 = triangle_angle(l23, l12, l31);
    let g2 = triangle_angle(l31, l12, l23);
    let g3 = triangle_angle(l12, l23, l31);
    let v3 = Point::new(l31 * g1.cos(), l31 * g1.sin());
    Ok(PolygonSpec {
        f: vec![f1, f2, f3],
        gamma: vec![g1, g2, g3],
        vertices: vec![Point::new(0.0, 0.0), Point::new(l12, 0.0), v3],
        orientation: Orientation::CounterClockwise,
    })
}

/// Builds a triangle from full side lengths `(L12, L23, L31)`.
pub fn triangle_from_sides(sides: [f64; 3]) -> Result<PolygonSpec> {
    build_polygon(&sides.map(|s| s / 2.0))
}

/// Both polarities of every side frame, right polarity first.
///
/// The frame of side `k` carries its positive focus at vertex `k`, so the
/// local angle `theta = 0` points from the side midpoint towards vertex `k`.
pub fn side_frames(spec: &PolygonSpec) -> Vec<LocalFrame> {
    (0..spec.n())
        .flat_map(|k| {
            let (i, j) = (k, (k + 1) % spec.n());
            [Polarity::Right, Polarity::Left]
                .map(|pol| LocalFrame::from_foci(i, j, spec.vertex(i), spec.vertex(j), pol))
        })
        .collect()
}

/// Dashed ray `N_ij`: the extension of side `ij` beyond vertex `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DashedRay {
    /// Vertex the ray starts at (0-based).
    pub vertex: usize,
    /// Side being extended (0-based; side `k` joins vertices `k` and `k+1`).
    pub side: usize,
    pub origin: Point,
    pub direction: Point,
}

impl DashedRay {
    pub fn label(&self, n: usize) -> RayLabel {
        RayLabel { vertex: self.vertex, side: self.side, n }
    }

    pub fn point(&self, t: f64) -> Point {
        self.origin + self.direction * t
    }
}

/// Human-readable ray label, e.g. `1_31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RayLabel {
    pub vertex: usize,
    pub side: usize,
    pub n: usize,
}

impl fmt::Display for RayLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.side + 1;
        let b = (self.side + 1) % self.n + 1;
        write!(f, "{}_{}{}", self.vertex + 1, a, b)
    }
}

impl RayLabel {
    /// Parses labels such as `1_31` or `2_12` for a polygon with `n` sides.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let bad = || PolyError::Config(format!("invalid ray label '{s}'"));
        let (v, side) = s.split_once('_').ok_or_else(bad)?;
        let vertex: usize = v.parse().map_err(|_| bad())?;
        let digits: Vec<usize> = side
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        if digits.len() != 2 || vertex == 0 || vertex > n {
            return Err(bad());
        }
        let (a, b) = (digits[0], digits[1]);
        let side = (0..n).find(|&k| a == k + 1 && b == (k + 1) % n + 1).ok_or_else(bad)?;
        let vertex = vertex - 1;
        if vertex != side && vertex != (side + 1) % n {
            return Err(bad());
        }
        Ok(RayLabel { vertex, side, n })
    }
}

/// The `2n` dashed rays, two per vertex: first the extension of the side
/// arriving at the vertex, then the extension of the side leaving it.
pub fn dashed_rays(spec: &PolygonSpec) -> Vec<DashedRay> {
    let n = spec.n();
    let mut rays = Vec::with_capacity(2 * n);
    for k in 0..n {
        let v = spec.vertex(k);
        let prev = spec.vertex(k + n - 1);
        let next = spec.vertex(k + 1);
        rays.push(DashedRay {
            vertex: k,
            side: (k + n - 1) % n,
            origin: v,
            direction: (v - prev).normalize(),
        });
        rays.push(DashedRay { vertex: k, side: k, origin: v, direction: (v - next).normalize() });
    }
    rays
}
