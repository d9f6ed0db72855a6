//! Single-segment elliptic charts.
//!
//! A chart is attached to a focal segment with positive focus `P` and
//! negative focus `Q`. Local coordinates `(mu, theta)` map through
//! `A = f cosh(mu) cos(theta)`, `B = f sinh(mu) sin(theta)` followed by a
//! rotation by `beta` (the direction `Q -> P`) and a translation to the
//! segment midpoint.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PolyError, Result};
use crate::polygon::{cross, DashedRay, Point};

/// Which half-plane of the focal line a frame covers: right hosts
/// `theta` in `[0, pi]`, left hosts `[pi, 2 pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Right,
    Left,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Right => 1.0,
            Polarity::Left => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalFrame {
    /// Vertex carrying the positive focus.
    pub i: usize,
    /// Vertex carrying the negative focus.
    pub j: usize,
    /// Angle of the direction `Q -> P` against +x, in `[0, 2 pi)`.
    pub beta: f64,
    pub midpoint: Point,
    pub f: f64,
    pub polarity: Polarity,
}

impl LocalFrame {
    pub fn from_foci(i: usize, j: usize, p: Point, q: Point, polarity: Polarity) -> Self {
        let d = p - q;
        LocalFrame {
            i,
            j,
            beta: d.y.atan2(d.x).rem_euclid(2.0 * PI),
            midpoint: (p + q) / 2.0,
            f: d.norm() / 2.0,
            polarity,
        }
    }

    /// Unit vector pointing at the positive focus.
    pub fn axis(&self) -> Point {
        Point::new(self.beta.cos(), self.beta.sin())
    }

    /// Axis rotated by +90 degrees (the `theta = pi/2` direction).
    pub fn normal(&self) -> Point {
        Point::new(-self.beta.sin(), self.beta.cos())
    }

    pub fn positive_focus(&self) -> Point {
        self.midpoint + self.axis() * self.f
    }

    pub fn negative_focus(&self) -> Point {
        self.midpoint - self.axis() * self.f
    }

    pub fn with_polarity(mut self, polarity: Polarity) -> Self {
        self.polarity = polarity;
        self
    }

    /// Point on the confocal ellipse of semi-axis `ae` whose hyperbola
    /// makes the angle `theta_abs` in `[0, pi]` with the axis, on the
    /// frame's own half-plane.
    ///
    /// `gap = ae - f` is passed separately so points close to the focal
    /// segment keep full precision.
    pub fn point_on(&self, ae: f64, gap: f64, theta_abs: f64) -> Point {
        let b = (gap * (ae + self.f)).max(0.0).sqrt();
        self.midpoint
            + self.axis() * (ae * theta_abs.cos())
            + self.normal() * (self.polarity.sign() * b * theta_abs.sin())
    }

    /// Derivatives of [`Self::point_on`] with respect to `ae` and
    /// `theta_abs`.
    pub fn point_derivs(&self, ae: f64, gap: f64, theta_abs: f64) -> (Point, Point) {
        let b = (gap * (ae + self.f)).max(0.0).sqrt();
        let s = self.polarity.sign();
        let (sn, cs) = theta_abs.sin_cos();
        let d_ae = self.axis() * cs + self.normal() * (s * ae / b * sn);
        let d_th = self.axis() * (-ae * sn) + self.normal() * (s * b * cs);
        (d_ae, d_th)
    }
}

/// Local elliptic coordinate on a frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalCoord {
    pub mu: f64,
    pub theta: f64,
}

/// Semi-axes of the confocal conics through a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiAxes {
    pub ae: f64,
    pub ah: f64,
    /// Distance to the positive focus.
    pub r_a: f64,
    /// Distance to the negative focus.
    pub r_b: f64,
}

pub fn semi_axes(frame: &LocalFrame, p: Point) -> SemiAxes {
    let r_a = (p - frame.positive_focus()).norm();
    let r_b = (p - frame.negative_focus()).norm();
    SemiAxes { ae: (r_a + r_b) / 2.0, ah: (r_b - r_a) / 2.0, r_a, r_b }
}

pub fn local_to_cartesian(frame: &LocalFrame, c: LocalCoord) -> Point {
    let a = frame.f * c.mu.cosh() * c.theta.cos();
    let b = frame.f * c.mu.sinh() * c.theta.sin();
    let (sb, cb) = frame.beta.sin_cos();
    frame.midpoint + Point::new(a * cb - b * sb, a * sb + b * cb)
}

/// Inverse of [`local_to_cartesian`] on the frame's half-plane.
///
/// Uses the complex form `X + iY = f cosh(mu + i theta)`; points on the
/// focal line are accepted by either polarity.
pub fn cartesian_to_local(frame: &LocalFrame, p: Point) -> Result<LocalCoord> {
    let d = p - frame.midpoint;
    let x = d.dot(&frame.axis());
    let y = d.dot(&frame.normal());
    let on_line = y.abs() < 1e-13 * frame.f;
    let y = if on_line { 0.0 } else { y };
    match frame.polarity {
        Polarity::Right if y < 0.0 => return Err(PolyError::WrongSide("right")),
        Polarity::Left if y > 0.0 => return Err(PolyError::WrongSide("left")),
        _ => {}
    }
    let w = elliptic_acosh(Complex64::new(x, y.abs()) / frame.f);
    let theta = match frame.polarity {
        Polarity::Right => w.im,
        Polarity::Left if w.im == 0.0 || w.im == PI => w.im,
        Polarity::Left => 2.0 * PI - w.im,
    };
    Ok(LocalCoord { mu: w.re.max(0.0), theta })
}

/// `acosh` on the closed upper half-plane with real part `>= 0` and
/// imaginary part in `[0, pi]`.
pub(crate) fn elliptic_acosh(z: Complex64) -> Complex64 {
    let w = ((z - 1.0).sqrt() * (z + 1.0).sqrt() + z).ln();
    if w.re < 0.0 {
        -w
    } else {
        w
    }
}

/// Hyperbolic semi-axis at which `ray` meets the confocal ellipse of
/// semi-axis `ae` of `frame`.
///
/// The ray's supporting line must pass through one of the frame's foci
/// (the combinations used by the dashed lines). With `phi` the angle
/// between the ray direction and the direction from that focus to the
/// other one, the intersection satisfies
/// `ah = +-f (f - ae cos phi) / (ae - f cos phi)`, positive for the
/// positive focus.
pub fn ray_in_local(frame: &LocalFrame, ray: &DashedRay, ae: f64) -> Result<f64> {
    if ae < frame.f {
        return Err(PolyError::OutOfDomain(format!(
            "ellipse semi-axis {ae} below the semifocal distance {}",
            frame.f
        )));
    }
    let (pf, qf) = (frame.positive_focus(), frame.negative_focus());
    let tol = 1e-9 * frame.f;
    let through = |focus: Point| cross(ray.direction, focus - ray.origin).abs() < tol;
    let (focus, other, sign) = match (through(pf), through(qf)) {
        (true, false) => (pf, qf, 1.0),
        (false, true) => (qf, pf, -1.0),
        _ => {
            return Err(PolyError::OutOfDomain(
                "ray line does not pass through exactly one focus of the frame".into(),
            ))
        }
    };
    let cos_phi = ray.direction.dot(&(other - focus).normalize());
    let f = frame.f;
    Ok(sign * f * (f - ae * cos_phi) / (ae - f * cos_phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{build_polygon, dashed_rays};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn frame(f: f64, beta: f64, mid: Point, pol: Polarity) -> LocalFrame {
        let ax = Point::new(beta.cos(), beta.sin());
        LocalFrame::from_foci(0, 1, mid + ax * f, mid - ax * f, pol)
    }

    #[test]
    fn forward_examples() {
        let fr = frame(2.0, 0.0, Point::zeros(), Polarity::Right);
        let p = local_to_cartesian(&fr, LocalCoord { mu: 0.0, theta: 0.0 });
        assert!((p - Point::new(2.0, 0.0)).norm() < 1e-15);
        let p = local_to_cartesian(&fr, LocalCoord { mu: 1.0, theta: PI / 2.0 });
        assert!(p.x.abs() < 1e-15);
        assert_relative_eq!(p.y, 2.0 * 1f64.sinh(), epsilon = 1e-15);
        assert_relative_eq!(p.y, 2.3504, epsilon = 1e-4);
    }

    #[test]
    fn distance_sum_identity() {
        let fr = frame(1.39, PI, Point::new(1.39, 0.0), Polarity::Right);
        let p = local_to_cartesian(&fr, LocalCoord { mu: 0.7, theta: 1.1 });
        let s = semi_axes(&fr, p);
        assert_relative_eq!(s.r_a + s.r_b, 2.0 * 1.39 * 0.7f64.cosh(), max_relative = 1e-14);
        assert_relative_eq!(s.ah, 1.39 * 1.1f64.cos(), max_relative = 1e-13);
    }

    #[test]
    fn inverse_examples() {
        let fr = frame(2.0, 0.0, Point::zeros(), Polarity::Right);
        let c = cartesian_to_local(&fr, Point::new(2.0, 0.0)).unwrap();
        assert!(c.mu.abs() < 1e-15 && c.theta.abs() < 1e-15);
        let c = cartesian_to_local(&fr, Point::new(0.0, 2.0 * 1f64.sinh())).unwrap();
        assert_relative_eq!(c.mu, 1.0, epsilon = 1e-14);
        assert_relative_eq!(c.theta, PI / 2.0, epsilon = 1e-14);
        assert_eq!(
            cartesian_to_local(&fr, Point::new(0.3, -1.0)),
            Err(PolyError::WrongSide("right"))
        );
    }

    #[test]
    fn round_trip_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for pol in [Polarity::Right, Polarity::Left] {
            let fr = frame(1.7, 0.8, Point::new(0.4, -0.3), pol);
            for _ in 0..1000 {
                let mu = rng.gen_range(0.01..4.0);
                let th = rng.gen_range(0.001..PI - 0.001)
                    + if pol == Polarity::Left { PI } else { 0.0 };
                let p = local_to_cartesian(&fr, LocalCoord { mu, theta: th });
                let c = cartesian_to_local(&fr, p).unwrap();
                let q = local_to_cartesian(&fr, c);
                assert!((p - q).norm() < 1e-10 * p.norm().max(1.0));
            }
        }
    }

    #[test]
    fn confocal_ellipses() {
        let fr = frame(1.3, 2.1, Point::new(1.0, 2.0), Polarity::Right);
        for i in 0..50 {
            let th = i as f64 * 2.0 * PI / 50.0;
            let p = local_to_cartesian(&fr, LocalCoord { mu: 0.9, theta: th });
            let s = semi_axes(&fr, p);
            assert!((s.r_a + s.r_b - 2.0 * 1.3 * 0.9f64.cosh()).abs() < 1e-12);
        }
    }

    /// The four dashed-line relations as tabulated, for the frame of side 12.
    fn tabulated_relations(f1: f64, g1: f64, g2: f64, ae: f64) -> [f64; 4] {
        let (c1, c2) = (g1.cos(), g2.cos());
        [
            f1 * (ae * c1 + f1) / (ae + f1 * c1),
            -f1 * (ae * c2 + f1) / (ae + f1 * c2),
            -f1 * (ae * c1 - f1) / (ae - f1 * c1),
            f1 * (ae * c2 - f1) / (ae - f1 * c2),
        ]
    }

    #[test]
    fn matches_tabulated_relations() {
        let p = build_polygon(&[1.39, 2.595, 2.44]).unwrap();
        let fr = LocalFrame::from_foci(0, 1, p.vertex(0), p.vertex(1), Polarity::Right);
        let rays = dashed_rays(&p);
        let find = |v: usize, s: usize| *rays.iter().find(|r| r.vertex == v && r.side == s).unwrap();
        // 1_31, 2_23, 3_31, 3_23
        let sel = [find(0, 2), find(1, 1), find(2, 2), find(2, 1)];
        for ae in [1.39, 1.6, 3.0, 10.0, 1e4] {
            let want = tabulated_relations(1.39, p.gamma[0], p.gamma[1], ae);
            for (r, w) in sel.iter().zip(want) {
                let got = ray_in_local(&fr, r, ae).unwrap();
                assert_relative_eq!(got, w, epsilon = 1e-12);
            }
        }
        assert!(ray_in_local(&fr, &sel[0], 1.0).is_err());
    }

    #[test]
    fn ray_limits() {
        let p = build_polygon(&[1.39, 2.595, 2.44]).unwrap();
        let fr = LocalFrame::from_foci(0, 1, p.vertex(0), p.vertex(1), Polarity::Right);
        let r = dashed_rays(&p)[0];
        assert_relative_eq!(ray_in_local(&fr, &r, 1.39).unwrap(), 1.39, epsilon = 1e-14);
        let far = ray_in_local(&fr, &r, 1e12).unwrap();
        assert_relative_eq!(far, 1.39 * p.gamma[0].cos(), epsilon = 1e-9);
    }

    /// Geometric oracle: intersect the ray with the confocal ellipse by
    /// bisection on the distance sum.
    #[test]
    fn ray_1_31_against_bisection() {
        let p = build_polygon(&[1.39, 2.595, 2.44]).unwrap();
        let fr = LocalFrame::from_foci(0, 1, p.vertex(0), p.vertex(1), Polarity::Right);
        let r = dashed_rays(&p)[0];
        let ae = 3.0;
        let sum = |t: f64| {
            let q = r.point(t);
            (q - p.vertex(0)).norm() + (q - p.vertex(1)).norm() - 2.0 * ae
        };
        let (mut lo, mut hi) = (0.0, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sum(mid) > 0.0 {
                hi = mid
            } else {
                lo = mid
            }
        }
        let q = r.point(lo);
        let ah = semi_axes(&fr, q).ah;
        assert_relative_eq!(ray_in_local(&fr, &r, ae).unwrap(), ah, epsilon = 1e-12);
    }
}
