//! Metric of the common coordinates: Jacobians, scale factors and the
//! Stäckel factors of each piece.
//!
//! Inside any piece the local chart is elliptic, its ellipse parameter a
//! function of `mu_c` alone and its hyperbola angle a function of `theta_c`
//! alone, so with `ae^2 - f^2 cos^2 theta` as the common factor
//!
//! ```text
//! H_theta^2 = g1(theta_c) [h1(mu_c) + h2(theta_c)],  g1 = (d theta / d theta_c)^2
//! H_mu^2    = g2(mu_c)    [h1(mu_c) + h2(theta_c)],  g2 = K^2 sinh^2 mu_c / (ae^2 - f^2)
//! h1 = ae^2,  h2 = -f^2 cos^2 theta
//! ```

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atlas::{CommonCoord, Resolved, SectorId, SectorTable};
use crate::error::{PolyError, Result};
use crate::numfmt::num;
use crate::polygon::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobianMode {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub mu_c: f64,
    pub theta_c: f64,
    pub dx_dmu: f64,
    pub dx_dtheta: f64,
    pub dy_dmu: f64,
    pub dy_dtheta: f64,
    pub h_mu: f64,
    pub h_theta: f64,
    pub g12: f64,
}

impl MetricSample {
    fn from_columns(c: CommonCoord, d_mu: Point, d_th: Point) -> Self {
        MetricSample {
            mu_c: c.mu_c,
            theta_c: c.theta_c,
            dx_dmu: d_mu.x,
            dx_dtheta: d_th.x,
            dy_dmu: d_mu.y,
            dy_dtheta: d_th.y,
            h_mu: d_mu.norm(),
            h_theta: d_th.norm(),
            g12: d_mu.dot(&d_th),
        }
    }

    /// `|g12| / (H_mu H_theta)`.
    pub fn skew(&self) -> f64 {
        self.g12.abs() / (self.h_mu * self.h_theta)
    }
}

fn on_band_edge(table: &SectorTable, theta_c: f64, tol: f64) -> Option<f64> {
    let t = theta_c.rem_euclid(std::f64::consts::TAU);
    table
        .bands
        .iter()
        .flat_map(|b| [b.lo, b.hi])
        .chain([std::f64::consts::TAU])
        .find(|e| (t - e).abs() <= tol)
}

/// Jacobian of the forward map.
pub fn jacobian(table: &SectorTable, c: CommonCoord, mode: JacobianMode) -> Result<MetricSample> {
    if !(c.mu_c > 0.0) {
        return Err(PolyError::OutOfDomain(format!("mu_c = {} must be positive", c.mu_c)));
    }
    match mode {
        JacobianMode::Analytic => {
            if on_band_edge(table, c.theta_c, 1e-14).is_some() {
                return Err(PolyError::BoundaryPoint);
            }
            if let Some(ae) = table.crossing_ae_c(c.theta_c) {
                let ae_c = table.radial_scale * c.mu_c.cosh();
                if (ae_c - ae).abs() <= 1e-14 * ae {
                    return Err(PolyError::BoundaryPoint);
                }
            }
            let (d_mu, d_th) = table.derivatives(c);
            Ok(MetricSample::from_columns(c, d_mu, d_th))
        }
        JacobianMode::FiniteDifference => {
            let h = 1e-6 * c.mu_c.max(1.0);
            let f = |m: f64, t: f64| table.forward(CommonCoord::new(m, t));
            // theta: one-sided away from a band edge within 2h
            let d_th = match on_band_edge(table, c.theta_c, 2.0 * h) {
                None => (f(c.mu_c, c.theta_c + h) - f(c.mu_c, c.theta_c - h)) / (2.0 * h),
                Some(e) => {
                    let s = if c.theta_c.rem_euclid(std::f64::consts::TAU) >= e { 1.0 } else { -1.0 };
                    one_sided(|t| f(c.mu_c, t), c.theta_c, s * h)
                }
            };
            // mu: one-sided near the ray crossing and near the perimeter
            let cross_mu = table.crossing_ae_c(c.theta_c).and_then(|ae| table.mu_c_from_ae_c(ae).ok());
            let d_mu = match cross_mu {
                Some(m) if (c.mu_c - m).abs() <= 2.0 * h => {
                    let s = if c.mu_c >= m { 1.0 } else { -1.0 };
                    one_sided(|m| f(m, c.theta_c), c.mu_c, s * h)
                }
                _ if c.mu_c <= 2.0 * h => one_sided(|m| f(m, c.theta_c), c.mu_c, h),
                _ => (f(c.mu_c + h, c.theta_c) - f(c.mu_c - h, c.theta_c)) / (2.0 * h),
            };
            Ok(MetricSample::from_columns(c, d_mu, d_th))
        }
    }
}

/// Second-order one-sided difference with signed step `h`.
fn one_sided(f: impl Fn(f64) -> Point, x: f64, h: f64) -> Point {
    (f(x + h) * 4.0 - f(x) * 3.0 - f(x + 2.0 * h)) / (2.0 * h)
}

/// Closed-form `(H_mu^2, H_theta^2)` of a resolved point.
fn squares(table: &SectorTable, mu_c: f64, r: &Resolved) -> (f64, f64) {
    let f = r.frame.f;
    let ct = r.theta_abs.cos();
    let common = r.ae * r.ae - f * f * ct * ct;
    let k = table.radial_scale * mu_c.sinh();
    (k * k * common / (r.gap * (r.ae + f)), r.dtheta * r.dtheta * common)
}

/// Scale factors `(H_mu, H_theta)`.
pub fn scale_factors(table: &SectorTable, c: CommonCoord) -> (f64, f64) {
    let (m, t) = squares(table, c.mu_c, &table.resolve(c));
    (m.sqrt(), t.sqrt())
}

/// The one-variable factors of one piece.
#[derive(Debug, Clone, Copy)]
pub struct StackelFactors<'a> {
    table: &'a SectorTable,
    pub sector: SectorId,
}

impl<'a> StackelFactors<'a> {
    fn at(&self, mu_c: f64, theta_c: f64) -> Resolved {
        let (b, far) = self.table.sector_band(self.sector, theta_c);
        self.table.piece(b, far, mu_c, theta_c)
    }

    pub fn g1(&self, theta_c: f64) -> f64 {
        let r = self.at(1.0, theta_c);
        r.dtheta * r.dtheta
    }

    pub fn h2(&self, theta_c: f64) -> f64 {
        let r = self.at(1.0, theta_c);
        let c = r.theta_abs.cos();
        -r.frame.f * r.frame.f * c * c
    }

    /// Any `theta_c` of the sector gives the same radial part.
    fn radial_probe(&self) -> f64 {
        let s = self.table.sector(self.sector);
        0.5 * (s.theta_lo + s.theta_hi)
    }

    pub fn h1(&self, mu_c: f64) -> f64 {
        let r = self.at(mu_c, self.radial_probe());
        r.ae * r.ae
    }

    pub fn g2(&self, mu_c: f64) -> f64 {
        let r = self.at(mu_c, self.radial_probe());
        let k = self.table.radial_scale * mu_c.sinh();
        k * k / (r.gap * (r.ae + r.frame.f))
    }

    /// `g1'/(2 g1)`, by differentiating the closed form.
    pub fn g1_log_slope(&self, theta_c: f64) -> f64 {
        let h = 1e-6;
        0.25 * ((self.g1(theta_c + h)).ln() - (self.g1(theta_c - h)).ln()) / h
    }
}

pub fn stackel_factors(table: &SectorTable, sector: SectorId) -> StackelFactors<'_> {
    StackelFactors { table, sector }
}

/// An axis-aligned rectangle of the `(mu_c, theta_c)` plane whose corners
/// lie in one piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadruple {
    pub sector: SectorId,
    pub mu: [f64; 2],
    pub theta: [f64; 2],
}

/// Mixed difference of `H_theta^2 / g1` over each quadruple, relative to
/// the largest corner value; zero for a separable metric.
pub fn separability_residual(table: &SectorTable, samples: &[Quadruple]) -> f64 {
    let mut worst = 0.0f64;
    for q in samples {
        let st = stackel_factors(table, q.sector);
        let s = |m: f64, t: f64| {
            // the Jacobian, not the closed form, supplies H_theta
            let (_, d_th) = table.derivatives(CommonCoord::new(m, t));
            d_th.norm_squared() / st.g1(t)
        };
        let v = [s(q.mu[0], q.theta[0]), s(q.mu[0], q.theta[1]), s(q.mu[1], q.theta[0]), s(q.mu[1], q.theta[1])];
        let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        worst = worst.max((v[0] - v[1] - v[2] + v[3]).abs() / scale);
    }
    worst
}

/// Random quadruples with all four corners inside one piece, drawn for
/// `0 < mu_c <= mu_max`.
pub fn sample_quadruples(table: &SectorTable, count: usize, mu_max: f64, seed: u64) -> Vec<Quadruple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let tau = std::f64::consts::TAU;
    while out.len() < count {
        let t0 = rng.gen_range(0.0..tau);
        let band = table.bands[table.band_at(t0)];
        let t1 = rng.gen_range(band.lo..band.hi.max(band.lo + 1e-300));
        let (m0, m1) = (rng.gen_range(1e-3..mu_max), rng.gen_range(1e-3..mu_max));
        let id = table.sector_at(CommonCoord::new(m0, t0));
        let corners = [(m0, t0), (m0, t1), (m1, t0), (m1, t1)];
        if corners.iter().all(|&(m, t)| table.sector_at(CommonCoord::new(m, t)) == id)
            && corners.iter().all(|&(_, t)| on_band_edge(table, t, 1e-12).is_none())
        {
            out.push(Quadruple { sector: id, mu: [m0, m1], theta: [t0, t1] });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub theta_c: f64,
    pub h_theta_sq: f64,
    pub h_mu_sq: f64,
    pub sector: String,
}

/// `H^2` profile over `theta_c` at fixed `mu_c`, `samples` points.
pub fn metric_profile(table: &SectorTable, mu_c: f64, samples: usize) -> Result<Vec<ProfileRow>> {
    if !(mu_c > 0.0) || samples == 0 {
        return Err(PolyError::InvalidGrid(format!("mu_c = {mu_c}, samples = {samples}")));
    }
    Ok((0..samples)
        .map(|j| {
            let t = std::f64::consts::TAU * j as f64 / samples as f64;
            let r = table.resolve(CommonCoord::new(mu_c, t));
            let (m, th) = squares(table, mu_c, &r);
            ProfileRow { theta_c: t, h_theta_sq: th, h_mu_sq: m, sector: table.sector(r.sector).label.clone() }
        })
        .collect())
}

pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut s = String::from("theta_c,H_theta_sq,H_mu_sq,sector_id\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", num(r.theta_c), num(r.h_theta_sq), num(r.h_mu_sq), r.sector);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::sector_partition;
    use crate::polygon::build_polygon;

    fn reference() -> SectorTable {
        sector_partition(&build_polygon(&[1.39, 2.595, 2.44]).unwrap()).unwrap()
    }

    #[test]
    fn first_wedge_closed_forms() {
        let t = reference();
        let (f2, k) = (2.595f64, 1.39 + 2.44);
        let st = stackel_factors(&t, SectorId::Wedge(0));
        for (mu, th) in [(2.5, 0.3), (3.0, 0.5), (3.0, 6.2)] {
            assert_eq!(t.sector_at(CommonCoord::new(mu, th)), SectorId::Wedge(0));
            let ae = k * f64::cosh(mu);
            let want_t = ae * ae - f2 * f2 * (th - t.theta_v1()).cos().powi(2);
            let want_m = k * k * mu.sinh().powi(2) * want_t / (ae * ae - f2 * f2);
            let (hm, ht) = scale_factors(&t, CommonCoord::new(mu, th));
            assert!((ht * ht - want_t).abs() < 1e-12 * want_t);
            assert!((hm * hm - want_m).abs() < 1e-12 * want_m);
            assert!((st.g1(th) - 1.0).abs() < 1e-15);
            assert!((st.h1(mu) - ae * ae).abs() < 1e-12 * ae * ae);
            assert!((st.g2(mu) - k * k * mu.sinh().powi(2) / (ae * ae - f2 * f2)).abs() < 1e-12 * st.g2(mu));
        }
        // at theta_c = theta_v1 the angular factor is the bare ellipse term
        let ae = k * 1.3f64.cosh();
        let ht = st.g1(t.theta_v1()) * (st.h1(1.3) + st.h2(t.theta_v1()));
        assert!((ht - (ae * ae - f2 * f2)).abs() < 1e-12 * ae * ae);
    }

    #[test]
    fn analytic_rejects_boundaries() {
        let t = reference();
        let edge = t.bands[1].lo;
        assert_eq!(jacobian(&t, CommonCoord::new(1.0, edge), JacobianMode::Analytic), Err(PolyError::BoundaryPoint));
        assert!(jacobian(&t, CommonCoord::new(1.0, edge), JacobianMode::FiniteDifference).is_ok());
        assert!(jacobian(&t, CommonCoord::new(0.0, 1.0), JacobianMode::Analytic).is_err());
    }

    #[test]
    fn csv_header() {
        let t = reference();
        let rows = metric_profile(&t, 1.1, 8).unwrap();
        let csv = profile_csv(&rows);
        assert!(csv.starts_with("theta_c,H_theta_sq,H_mu_sq,sector_id\n"));
        assert_eq!(csv.lines().count(), 9);
    }
}
