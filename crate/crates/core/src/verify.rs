//! The verification suite behind `verify`: every invariant check of the
//! atlas, metric and solvers on one polygon, as a schema-stable report.

use std::f64::consts::TAU;

use serde_json::{json, Map, Value};

use crate::atlas::{sector_partition, BandKind, CommonCoord, SectorTable};
use crate::config::RunConfig;
use crate::metric::{jacobian, sample_quadruples, separability_residual, JacobianMode};
use crate::numfmt::json_num;
use crate::polygon::{build_polygon, dashed_rays, Point};
use crate::solver::mathieu::{mathieu_characteristic, mathieu_characteristic_truncated, periodic_spectrum, Parity};
use crate::solver::{angular_spectrum, helmholtz_residual, radial_solution, RadialBc, ResidualSamples};
use crate::{PolyError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub check: &'static str,
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub n_samples: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub config: RunConfig,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("check".into(), json!(c.check));
                m.insert("status".into(), json!(if c.pass { "pass" } else { "fail" }));
                m.insert("residual".into(), json_num(c.residual));
                m.insert("tolerance".into(), json_num(c.tolerance));
                m.insert("n_samples".into(), json!(c.n_samples));
                m.insert("detail".into(), json!(c.detail));
                Value::Object(m)
            })
            .collect();
        json!({
            "version": VERSION,
            "pass": self.pass(),
            "checks": checks,
            "config": serde_json::to_value(&self.config).unwrap_or(Value::Null),
        })
    }
}

fn result(check: &'static str, residual: f64, tolerance: f64, n: usize, extra_ok: bool, detail: String) -> CheckResult {
    CheckResult { check, pass: extra_ok && residual <= tolerance, residual, tolerance, n_samples: n, detail }
}

pub fn covering(t: &SectorTable, tol: f64) -> CheckResult {
    let total: f64 = t.bands.iter().map(|b| b.width()).sum();
    let contiguous = t.bands.windows(2).all(|w| w[0].hi == w[1].lo);
    let m = 10_000;
    let unique = (0..m).all(|j| {
        let th = TAU * j as f64 / m as f64;
        t.bands.iter().filter(|b| th >= b.lo && th < b.hi).count() == 1
    });
    result("covering", (total - TAU).abs(), tol, m, contiguous && unique, format!("{} bands", t.bands.len()))
}

/// Forward-map jumps across band edges (50 `mu_c` values) and across the
/// ray crossings inside compressed bands.
pub fn continuity(t: &SectorTable, tol: f64) -> CheckResult {
    let nb = t.bands.len();
    let (mut worst, mut n) = (0.0f64, 0);
    for b in 0..nb {
        let next = (b + 1) % nb;
        let edge = t.bands[b].hi;
        let edge_next = if next == 0 { 0.0 } else { edge };
        for i in 0..50 {
            let mu = 0.05 + 0.1 * i as f64;
            let d = t.resolve_in_band(b, mu, edge).point() - t.resolve_in_band(next, mu, edge_next).point();
            worst = worst.max(d.norm());
            n += 1;
        }
        let band = t.bands[b];
        if matches!(band.kind, BandKind::True(_)) || band.width() == 0.0 {
            continue;
        }
        for j in 1..20 {
            let th = band.lo + band.width() * j as f64 / 20.0;
            let Some(ae) = t.crossing_ae_c(th) else { continue };
            let Ok(mu) = t.mu_c_from_ae_c(ae) else { continue };
            if mu > 8.0 {
                continue;
            }
            let d = t.piece(b, false, mu, th).point() - t.piece(b, true, mu, th).point();
            worst = worst.max(d.norm());
            n += 1;
        }
    }
    result("continuity", worst, tol, n, true, String::new())
}

pub fn round_trip(t: &SectorTable, tol: f64) -> CheckResult {
    let (mut worst, mut n) = (0.0f64, 0);
    let mut failures = 0;
    for i in 1..=100 {
        let mu = 4.0 * i as f64 / 100.0;
        for j in 0..100 {
            let th = TAU * (j as f64 + 0.37) / 100.0;
            match t.inverse(t.forward(CommonCoord::new(mu, th))) {
                Ok((c, _)) => {
                    let dth = (c.theta_c - th + 0.5 * TAU).rem_euclid(TAU) - 0.5 * TAU;
                    worst = worst.max((c.mu_c - mu).abs()).max(dth.abs());
                }
                Err(_) => failures += 1,
            }
            n += 1;
        }
    }
    // interior points must be refused
    let c = t.spec.centroid();
    let nv = t.n();
    let mut protected = true;
    for k in 0..nv {
        for s in [0.2, 0.5, 0.9] {
            let p: Point = c + (t.spec.vertex(k) - c) * s;
            protected &= t.inverse(p) == Err(PolyError::ProtectedRegion);
            n += 1;
        }
    }
    let detail = format!("{failures} inverse failures; interior refused: {protected}");
    result("round-trip", worst, tol, n, failures == 0 && protected, detail)
}

pub fn orthogonality(t: &SectorTable, tol: f64) -> CheckResult {
    let mut worst = 0.0f64;
    for i in 1..=100 {
        let mu = 4.0 * i as f64 / 100.0;
        for j in 0..100 {
            let c = CommonCoord::new(mu, TAU * j as f64 / 100.0);
            let s = jacobian(t, c, JacobianMode::Analytic)
                .or_else(|_| jacobian(t, c, JacobianMode::FiniteDifference))
                .map(|m| m.skew())
                .unwrap_or(f64::INFINITY);
            worst = worst.max(s);
        }
    }
    result("orthogonality", worst, tol, 10_000, true, String::new())
}

pub fn separability(t: &SectorTable, tol: f64) -> CheckResult {
    let q = sample_quadruples(t, 10_000, 4.0, 1);
    result("separability", separability_residual(t, &q), tol, q.len(), true, String::new())
}

/// Normals of the two ellipses meeting on each dashed ray are parallel.
pub fn tangent_matching(t: &SectorTable, tol: f64) -> CheckResult {
    let n = t.n();
    let mut worst = 0.0f64;
    let mut count = 0;
    for ray in dashed_rays(&t.spec) {
        let k = ray.vertex;
        let w = t.wedge_frames[k];
        let e = if ray.side == k { t.edge_frames[(k + n - 1) % n] } else { t.edge_frames[k] };
        let grad = |p: Point, a: Point, b: Point| (p - a).normalize() + (p - b).normalize();
        for i in 1..=100 {
            let p = ray.point(0.05 * i as f64);
            let g1 = grad(p, w.positive_focus(), w.negative_focus());
            let g2 = grad(p, e.positive_focus(), e.negative_focus());
            worst = worst.max(((g1.x * g2.y - g1.y * g2.x) / (g1.norm() * g2.norm())).abs());
            count += 1;
        }
    }
    result("tangent-matching", worst, tol, count, true, String::new())
}

/// Sup-norm distance, over a 20 x 40 grid, between the triangle
/// `(1, 1, eps)` and the elliptic system of its first vertex chart
/// (`ae = ae_c`, angle `theta_v1 - theta_c`).
pub fn degeneration_deviation(eps: f64) -> Result<f64> {
    let t = sector_partition(&build_polygon(&[1.0, 1.0, eps])?)?;
    let w = t.wedge_frames[0];
    let mut worst = 0.0f64;
    for i in 1..=20 {
        let mu = 0.1 * i as f64;
        let ae = t.ae_c_from_mu_c(mu)?;
        let b = (ae * ae - w.f * w.f).max(0.0).sqrt();
        for j in 0..40 {
            let th = TAU * (j as f64 + 0.5) / 40.0;
            let tb = t.theta_v1() - th;
            let classical = w.midpoint + w.axis() * (ae * tb.cos()) - w.normal() * (b * tb.sin());
            worst = worst.max((t.forward(CommonCoord::new(mu, th)) - classical).norm());
        }
    }
    Ok(worst)
}

fn degeneration(tol: f64) -> CheckResult {
    let d: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|e| degeneration_deviation(*e).unwrap_or(f64::INFINITY)).collect();
    let monotone = d.windows(2).all(|w| w[1] < w[0]);
    result("degeneration", d[2], tol, 3 * 800, monotone, format!("{:.3e} {:.3e} {:.3e}", d[0], d[1], d[2]))
}

/// Largest deviation of the first 5 angular eigenvalues of `(1, 1, 1e-6)`
/// from Mathieu's characteristic values, relative to `max(|a|, 1)`; also
/// folds in the oracle's own checks (q = 0 exact, truncation doubling).
pub fn mathieu_limit_residual(resolution: usize) -> Result<f64> {
    let t = sector_partition(&build_polygon(&[1.0, 1.0, 1e-6])?)?;
    let f = t.wedge_frames[0].f;
    let mut worst = 0.0f64;
    for q in [0.5f64, 1.0, 5.0] {
        let k = 2.0 * q.sqrt() / f;
        let got = angular_spectrum(&t, k, 5, resolution)?;
        for (g, a) in got.iter().zip(periodic_spectrum(q, 5)) {
            worst = worst.max((g.lambda - a).abs() / a.abs().max(1.0));
        }
    }
    for n in 0..6usize {
        worst = worst.max((mathieu_characteristic(0.0, n, Parity::Even) - (n * n) as f64).abs());
        for p in [Parity::Even, Parity::Odd] {
            if p == Parity::Odd && n == 0 {
                continue;
            }
            let (a, b) = (mathieu_characteristic_truncated(5.0, n, p, 20), mathieu_characteristic_truncated(5.0, n, p, 40));
            worst = worst.max((a - b).abs() / b.abs().max(1.0) * 1e5);
        }
    }
    Ok(worst)
}

fn mathieu_limit(tol: f64) -> CheckResult {
    let r = mathieu_limit_residual(1440).unwrap_or(f64::INFINITY);
    result("mathieu-limit", r, tol, 15, true, "q = 0.5, 1, 5; first 5 eigenvalues".into())
}

/// In-sector recomposition residual of `Psi1 Psi2` at angular resolution
/// `resolution` (radial step matched to the angular one).
pub fn recomposition(t: &SectorTable, k: f64, index: usize, resolution: usize) -> Result<(f64, usize)> {
    let s = ResidualSamples::default_for(t);
    let pairs = angular_spectrum(t, k, index + 1, resolution)?;
    let pair = &pairs[index];
    let mu_max = s.mu_hi + 0.25;
    let steps = (mu_max * resolution as f64 / TAU).ceil() as usize;
    let rad = radial_solution(t, s.sector, k, pair.lambda, RadialBc::Dirichlet, mu_max, steps)?;
    helmholtz_residual(t, k, pair, &rad, &s)
}

fn helmholtz(t: &SectorTable, cfg: &RunConfig, tol: f64) -> CheckResult {
    let (k, index, res) = (cfg.solver.k, cfg.solver.index, cfg.solver.resolution);
    match (recomposition(t, k, index, res), recomposition(t, k, index, 2 * res)) {
        (Ok((a, n)), Ok((b, _))) => {
            let ratio = a / b;
            let second_order = (ratio - 4.0).abs() <= 0.8 || a < 1e-12;
            result("helmholtz-residual", a, tol, n, second_order, format!("k {k}, eigenpair {index}, ratio on halving {ratio:.3}"))
        }
        (Err(e), _) | (_, Err(e)) => result("helmholtz-residual", f64::INFINITY, tol, 0, false, e.to_string()),
    }
}

/// Runs all checks on the config's polygon.
pub fn run_verify(cfg: &RunConfig) -> Result<VerifyReport> {
    let t = sector_partition(&cfg.spec()?)?;
    let tol = |name: &str, default: f64| cfg.tolerances.get(name).copied().unwrap_or(default);
    let checks = vec![
        covering(&t, tol("covering", 1e-12)),
        continuity(&t, tol("continuity", 1e-9)),
        round_trip(&t, tol("round-trip", 1e-9)),
        orthogonality(&t, tol("orthogonality", 1e-7)),
        separability(&t, tol("separability", 1e-8)),
        tangent_matching(&t, tol("tangent-matching", 1e-10)),
        degeneration(tol("degeneration", 1e-4)),
        mathieu_limit(tol("mathieu-limit", 1e-5)),
        helmholtz(&t, cfg, tol("helmholtz-residual", 1e-3)),
    ];
    Ok(VerifyReport { checks, config: cfg.clone() })
}
