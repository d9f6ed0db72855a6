//! Coordinate nets and the rectangular `(log ae_c, theta_c)` diagnostic
//! plot, as polylines; SVG and CSV writers.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::atlas::{CommonCoord, SectorTable};
use crate::config::RunConfig;
use crate::numfmt::num;
use crate::polygon::{dashed_rays, Point};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Polygon,
    Mu,
    Theta,
    Ray,
    Band,
    Interior,
}

impl CurveKind {
    pub fn class(self) -> &'static str {
        match self {
            CurveKind::Polygon => "polygon",
            CurveKind::Mu => "mu",
            CurveKind::Theta => "theta",
            CurveKind::Ray => "ray",
            CurveKind::Band => "band",
            CurveKind::Interior => "interior",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub kind: CurveKind,
    pub label: String,
    /// Coordinate held fixed along the curve (`NaN` if none).
    pub value: f64,
    pub closed: bool,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure {
    pub curves: Vec<Polyline>,
    pub labels: Vec<(Point, String)>,
    /// Flip `y` for display (Cartesian nets).
    pub y_up: bool,
}

/// Refinement stops once the chord-to-midpoint distance is below this
/// fraction of `f_n + f_1`.
pub const SAGITTA_FRACTION: f64 = 2e-3;
const MAX_DEPTH: u32 = 18;

/// Samples `f` on `[a, b]` with mandatory `breaks`, bisecting each piece
/// until the sagitta is below `tol`.
pub fn adaptive(f: &dyn Fn(f64) -> Point, a: f64, b: f64, breaks: &[f64], base: usize, tol: f64) -> Vec<Point> {
    let mut knots: Vec<f64> = (0..=base).map(|i| a + (b - a) * i as f64 / base as f64).collect();
    knots.extend(breaks.iter().filter(|t| **t > a && **t < b));
    knots.sort_by(|x, y| x.total_cmp(y));
    knots.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (b - a).abs());
    let mut out = vec![f(knots[0])];
    for w in knots.windows(2) {
        refine(f, w[0], w[1], out[out.len() - 1], f(w[1]), tol, 0, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn refine(f: &dyn Fn(f64) -> Point, t0: f64, t1: f64, p0: Point, p1: Point, tol: f64, depth: u32, out: &mut Vec<Point>) {
    let tm = 0.5 * (t0 + t1);
    let pm = f(tm);
    if depth < MAX_DEPTH && sagitta(p0, p1, pm) > tol {
        refine(f, t0, tm, p0, pm, tol, depth + 1, out);
        refine(f, tm, t1, pm, p1, tol, depth + 1, out);
    } else {
        out.push(p1);
    }
}

/// Distance from `m` to the chord `a b`.
pub fn sagitta(a: Point, b: Point, m: Point) -> f64 {
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return (m - a).norm();
    }
    ((m - a).x * d.y - (m - a).y * d.x).abs() / len
}

fn band_breaks(table: &SectorTable) -> Vec<f64> {
    table.bands.iter().map(|b| b.lo).chain([TAU]).collect()
}

/// `mu_c`- and `theta_c`-isolines, the polygon and the `2n` dashed rays.
pub fn net_figure(table: &SectorTable, cfg: &RunConfig) -> Result<Figure> {
    let tol = SAGITTA_FRACTION * table.radial_scale;
    let mus = cfg.grid.mu_values();
    let mu_max = mus.iter().cloned().fold(0.0f64, f64::max).max(cfg.grid.mu_range[1]);
    let breaks = band_breaks(table);
    let mut curves = Vec::new();
    let n = table.n();
    let mut poly: Vec<Point> = (0..n).map(|k| table.spec.vertex(k)).collect();
    poly.push(poly[0]);
    curves.push(Polyline { kind: CurveKind::Polygon, label: "polygon".into(), value: f64::NAN, closed: true, points: poly });
    for (i, &mu) in mus.iter().enumerate() {
        let f = |t: f64| table.forward(CommonCoord::new(mu, t));
        curves.push(Polyline {
            kind: CurveKind::Mu,
            label: format!("mu{i}"),
            value: mu,
            closed: true,
            points: adaptive(&f, 0.0, TAU, &breaks, 64, tol),
        });
    }
    for j in 0..cfg.grid.theta_count {
        let th = TAU * j as f64 / cfg.grid.theta_count as f64;
        let f = |m: f64| table.forward(CommonCoord::new(m, th));
        let cross: Vec<f64> =
            table.crossing_ae_c(th).and_then(|ae| table.mu_c_from_ae_c(ae).ok()).into_iter().collect();
        curves.push(Polyline {
            kind: CurveKind::Theta,
            label: format!("theta{j}"),
            value: th,
            closed: false,
            points: adaptive(&f, 0.0, mu_max, &cross, 16, tol),
        });
    }
    let centre = table.spec.centroid();
    let reach = curves
        .iter()
        .flat_map(|c| c.points.iter())
        .map(|p| (p - centre).norm())
        .fold(0.0f64, f64::max);
    for ray in dashed_rays(&table.spec) {
        let len = reach - (ray.origin - centre).norm();
        curves.push(Polyline {
            kind: CurveKind::Ray,
            label: ray.label(n).to_string(),
            value: f64::NAN,
            closed: false,
            points: vec![ray.origin, ray.point(len.max(0.0))],
        });
    }
    if table.spec.is_square() {
        // decorative Cartesian grid over the protected region
        let (v0, v2) = (table.spec.vertex(0), table.spec.vertex(2));
        for i in 1..8 {
            let s = i as f64 / 8.0;
            let x = v0.x + (v2.x - v0.x) * s;
            let y = v0.y + (v2.y - v0.y) * s;
            for (a, b) in [(Point::new(x, v0.y), Point::new(x, v2.y)), (Point::new(v0.x, y), Point::new(v2.x, y))] {
                curves.push(Polyline {
                    kind: CurveKind::Interior,
                    label: "interior".into(),
                    value: f64::NAN,
                    closed: false,
                    points: vec![a, b],
                });
            }
        }
    }
    Ok(Figure { curves, labels: Vec::new(), y_up: true })
}

/// `x = ln ae_c`, `y = theta_c`: `mu_c`-isolines are vertical, angular
/// isolines horizontal; band edges and the ray-crossing curves are drawn
/// with sector labels.
pub fn rect_figure(table: &SectorTable, cfg: &RunConfig) -> Result<Figure> {
    let mus = cfg.grid.mu_values();
    let mu_max = mus.iter().cloned().fold(0.0f64, f64::max).max(cfg.grid.mu_range[1]);
    let x_lo = table.ae_c_from_mu_c(0.0)?.ln();
    let x_hi = table.ae_c_from_mu_c(mu_max)?.ln();
    let mut curves = Vec::new();
    for (i, &mu) in mus.iter().enumerate() {
        let x = table.ae_c_from_mu_c(mu)?.ln();
        curves.push(Polyline {
            kind: CurveKind::Mu,
            label: format!("mu{i}"),
            value: mu,
            closed: false,
            points: vec![Point::new(x, 0.0), Point::new(x, TAU)],
        });
    }
    for j in 0..cfg.grid.theta_count {
        let th = TAU * j as f64 / cfg.grid.theta_count as f64;
        curves.push(Polyline {
            kind: CurveKind::Theta,
            label: format!("theta{j}"),
            value: th,
            closed: false,
            points: vec![Point::new(x_lo, th), Point::new(x_hi, th)],
        });
    }
    for (b, band) in table.bands.iter().enumerate() {
        curves.push(Polyline {
            kind: CurveKind::Band,
            label: format!("band{b}"),
            value: band.lo,
            closed: false,
            points: vec![Point::new(x_lo, band.lo), Point::new(x_hi, band.lo)],
        });
        if band.width() <= 0.0 {
            continue;
        }
        // ray image: crossing ae_c as theta runs through the band
        let mut pts = Vec::new();
        for i in 0..=200 {
            let th = band.lo + band.width() * i as f64 / 200.0;
            match table.crossing_ae_c(th) {
                Some(ae) if ae.ln() <= x_hi => pts.push(Point::new(ae.ln(), th)),
                _ => {
                    if pts.len() > 1 {
                        curves.push(ray_piece(b, std::mem::take(&mut pts)));
                    }
                    pts.clear();
                }
            }
        }
        if pts.len() > 1 {
            curves.push(ray_piece(b, pts));
        }
    }
    let mut labels = Vec::new();
    for s in &table.sectors {
        let th = 0.5 * (s.theta_lo + s.theta_hi);
        let th = th.rem_euclid(TAU);
        let mu = if s.id.is_compressed() { 0.05 } else { 0.5 * mu_max };
        labels.push((Point::new(table.ae_c_from_mu_c(mu)?.ln(), th), s.label.clone()));
    }
    Ok(Figure { curves, labels, y_up: true })
}

fn ray_piece(b: usize, points: Vec<Point>) -> Polyline {
    Polyline { kind: CurveKind::Ray, label: format!("crossing{b}"), value: f64::NAN, closed: false, points }
}

/// `curve,kind,label,value,x,y`, one row per point.
pub fn figure_csv(fig: &Figure) -> String {
    let mut s = String::from("curve,kind,label,value,x,y\n");
    for (i, c) in fig.curves.iter().enumerate() {
        for p in &c.points {
            let _ = writeln!(s, "{i},{},{},{},{},{}", c.kind.class(), c.label, num(c.value), num(p.x), num(p.y));
        }
    }
    s
}

fn coord(x: f64) -> String {
    let v = format!("{x:.5}");
    if v == "-0.00000" {
        "0.00000".into()
    } else {
        v
    }
}

/// SVG 1.1, 800 px wide; one element per curve, rays dashed.
pub fn figure_svg(fig: &Figure) -> String {
    let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in fig.curves.iter().flat_map(|c| c.points.iter()).chain(fig.labels.iter().map(|l| &l.0)) {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let pad = 0.04 * (hi - lo).max();
    let (lo, hi) = (lo - Point::new(pad, pad), hi + Point::new(pad, pad));
    let width = 800.0;
    let scale = width / (hi.x - lo.x);
    let height = (hi.y - lo.y) * scale;
    let map = |p: &Point| {
        let y = if fig.y_up { hi.y - p.y } else { p.y - lo.y };
        (coord((p.x - lo.x) * scale), coord(y * scale))
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        coord(width),
        coord(height),
        coord(width),
        coord(height)
    );
    s.push_str(
        "<style>\n\
         .polygon { fill: #f2f2f2; stroke: black; stroke-width: 1.5; }\n\
         .mu { fill: none; stroke: #1f4e9c; stroke-width: 0.8; }\n\
         .theta { fill: none; stroke: #b2182b; stroke-width: 0.8; }\n\
         .ray { fill: none; stroke: black; stroke-width: 1; stroke-dasharray: 6 4; }\n\
         .band { fill: none; stroke: #555555; stroke-width: 0.6; }\n\
         .interior { fill: none; stroke: #999999; stroke-width: 0.4; }\n\
         text { font-family: sans-serif; font-size: 12px; }\n\
         </style>\n",
    );
    for c in &fig.curves {
        let pts: Vec<String> = c.points.iter().map(|p| { let (x, y) = map(p); format!("{x},{y}") }).collect();
        let tag = if c.closed { "polygon" } else { "polyline" };
        let _ = writeln!(s, r#"<{tag} class="{}" data-label="{}" points="{}"/>"#, c.kind.class(), c.label, pts.join(" "));
    }
    for (p, text) in &fig.labels {
        let (x, y) = map(p);
        let _ = writeln!(s, r#"<text x="{x}" y="{y}">{text}</text>"#);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::sector_partition;
    use crate::config::{PolygonInput, RunConfig};

    fn setup(f: Vec<f64>) -> (SectorTable, RunConfig) {
        let cfg = RunConfig::from_polygon(PolygonInput::Semifocal { f });
        (sector_partition(&cfg.spec().unwrap()).unwrap(), cfg)
    }

    #[test]
    fn ray_count_and_closed_isolines() {
        for (f, rays) in [(vec![1.39, 2.595, 2.44], 6), (vec![1.0; 4], 8)] {
            let (t, cfg) = setup(f);
            let fig = net_figure(&t, &cfg).unwrap();
            let svg = figure_svg(&fig);
            assert_eq!(svg.matches(r#"class="ray""#).count(), rays);
            for c in fig.curves.iter().filter(|c| c.kind == CurveKind::Mu) {
                assert!((c.points[0] - c.points[c.points.len() - 1]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn sagitta_bound_holds() {
        let (t, cfg) = setup(vec![1.39, 2.595, 2.44]);
        let tol = SAGITTA_FRACTION * t.radial_scale;
        let fig = net_figure(&t, &cfg).unwrap();
        let mu = fig.curves.iter().find(|c| c.kind == CurveKind::Mu && c.value > 0.5).unwrap();
        // re-evaluate midpoints through the inverse map
        for w in mu.points.windows(2) {
            let (a, _) = t.inverse(w[0]).unwrap();
            let (b, _) = t.inverse(w[1]).unwrap();
            let mut tb = b.theta_c;
            if tb < a.theta_c {
                tb += TAU;
            }
            let m = t.forward(CommonCoord::new(mu.value, 0.5 * (a.theta_c + tb)));
            assert!(sagitta(w[0], w[1], m) <= tol * 1.01, "{}", sagitta(w[0], w[1], m));
        }
    }

    #[test]
    fn rectplot_has_crossing_curves() {
        let (t, cfg) = setup(vec![1.39, 2.595, 2.44]);
        let fig = rect_figure(&t, &cfg).unwrap();
        assert!(fig.curves.iter().any(|c| c.kind == CurveKind::Ray));
        assert_eq!(fig.labels.len(), 12);
        assert!(figure_csv(&fig).starts_with("curve,kind,label,value,x,y\n"));
    }
}
