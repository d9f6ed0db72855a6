//! The common polyelliptic coordinate system `(mu_c, theta_c)`.
//!
//! Two kinds of local chart are glued together outside the polygon:
//!
//! * the chart of side `k` (foci at vertices `k`, `k+1`, right polarity)
//!   covers the region in front of that side;
//! * the chart of vertex `k` (foci at the two neighbouring vertices,
//!   left polarity) covers the wedge between the two dashed rays leaving
//!   vertex `k`. For a triangle this is the opposite side's chart.
//!
//! The angular range is split into `3n` bands. A *true* band is a range of
//! side-chart hyperbolas that never meet a dashed ray. A *compressed* band
//! collects lines made of two hyperbola pieces joined on a dashed ray: the
//! part near the polygon lies in a side chart, the part far from it in a
//! vertex chart. Which piece applies depends on `mu_c` as well, so the
//! sectors of the atlas are 2D pieces of the `(mu_c, theta_c)` strip,
//! separated by band boundaries (`theta_c = const`) and by the curved
//! images of the dashed rays.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chart::{cartesian_to_local, LocalFrame, Polarity};
use crate::error::{PolyError, Result};
use crate::polygon::{dashed_rays, triangle_angle, DashedRay, Point, PolygonSpec, RayLabel};

const TWO_PI: f64 = 2.0 * PI;

/// Common coordinate pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommonCoord {
    pub mu_c: f64,
    pub theta_c: f64,
}

impl CommonCoord {
    pub fn new(mu_c: f64, theta_c: f64) -> Self {
        CommonCoord { mu_c, theta_c }
    }
}

/// Identifies one of the 2D pieces of the atlas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SectorId {
    /// Far pieces of the two compressed bands around vertex `k`.
    Wedge(usize),
    /// True-hyperbola band of side `k`.
    Edge(usize),
    /// Near piece (in side `k`) of the band following vertex `k`.
    Front(usize),
    /// Near piece (in side `k - 1`) of the band preceding vertex `k`.
    Back(usize),
}

impl SectorId {
    pub fn is_compressed(self) -> bool {
        matches!(self, SectorId::Front(_) | SectorId::Back(_))
    }
}

/// Angular band kinds; the index is a vertex for compressed bands and a
/// side for true bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandKind {
    After(usize),
    True(usize),
    Before(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub kind: BandKind,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// One sector of the atlas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub id: SectorId,
    pub label: String,
    /// Angular extent; for the vertex-1 wedge `theta_lo` is negative (the
    /// interval wraps through `theta_c = 0`).
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub frame: LocalFrame,
    /// Local ellipse semi-axis minus the common one, `ae = ae_c + offset`.
    pub chain_offset: f64,
}

/// Chart data resolved for one `(mu_c, theta_c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub sector: SectorId,
    pub frame: LocalFrame,
    /// Local ellipse semi-axis and its excess over the semifocal distance.
    pub ae: f64,
    pub gap: f64,
    /// Hyperbola angle in `[0, pi]` measured from the positive focus axis.
    pub theta_abs: f64,
    /// `d theta_abs / d theta_c`.
    pub dtheta: f64,
}

impl Resolved {
    pub fn point(&self) -> Point {
        self.frame.point_on(self.ae, self.gap, self.theta_abs)
    }
}

/// The atlas of a polygon: frames, angular bands and sectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorTable {
    pub spec: PolygonSpec,
    /// Radial scale: `ae_c = radial_scale * cosh(mu_c)`.
    pub radial_scale: f64,
    pub edge_frames: Vec<LocalFrame>,
    pub wedge_frames: Vec<LocalFrame>,
    /// Angle of the vertex hyperbola of each vertex chart.
    pub theta_v: Vec<f64>,
    alpha_p: Vec<f64>,
    alpha_q: Vec<f64>,
    wedge_min_ae: Vec<f64>,
    pub bands: Vec<Band>,
    pub sectors: Vec<Sector>,
}

impl SectorTable {
    pub fn n(&self) -> usize {
        self.spec.n()
    }

    /// Vertex-1 hyperbola angle `arccos((f_n - f_1) / f_w)`.
    pub fn theta_v1(&self) -> f64 {
        self.theta_v[0]
    }

    /// Width of the first band.
    pub fn phi1(&self) -> f64 {
        self.bands[0].width()
    }

    pub fn sector(&self, id: SectorId) -> &Sector {
        self.sectors.iter().find(|s| s.id == id).expect("sector id belongs to this table")
    }

    pub fn band_index(&self, kind: BandKind) -> usize {
        self.bands.iter().position(|b| b.kind == kind).expect("band exists")
    }

    fn f(&self, k: isize) -> f64 {
        self.spec.semifocal(k)
    }

    fn gamma(&self, k: isize) -> f64 {
        self.spec.angle(k)
    }

    fn edge_min_ae(&self, k: usize) -> f64 {
        self.spec.f[k]
    }

    /// Radial part `(ae, ae - f)` of a chart with minimum semi-axis `min_ae`.
    fn radial(&self, frame: &LocalFrame, min_ae: f64, mu_c: f64) -> (f64, f64) {
        let sh = (0.5 * mu_c).sinh();
        let rise = 2.0 * self.radial_scale * sh * sh;
        (min_ae + rise, (min_ae - frame.f) + rise)
    }

    /// Band containing `theta_c` (taken modulo `2 pi`); a value equal to a
    /// shared boundary belongs to the upper band.
    pub fn band_at(&self, theta_c: f64) -> usize {
        let t = theta_c.rem_euclid(TWO_PI);
        self.bands
            .iter()
            .position(|b| b.hi > b.lo && t >= b.lo && t < b.hi)
            .unwrap_or(self.bands.len() - 1)
    }

    /// Resolves `(mu_c, theta_c)` to the sector and chart quantities.
    pub fn resolve(&self, c: CommonCoord) -> Resolved {
        let b = self.band_at(c.theta_c);
        self.resolve_in_band(b, c.mu_c, c.theta_c.rem_euclid(TWO_PI))
    }

    /// Evaluates the formulas of band `b` at `theta_c`, which may lie
    /// slightly outside the band (used for one-sided limits).
    pub fn resolve_in_band(&self, b: usize, mu_c: f64, theta_c: f64) -> Resolved {
        let far = match self.crossing_gap(b, theta_c) {
            None => false,
            Some(g) => self.radial_scale_rise(mu_c) > g,
        };
        self.piece(b, far, mu_c, theta_c)
    }

    fn radial_scale_rise(&self, mu_c: f64) -> f64 {
        let sh = (0.5 * mu_c).sinh();
        2.0 * self.radial_scale * sh * sh
    }

    /// Side-chart angle of a compressed band line and the matching
    /// vertex-chart angle.
    fn band_angles(&self, b: usize, theta_c: f64) -> (f64, f64) {
        let band = self.bands[b];
        let s = theta_c - band.lo;
        match band.kind {
            BandKind::True(k) => (self.spec.gamma[k] + s, f64::NAN),
            BandKind::After(k) => {
                let (w, e) = (self.wedge_frames[k], self.edge_frames[k]);
                let tv = self.theta_v[k];
                let tbar = tv - s;
                // half-angle form of f_w cos(tbar) + f_e cos(te) = f_{k-1}
                let s2 = (w.f * (0.5 * (tbar + tv)).sin() * (0.5 * (tv - tbar)).sin() / e.f).clamp(0.0, 1.0);
                (2.0 * s2.sqrt().asin(), tbar)
            }
            BandKind::Before(k) => {
                let w = self.wedge_frames[k];
                let e = self.edge_frames[(k + self.n() - 1) % self.n()];
                let tv = self.theta_v[k];
                let tbar = (PI - self.alpha_p[k]) - s;
                let c2 = (w.f * (0.5 * (tbar + tv)).sin() * (0.5 * (tbar - tv)).sin() / e.f).clamp(0.0, 1.0);
                (PI - 2.0 * c2.sqrt().asin(), tbar)
            }
        }
    }

    /// Side-chart `ae - f` at which the line `theta_c` of band `b` meets
    /// its dashed ray; `None` if it never does.
    fn crossing_gap(&self, b: usize, theta_c: f64) -> Option<f64> {
        let (k_edge, k) = match self.bands[b].kind {
            BandKind::True(_) => return None,
            BandKind::After(k) => (k, k),
            BandKind::Before(k) => ((k + self.n() - 1) % self.n(), k),
        };
        let (te, _) = self.band_angles(b, theta_c);
        // the ray through the shared vertex makes angle gamma_k with the axis
        let c = if k_edge == k { te.cos() } else { -te.cos() };
        let cg = self.spec.gamma[k].cos();
        if c <= cg {
            return None;
        }
        let h = if k_edge == k { (0.5 * te).sin() } else { (0.5 * te).cos() };
        Some(self.edge_frames[k_edge].f * 2.0 * h * h * (1.0 + cg) / (c - cg))
    }

    /// Evaluates one piece of band `b`: the far (vertex-chart) piece if
    /// `far`, else the side-chart piece. Ignores where the ray crossing is.
    pub fn piece(&self, b: usize, far: bool, mu_c: f64, theta_c: f64) -> Resolved {
        let kind = self.bands[b].kind;
        let (te, tbar) = self.band_angles(b, theta_c);
        let (sector, frame, min_ae, theta_abs, dtheta) = match (kind, far) {
            (BandKind::True(k), _) => (SectorId::Edge(k), self.edge_frames[k], self.edge_min_ae(k), te, 1.0),
            (BandKind::After(k) | BandKind::Before(k), true) => {
                (SectorId::Wedge(k), self.wedge_frames[k], self.wedge_min_ae[k], tbar, -1.0)
            }
            (BandKind::After(k), false) | (BandKind::Before(k), false) => {
                let (id, ke) = match kind {
                    BandKind::After(_) => (SectorId::Front(k), k),
                    _ => (SectorId::Back(k), (k + self.n() - 1) % self.n()),
                };
                let e = self.edge_frames[ke];
                let d = self.wedge_frames[k].f * tbar.sin() / (e.f * te.sin());
                (id, e, self.edge_min_ae(ke), te, d)
            }
        };
        let (ae, gap) = self.radial(&frame, min_ae, mu_c);
        Resolved { sector, frame, ae, gap, theta_abs, dtheta }
    }

    /// Band and piece holding a sector at `theta_c`.
    pub fn sector_band(&self, id: SectorId, theta_c: f64) -> (usize, bool) {
        match id {
            SectorId::Edge(k) => (self.band_index(BandKind::True(k)), false),
            SectorId::Front(k) => (self.band_index(BandKind::After(k)), false),
            SectorId::Back(k) => (self.band_index(BandKind::Before(k)), false),
            SectorId::Wedge(k) => {
                let after = self.band_index(BandKind::After(k));
                let t = theta_c.rem_euclid(TWO_PI);
                let b = &self.bands[after];
                if t >= b.lo && t <= b.hi {
                    (after, true)
                } else {
                    (self.band_index(BandKind::Before(k)), true)
                }
            }
        }
    }

    /// Forward map `(mu_c, theta_c) -> (x, y)`.
    pub fn forward(&self, c: CommonCoord) -> Point {
        self.resolve(c).point()
    }

    pub fn sector_at(&self, c: CommonCoord) -> SectorId {
        self.resolve(c).sector
    }

    /// Analytic Jacobian columns `(d/d mu_c, d/d theta_c)` of the forward
    /// map, valid away from sector boundaries and for `mu_c > 0`.
    pub fn derivatives(&self, c: CommonCoord) -> (Point, Point) {
        let r = self.resolve(c);
        let (d_ae, d_th) = r.frame.point_derivs(r.ae, r.gap, r.theta_abs);
        (d_ae * (self.radial_scale * c.mu_c.sinh()), d_th * r.dtheta)
    }

    /// Inverse map for points strictly outside the polygon.
    pub fn inverse(&self, p: Point) -> Result<(CommonCoord, SectorId)> {
        let (c, id) = self.inverse_closed_form(p)?;
        self.polish(p, c).map(|c| (c, id))
    }

    fn inverse_closed_form(&self, p: Point) -> Result<(CommonCoord, SectorId)> {
        let n = self.n();
        let tol = 1e-13 * self.spec.scale();
        let dist: Vec<f64> = (0..n).map(|k| self.spec.side_distance(k, p)).collect();
        let outside: Vec<usize> = (0..n).filter(|&k| dist[k] < -tol).collect();
        let (theta_c, mu_c, id) = match outside.as_slice() {
            [] => return Err(PolyError::ProtectedRegion),
            [k] => self.invert_edge(*k, p)?,
            [a, b] => {
                let v = if (a + 1) % n == *b { *b } else { *a };
                self.invert_wedge(v, p)?
            }
            _ => return Err(PolyError::NoConvergence(f64::NAN)),
        };
        Ok((CommonCoord::new(mu_c, theta_c.rem_euclid(TWO_PI)), id))
    }

    fn mu_from_rise(&self, rise: f64) -> f64 {
        2.0 * (rise.max(0.0) / (2.0 * self.radial_scale)).sqrt().asinh()
    }

    fn invert_edge(&self, k: usize, p: Point) -> Result<(f64, f64, SectorId)> {
        let e = self.edge_frames[k];
        let lc = cartesian_to_local(&e, p)?;
        let sh = (0.5 * lc.mu).sinh();
        let mu_c = self.mu_from_rise(2.0 * e.f * sh * sh);
        let te = lc.theta;
        let g = self.spec.gamma[k];
        let g_next = self.gamma(k as isize + 1);
        if te < g {
            let w = self.wedge_frames[k];
            let half = (0.5 * te).sin();
            let tbar = (self.theta_v[k].cos() + 2.0 * e.f * half * half / w.f).clamp(-1.0, 1.0).acos();
            let lo = self.bands[self.band_index(BandKind::After(k))].lo;
            Ok((lo + self.theta_v[k] - tbar, mu_c, SectorId::Front(k)))
        } else if te > PI - g_next {
            let kn = (k + 1) % self.n();
            let w = self.wedge_frames[kn];
            let half = (0.5 * te).cos();
            let tbar = (self.theta_v[kn].cos() - 2.0 * e.f * half * half / w.f).clamp(-1.0, 1.0).acos();
            let lo = self.bands[self.band_index(BandKind::Before(kn))].lo;
            Ok((lo + (PI - self.alpha_p[kn]) - tbar, mu_c, SectorId::Back(kn)))
        } else {
            let lo = self.bands[self.band_index(BandKind::True(k))].lo;
            Ok((lo + te - g, mu_c, SectorId::Edge(k)))
        }
    }

    fn invert_wedge(&self, k: usize, p: Point) -> Result<(f64, f64, SectorId)> {
        let w = self.wedge_frames[k];
        let lc = cartesian_to_local(&w, p)?;
        let sh = (0.5 * lc.mu).sinh();
        let rise = 2.0 * w.f * sh * sh - (self.wedge_min_ae[k] - w.f);
        let mu_c = self.mu_from_rise(rise);
        let tbar = if lc.theta == 0.0 { 0.0 } else { TWO_PI - lc.theta };
        let tv = self.theta_v[k];
        let theta_c = if tbar <= tv {
            self.bands[self.band_index(BandKind::After(k))].lo + tv - tbar
        } else {
            self.bands[self.band_index(BandKind::Before(k))].lo + (PI - self.alpha_p[k]) - tbar
        };
        Ok((theta_c, mu_c, SectorId::Wedge(k)))
    }

    /// Newton refinement of a closed-form inverse; normally a no-op.
    fn polish(&self, p: Point, mut c: CommonCoord) -> Result<CommonCoord> {
        let scale = self.radial_scale;
        let mut r = self.forward(c) - p;
        let mut it = 0;
        while r.norm() > 1e-12 * scale && it < 50 && c.mu_c > 0.0 {
            let (dm, dt) = self.derivatives(c);
            let det = dm.x * dt.y - dm.y * dt.x;
            if !det.is_finite() || det == 0.0 {
                break;
            }
            let step_m = (r.x * dt.y - r.y * dt.x) / det;
            let step_t = (dm.x * r.y - dm.y * r.x) / det;
            let mut lambda = 1.0;
            let mut improved = false;
            while lambda > 1e-4 {
                let trial = CommonCoord::new(
                    (c.mu_c - lambda * step_m).max(0.0),
                    (c.theta_c - lambda * step_t).rem_euclid(TWO_PI),
                );
                let rt = self.forward(trial) - p;
                if rt.norm() < r.norm() {
                    c = trial;
                    r = rt;
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
            it += 1;
        }
        if r.norm() > 1e-9 * scale {
            return Err(PolyError::NoConvergence(r.norm()));
        }
        Ok(c)
    }

    /// Local ellipse semi-axis of a sector's chart for a given `ae_c`.
    pub fn local_ae_from_common(&self, sector: SectorId, ae_c: f64) -> Result<f64> {
        let min = self.radial_scale;
        if ae_c < min * (1.0 - 1e-15) {
            return Err(PolyError::OutOfDomain(format!(
                "ae_c = {ae_c} below the perimeter value {min}"
            )));
        }
        Ok(ae_c + self.sector(sector).chain_offset)
    }

    pub fn mu_c_from_ae_c(&self, ae_c: f64) -> Result<f64> {
        mu_c_from_ae_c(&self.spec, ae_c)
    }

    pub fn ae_c_from_mu_c(&self, mu_c: f64) -> Result<f64> {
        ae_c_from_mu_c(&self.spec, mu_c)
    }

    /// Crossing of a compressed band's line with its dashed ray, as `ae_c`.
    /// Returns `None` for true bands or when the line never meets the ray.
    pub fn crossing_ae_c(&self, theta_c: f64) -> Option<f64> {
        let t = theta_c.rem_euclid(TWO_PI);
        self.crossing_gap(self.band_at(t), t).map(|g| self.radial_scale + g)
    }

    /// Dashed ray separating the near and far pieces of a compressed band.
    pub fn band_ray(&self, b: usize) -> Option<DashedRay> {
        let n = self.n();
        let rays = dashed_rays(&self.spec);
        match self.bands[b].kind {
            BandKind::True(_) => None,
            BandKind::After(k) => rays.into_iter().find(|r| r.vertex == k && r.side == (k + n - 1) % n),
            BandKind::Before(k) => rays.into_iter().find(|r| r.vertex == k && r.side == k),
        }
    }

    /// Angle transfer across a dashed ray: given the side-chart angle on
    /// the ray, returns the vertex-chart angle of the same point.
    pub fn angle_transfer(&self, ray: RayLabel, theta_local: f64) -> Result<f64> {
        let n = self.n();
        let k = ray.vertex;
        let w = self.wedge_frames[k];
        let tol = 1e-12;
        if ray.side == (k + n - 1) % n {
            // ray extends the side arriving at vertex k; side chart k
            let e = self.edge_frames[k];
            let g = self.spec.gamma[k];
            if !(-tol..=g + tol).contains(&theta_local) {
                return Err(PolyError::OutOfRange(format!(
                    "angle {theta_local} outside [0, {g}] for ray {ray}"
                )));
            }
            let arg = (self.f(k as isize - 1) - e.f * theta_local.cos()) / w.f;
            checked_acos(arg, ray)
        } else {
            let e = self.edge_frames[(k + n - 1) % n];
            let g = self.spec.gamma[k];
            if !(PI - g - tol..=PI + tol).contains(&theta_local) {
                return Err(PolyError::OutOfRange(format!(
                    "angle {theta_local} outside [{}, pi] for ray {ray}",
                    PI - g
                )));
            }
            let arg = (-self.f(k as isize) - e.f * theta_local.cos()) / w.f;
            checked_acos(arg, ray)
        }
    }
}

fn checked_acos(arg: f64, ray: RayLabel) -> Result<f64> {
    if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&arg) {
        return Err(PolyError::OutOfRange(format!("arccos argument {arg} on ray {ray}")));
    }
    Ok(arg.clamp(-1.0, 1.0).acos())
}

impl fmt::Display for SectorTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sectors {
            writeln!(f, "{:8} [{:.6}, {:.6})", s.label, s.theta_lo, s.theta_hi)?;
        }
        Ok(())
    }
}

fn sector_label(n: usize, id: SectorId) -> String {
    let wedge = |k: usize| {
        if n == 3 {
            format!("Abar{}", (k + 1) % 3 + 1)
        } else {
            format!("W{}", k + 1)
        }
    };
    match id {
        SectorId::Wedge(k) => wedge(k),
        SectorId::Edge(k) if n == 3 => format!("A{}", k + 1),
        SectorId::Edge(k) => format!("E{}", k + 1),
        SectorId::Front(k) => format!("{}F", wedge(k)),
        SectorId::Back(k) => format!("{}B", wedge(k)),
    }
}

/// Builds the band layout and sector table of a triangle or square.
pub fn sector_partition(spec: &PolygonSpec) -> Result<SectorTable> {
    let n = spec.n();
    let square = n == 4 && spec.f.iter().all(|&v| v == spec.f[0]);
    if n != 3 && !square {
        return Err(PolyError::Unsupported(format!("no polyelliptic atlas for this {n}-gon")));
    }
    let f = |k: isize| spec.semifocal(k);
    let radial_scale = f(-1) + f(0);
    let edge_frames: Vec<LocalFrame> = (0..n)
        .map(|k| LocalFrame::from_foci(k, (k + 1) % n, spec.vertex(k), spec.vertex(k + 1), Polarity::Right))
        .collect();
    let mut wedge_frames = Vec::with_capacity(n);
    let (mut theta_v, mut alpha_p, mut alpha_q, mut wedge_min_ae) = (vec![], vec![], vec![], vec![]);
    for k in 0..n {
        let (kp, km) = ((k + 1) % n, (k + n - 1) % n);
        let w = LocalFrame::from_foci(kp, km, spec.vertex(kp), spec.vertex(km), Polarity::Left);
        let (a, b) = (f(k as isize - 1), f(k as isize));
        if n == 3 {
            alpha_q.push(spec.gamma[km]);
            alpha_p.push(spec.gamma[kp]);
        } else {
            alpha_q.push(triangle_angle(2.0 * b, 2.0 * a, 2.0 * w.f));
            alpha_p.push(triangle_angle(2.0 * a, 2.0 * b, 2.0 * w.f));
        }
        theta_v.push(((a - b) / w.f).clamp(-1.0, 1.0).acos());
        wedge_min_ae.push(a + b);
        wedge_frames.push(w);
    }

    let mut bands = Vec::with_capacity(3 * n);
    let mut lo = 0.0;
    let mut push = |kind: BandKind, width: f64, bands: &mut Vec<Band>| {
        let width = width.max(0.0);
        bands.push(Band { lo, hi: lo + width, kind });
        lo += width;
    };
    for k in 0..n {
        let kn = (k + 1) % n;
        push(BandKind::After(k), theta_v[k] - alpha_q[k], &mut bands);
        push(BandKind::True(k), PI - spec.gamma[k] - spec.gamma[kn], &mut bands);
        push(BandKind::Before(kn), PI - alpha_p[kn] - theta_v[kn], &mut bands);
    }

    let band_of = |kind: BandKind| *bands.iter().find(|b| b.kind == kind).expect("band");
    let mut sectors = Vec::with_capacity(4 * n);
    for k in 0..n {
        let before = band_of(BandKind::Before(k));
        let after = band_of(BandKind::After(k));
        let wrap = if k == 0 { TWO_PI } else { 0.0 };
        let mut add = |id: SectorId, lo: f64, hi: f64, frame: LocalFrame, min_ae: f64| {
            sectors.push(Sector {
                id,
                label: sector_label(n, id),
                theta_lo: lo,
                theta_hi: hi,
                frame,
                chain_offset: min_ae - radial_scale,
            })
        };
        add(SectorId::Wedge(k), before.lo - wrap, after.hi, wedge_frames[k], wedge_min_ae[k]);
        add(SectorId::Front(k), after.lo, after.hi, edge_frames[k], spec.f[k]);
        let t = band_of(BandKind::True(k));
        add(SectorId::Edge(k), t.lo, t.hi, edge_frames[k], spec.f[k]);
        let kn = (k + 1) % n;
        let b = band_of(BandKind::Before(kn));
        add(SectorId::Back(kn), b.lo, b.hi, edge_frames[k], spec.f[k]);
    }

    Ok(SectorTable {
        spec: spec.clone(),
        radial_scale,
        edge_frames,
        wedge_frames,
        theta_v,
        alpha_p,
        alpha_q,
        wedge_min_ae,
        bands,
        sectors,
    })
}

/// `mu_c = arccosh(ae_c / (f_n + f_1))`.
pub fn mu_c_from_ae_c(spec: &PolygonSpec, ae_c: f64) -> Result<f64> {
    let k = spec.semifocal(-1) + spec.semifocal(0);
    if !(ae_c >= k * (1.0 - 1e-15)) {
        return Err(PolyError::OutOfDomain(format!("ae_c = {ae_c} below {k}")));
    }
    let r = (ae_c / k).max(1.0);
    Ok(((r - 1.0) * (r + 1.0)).sqrt().ln_1p_plus(r - 1.0))
}

trait Ln1pPlus {
    fn ln_1p_plus(self, a: f64) -> f64;
}

impl Ln1pPlus for f64 {
    /// `ln(1 + a + self)`, accurate for small arguments.
    fn ln_1p_plus(self, a: f64) -> f64 {
        (a + self).ln_1p()
    }
}

pub fn ae_c_from_mu_c(spec: &PolygonSpec, mu_c: f64) -> Result<f64> {
    if !(mu_c >= 0.0) {
        return Err(PolyError::OutOfDomain(format!("mu_c = {mu_c} is negative")));
    }
    Ok((spec.semifocal(-1) + spec.semifocal(0)) * mu_c.cosh())
}

/// Admissible `ah / f` interval of the true hyperbolas of each side chart.
pub fn hyperbola_ranges(spec: &PolygonSpec) -> Vec<(f64, f64)> {
    (0..spec.n())
        .map(|k| (-spec.angle(k as isize + 1).cos(), spec.gamma[k].cos()))
        .collect()
}
