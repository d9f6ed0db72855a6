//! Periodic angular eigenproblem
//! `Psi'' - g1'/(2 g1) Psi' + g1 (lambda + k^2 h2) Psi = 0`
//! in self-adjoint form `(g1^{-1/2} Psi')' + g1^{1/2} (lambda + k^2 h2) Psi = 0`.
//!
//! Coefficients per band come from the piece that reaches infinity (the
//! vertex chart in compressed bands, the side chart in true bands).

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::periodic::CyclicPencil;
use super::{asymptotic_sector, gauge_constant};
use crate::atlas::SectorTable;
use crate::metric::stackel_factors;
use crate::numfmt::num;
use crate::{PolyError, Result};

/// Relative drift allowed between the two Richardson estimates.
pub const CONVERGENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularEigenpair {
    pub index: usize,
    /// Richardson-extrapolated eigenvalue.
    pub lambda: f64,
    /// Eigenvalue of the base grid (the one `psi` belongs to).
    pub lambda_grid: f64,
    pub convergence_estimate: f64,
    pub theta: Vec<f64>,
    /// `sum psi^2 w dtheta = 1`, `w = sqrt(g1)`.
    pub psi: Vec<f64>,
}

/// Nodes on `[0, 2pi)`, every band boundary being one. Element `i` joins
/// node `i` and `i + 1` (the last wraps round).
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    pub nodes: Vec<f64>,
}

impl AngularGrid {
    /// `resolution` elements on the full circle (roughly), split among the
    /// intervals between `breaks` in proportion to their widths.
    pub fn new(breaks: &[f64], resolution: usize) -> Self {
        let mut b: Vec<f64> = breaks.iter().map(|x| x.rem_euclid(TAU)).collect();
        b.sort_by(|x, y| x.total_cmp(y));
        b.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        if b.len() > 1 && b[0] + TAU - b[b.len() - 1] < 1e-14 {
            b.pop();
        }
        let mut nodes = Vec::new();
        for (i, &lo) in b.iter().enumerate() {
            let hi = if i + 1 < b.len() { b[i + 1] } else { b[0] + TAU };
            let m = ((resolution as f64 * (hi - lo) / TAU).round() as usize).max(1);
            nodes.extend((0..m).map(|j| lo + (hi - lo) * j as f64 / m as f64));
        }
        AngularGrid { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn element(&self, i: usize) -> (f64, f64) {
        let n = self.len();
        let hi = if i + 1 < n { self.nodes[i + 1] } else { self.nodes[0] + TAU };
        (self.nodes[i], hi)
    }
}

/// Coefficient functions of one element midpoint: `(g1, h2)`.
fn coefficients(table: &SectorTable, theta: f64) -> (f64, f64) {
    let st = stackel_factors(table, asymptotic_sector(table, table.band_at(theta)));
    (st.g1(theta), st.h2(theta))
}

/// Linear elements with lumped mass; coefficients at element midpoints,
/// shifted by `shift` (the grid follows: breaks are `band - shift`).
fn assemble(table: &SectorTable, k: f64, grid: &AngularGrid, shift: f64) -> CyclicPencil {
    let n = grid.len();
    let c = gauge_constant(table);
    let mut p = CyclicPencil { diag: vec![0.0; n], off: vec![0.0; n], mass: vec![0.0; n] };
    for i in 0..n {
        let (lo, hi) = grid.element(i);
        let len = hi - lo;
        let (g1, h2) = coefficients(table, 0.5 * (lo + hi) + shift);
        let (stiff, w) = (1.0 / g1.sqrt(), g1.sqrt());
        let pot = -k * k * (h2 + c) * w * 0.5 * len;
        let j = (i + 1) % n;
        p.diag[i] += stiff / len + pot;
        p.diag[j] += stiff / len + pot;
        p.off[i] -= stiff / len;
        p.mass[i] += 0.5 * w * len;
        p.mass[j] += 0.5 * w * len;
    }
    p
}

fn breaks(table: &SectorTable, shift: f64) -> Vec<f64> {
    table.bands.iter().filter(|b| b.width() > 1e-14).map(|b| b.lo - shift).collect()
}

fn validate(k: f64, count: usize, resolution: usize) -> Result<()> {
    if !k.is_finite() {
        return Err(PolyError::OutOfDomain(format!("wavenumber {k}")));
    }
    if count == 0 || resolution < 8 {
        return Err(PolyError::InvalidGrid(format!("count {count}, resolution {resolution}")));
    }
    Ok(())
}

/// First `count` eigenpairs, `resolution` elements on the base grid.
pub fn angular_spectrum(table: &SectorTable, k: f64, count: usize, resolution: usize) -> Result<Vec<AngularEigenpair>> {
    angular_spectrum_shifted(table, k, count, resolution, 0.0)
}

/// Same with coefficient functions evaluated at `theta_c + shift`.
pub fn angular_spectrum_shifted(
    table: &SectorTable,
    k: f64,
    count: usize,
    resolution: usize,
    shift: f64,
) -> Result<Vec<AngularEigenpair>> {
    validate(k, count, resolution)?;
    let br = breaks(table, shift);
    let grids: Vec<AngularGrid> = [1, 2, 4].iter().map(|m| AngularGrid::new(&br, resolution * m)).collect();
    if grids[0].len() < count.max(3) {
        return Err(PolyError::InvalidGrid(format!("{} nodes for {count} eigenpairs", grids[0].len())));
    }
    let pencils: Vec<CyclicPencil> = grids.iter().map(|g| assemble(table, k, g, shift)).collect();
    let mut base = pencils[0].lowest(count);
    let values: Vec<Vec<f64>> = std::iter::once(base.iter().map(|x| x.0).collect())
        .chain(pencils[1..].iter().map(|p| p.lowest(count).into_iter().map(|x| x.0).collect()))
        .collect();
    let mut out = Vec::with_capacity(count);
    for (i, (_, psi)) in base.drain(..).enumerate() {
        let (l1, l2, l4) = (values[0][i], values[1][i], values[2][i]);
        let r1 = (4.0 * l2 - l1) / 3.0;
        let r2 = (4.0 * l4 - l2) / 3.0;
        let drift = (r2 - r1).abs();
        if !(drift <= CONVERGENCE_TOL * r2.abs().max(1.0)) {
            return Err(PolyError::ConvergenceFailure { index: i, drift });
        }
        out.push(AngularEigenpair {
            index: i,
            lambda: r2,
            lambda_grid: l1,
            convergence_estimate: drift,
            theta: grids[0].nodes.clone(),
            psi,
        });
    }
    // exact pairs may come out of the extrapolation swapped by rounding
    out.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    for (i, p) in out.iter_mut().enumerate() {
        p.index = i;
    }
    Ok(out)
}

/// `n,lambda,convergence_estimate`.
pub fn eigen_csv(pairs: &[AngularEigenpair]) -> String {
    let mut s = String::from("n,lambda,convergence_estimate\n");
    for p in pairs {
        s.push_str(&format!("{},{},{}\n", p.index, num(p.lambda), num(p.convergence_estimate)));
    }
    s
}

/// `theta_c,psi1`.
pub fn eigenfunction_csv(pair: &AngularEigenpair) -> String {
    let mut s = String::from("theta_c,psi1\n");
    for (t, v) in pair.theta.iter().zip(&pair.psi) {
        s.push_str(&format!("{},{}\n", num(*t), num(*v)));
    }
    s
}

/// Weighted inner product of two sampled eigenfunctions on the same grid.
pub fn weighted_dot(table: &SectorTable, theta: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let grid = AngularGrid { nodes: theta.to_vec() };
    let n = grid.len();
    let mut s = 0.0;
    for i in 0..n {
        let (lo, hi) = grid.element(i);
        let (g1, _) = coefficients(table, 0.5 * (lo + hi));
        let j = (i + 1) % n;
        s += 0.5 * g1.sqrt() * (hi - lo) * (a[i] * b[i] + a[j] * b[j]);
    }
    s
}
