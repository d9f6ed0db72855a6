//! Radial equation `Psi'' - g2'/(2 g2) Psi' - g2 (lambda - k^2 h1) Psi = 0`
//! of one sector, integrated as the first-order system
//! `Psi' = s P`, `P' = s (lambda - k^2 h1) Psi`, `s = sqrt(g2)`.
//!
//! `s` stays finite at `mu_c = 0` for every piece, so no series start is
//! needed.

use serde::{Deserialize, Serialize};

use super::gauge_constant;
use crate::atlas::{SectorId, SectorTable};
use crate::numfmt::num;
use crate::{PolyError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialBc {
    /// `Psi(0) = 0`, `P(0) = 1`.
    Dirichlet,
    /// `Psi(0) = 1`, `P(0) = 0`.
    UnitStart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub k: f64,
    pub lambda: f64,
    pub bc: RadialBc,
    pub sector: SectorId,
    pub mu: Vec<f64>,
    pub psi: Vec<f64>,
    /// `d Psi / d mu_c`.
    pub dpsi: Vec<f64>,
}

/// `sqrt(g2)` and `h1` (gauged) of one sector, closed form.
#[derive(Debug, Clone, Copy)]
pub struct RadialCoefficients<'a> {
    table: &'a SectorTable,
    band: usize,
    far: bool,
    probe: f64,
    gap0: f64,
    shift: f64,
}

impl<'a> RadialCoefficients<'a> {
    pub fn new(table: &'a SectorTable, sector: SectorId) -> Self {
        let s = table.sector(sector);
        let probe = 0.5 * (s.theta_lo + s.theta_hi);
        let (band, far) = table.sector_band(sector, probe);
        let gap0 = table.piece(band, far, 0.0, probe).gap;
        RadialCoefficients { table, band, far, probe, gap0, shift: gauge_constant(table) }
    }

    pub fn sqrt_g2(&self, mu: f64) -> f64 {
        let r = self.table.piece(self.band, self.far, mu, self.probe);
        let kk = self.table.radial_scale;
        let (sh, ch) = ((0.5 * mu).sinh(), (0.5 * mu).cosh());
        if self.gap0.abs() < 1e-15 * kk {
            // gap = 2K sh^2 exactly: cancel sh
            2.0 * kk * ch / (2.0 * kk * (r.ae + r.frame.f)).sqrt()
        } else {
            2.0 * kk * sh * ch / (r.gap * (r.ae + r.frame.f)).sqrt()
        }
    }

    pub fn h1(&self, mu: f64) -> f64 {
        let r = self.table.piece(self.band, self.far, mu, self.probe);
        r.ae * r.ae - self.shift
    }

    /// `g2'/(2 g2)`, central difference of `ln s`.
    pub fn log_slope(&self, mu: f64) -> f64 {
        let h = 1e-6 * mu.max(1.0);
        (self.sqrt_g2(mu + h).ln() - self.sqrt_g2(mu - h).ln()) / (2.0 * h)
    }
}

/// Fixed-step RK4 from `mu_c = 0` to `mu_max` in `steps` steps.
pub fn radial_solution(
    table: &SectorTable,
    sector: SectorId,
    k: f64,
    lambda: f64,
    bc: RadialBc,
    mu_max: f64,
    steps: usize,
) -> Result<RadialSolution> {
    if !(mu_max > 0.0 && mu_max.is_finite()) || steps < 2 {
        return Err(PolyError::InvalidGrid(format!("mu_max {mu_max}, steps {steps}")));
    }
    let co = RadialCoefficients::new(table, sector);
    let h = mu_max / steps as f64;
    let rhs = |mu: f64, y: [f64; 2]| {
        let s = co.sqrt_g2(mu);
        [s * y[1], s * (lambda - k * k * co.h1(mu)) * y[0]]
    };
    let mut y = match bc {
        RadialBc::Dirichlet => [0.0, 1.0],
        RadialBc::UnitStart => [1.0, 0.0],
    };
    let mut out = RadialSolution {
        k,
        lambda,
        bc,
        sector,
        mu: Vec::with_capacity(steps + 1),
        psi: Vec::with_capacity(steps + 1),
        dpsi: Vec::with_capacity(steps + 1),
    };
    for i in 0..=steps {
        let mu = h * i as f64;
        out.mu.push(mu);
        out.psi.push(y[0]);
        out.dpsi.push(co.sqrt_g2(mu) * y[1]);
        if i == steps {
            break;
        }
        let k1 = rhs(mu, y);
        let k2 = rhs(mu + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs(mu + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs(mu + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for j in 0..2 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    Ok(out)
}

/// Max pointwise defect of the second-order equation under central
/// differences on the solution's own grid (interior nodes).
pub fn radial_defect(table: &SectorTable, sol: &RadialSolution) -> f64 {
    let co = RadialCoefficients::new(table, sol.sector);
    let (mu, y) = (&sol.mu, &sol.psi);
    let h = mu[1] - mu[0];
    let mut worst = 0.0f64;
    for i in 1..mu.len() - 1 {
        let d2 = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
        let d1 = (y[i + 1] - y[i - 1]) / (2.0 * h);
        let s = co.sqrt_g2(mu[i]);
        let r = d2 - co.log_slope(mu[i]) * d1 - s * s * (sol.lambda - sol.k * sol.k * co.h1(mu[i])) * y[i];
        worst = worst.max(r.abs());
    }
    worst
}

/// `mu_c,psi2,dpsi2`.
pub fn radial_csv(sol: &RadialSolution) -> String {
    let mut s = String::from("mu_c,psi2,dpsi2\n");
    for i in 0..sol.mu.len() {
        s.push_str(&format!("{},{},{}\n", num(sol.mu[i]), num(sol.psi[i]), num(sol.dpsi[i])));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::sector_partition;
    use crate::polygon::build_polygon;

    fn table(f: &[f64]) -> SectorTable {
        sector_partition(&build_polygon(f).unwrap()).unwrap()
    }

    #[test]
    fn constant_solution_at_zero_wavenumber() {
        let t = table(&[1.39, 2.595, 2.44]);
        for id in [SectorId::Edge(0), SectorId::Wedge(1), SectorId::Front(2)] {
            let s = radial_solution(&t, id, 0.0, 0.0, RadialBc::UnitStart, 3.0, 300).unwrap();
            assert!(s.psi.iter().all(|v| *v == 1.0));
            assert!(s.dpsi.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn edge_coefficient_finite_at_perimeter() {
        let t = table(&[1.39, 2.595, 2.44]);
        let co = RadialCoefficients::new(&t, SectorId::Edge(1));
        let (a, b) = (co.sqrt_g2(0.0), co.sqrt_g2(1e-6));
        assert!(a.is_finite() && a > 0.0 && (a - b).abs() < 1e-9);
        let w = RadialCoefficients::new(&t, SectorId::Wedge(0));
        assert_eq!(w.sqrt_g2(0.0), 0.0);
    }

    #[test]
    fn invalid_grid() {
        let t = table(&[1.0; 4]);
        assert!(radial_solution(&t, SectorId::Wedge(0), 1.0, 0.0, RadialBc::Dirichlet, 0.0, 10).is_err());
        assert!(radial_solution(&t, SectorId::Wedge(0), 1.0, 0.0, RadialBc::Dirichlet, 1.0, 1).is_err());
    }
}
