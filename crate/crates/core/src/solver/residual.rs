//! Recomposition check: `Psi1(theta_c) Psi2(mu_c)` under the curvilinear
//! Helmholtz operator, by finite differences on the two solver grids.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::angular::AngularEigenpair;
use super::radial::RadialSolution;
use crate::atlas::{BandKind, CommonCoord, SectorId, SectorTable};
use crate::metric::scale_factors;
use crate::{PolyError, Result};

/// Grid nodes inside `sector` with `mu_lo <= mu_c <= mu_hi`; a node counts
/// only if its whole stencil lies in the same piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSamples {
    pub sector: SectorId,
    pub mu_lo: f64,
    pub mu_hi: f64,
}

impl ResidualSamples {
    /// The widest true-hyperbola band, or the first vertex chart's far piece
    /// when there is none (the square).
    pub fn default_for(table: &SectorTable) -> Self {
        let sector = table
            .bands
            .iter()
            .filter_map(|b| match b.kind {
                BandKind::True(k) if b.width() > 0.2 => Some((b.width(), k)),
                _ => None,
            })
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, k)| SectorId::Edge(k))
            .unwrap_or(SectorId::Wedge(0));
        ResidualSamples { sector, mu_lo: 0.25, mu_hi: 2.0 }
    }
}

/// Max of `|Lap Psi + k^2 Psi| / (k^2 max|Psi|)` (`k = 0`: divided by
/// `max|Psi|` only) and the number of nodes used.
pub fn helmholtz_residual(
    table: &SectorTable,
    k: f64,
    pair: &AngularEigenpair,
    radial: &RadialSolution,
    samples: &ResidualSamples,
) -> Result<(f64, usize)> {
    if radial.sector != samples.sector {
        return Err(PolyError::OutOfDomain(format!(
            "radial solution belongs to {:?}, samples to {:?}",
            radial.sector, samples.sector
        )));
    }
    let (th, p1) = (&pair.theta, &pair.psi);
    let (mu, p2) = (&radial.mu, &radial.psi);
    let nt = th.len();
    let theta_at = |i: isize| {
        let n = nt as isize;
        let wraps = i.div_euclid(n) as f64;
        th[i.rem_euclid(n) as usize] + TAU * wraps
    };
    let inside = |m: f64, t: f64| table.resolve(CommonCoord::new(m, t)).sector == samples.sector;
    let ratio = |m: f64, t: f64| {
        let (hm, ht) = scale_factors(table, CommonCoord::new(m, t));
        (hm / ht, hm * ht)
    };
    let mut rows: Vec<f64> = Vec::new();
    let mut scale = 0.0f64;
    for i in 0..nt as isize {
        let (tm, t0, tp) = (theta_at(i - 1), theta_at(i), theta_at(i + 1));
        let ht = t0 - tm;
        // uniform spacing: the node is not a band boundary
        if ((tp - t0) - ht).abs() > 1e-9 * ht {
            continue;
        }
        let (am, a0, ap) = (p1[(i - 1).rem_euclid(nt as isize) as usize], p1[i as usize], p1[((i + 1) % nt as isize) as usize]);
        for j in 1..mu.len() - 1 {
            let m0 = mu[j];
            if m0 < samples.mu_lo || m0 > samples.mu_hi {
                continue;
            }
            let (mm, mp) = (mu[j - 1], mu[j + 1]);
            if ![(m0, tm), (m0, tp), (mm, t0), (mp, t0), (m0, t0)].iter().all(|&(m, t)| inside(m, t)) {
                continue;
            }
            let hmu = m0 - mm;
            let (rt_p, _) = ratio(m0, 0.5 * (t0 + tp));
            let (rt_m, _) = ratio(m0, 0.5 * (t0 + tm));
            let (rm_p, _) = ratio(0.5 * (m0 + mp), t0);
            let (rm_m, _) = ratio(0.5 * (m0 + mm), t0);
            let (_, vol) = ratio(m0, t0);
            let th_term = p2[j] * (rt_p * (ap - a0) - rt_m * (a0 - am)) / (ht * ht);
            let mu_term = a0 * ((p2[j + 1] - p2[j]) / rm_p - (p2[j] - p2[j - 1]) / rm_m) / (hmu * hmu);
            let psi = a0 * p2[j];
            scale = scale.max(psi.abs());
            rows.push(((th_term + mu_term) / vol + k * k * psi).abs());
        }
    }
    if rows.is_empty() {
        return Err(PolyError::InvalidGrid("no sample node lies inside the sector".into()));
    }
    let norm = if k == 0.0 { 1.0 } else { k * k } * scale;
    let worst = rows.iter().fold(0.0f64, |a, r| a.max(*r));
    Ok((if norm > 0.0 { worst / norm } else { worst }, rows.len()))
}
