//! Separated angular and radial equations, the Mathieu oracle and the
//! recomposition check.
//!
//! Gauge: `h2 + C` and `h1 - C` with `C = f_w^2 / 2`, `f_w` the semifocal
//! distance of the first vertex chart. In the elliptic limit this makes the
//! separation constant equal to Mathieu's `a`.

pub mod angular;
pub mod mathieu;
pub mod periodic;
pub mod radial;
pub mod residual;

pub use angular::{angular_spectrum, angular_spectrum_shifted, AngularEigenpair};
pub use mathieu::{mathieu_characteristic, Parity};
pub use radial::{radial_solution, RadialBc, RadialSolution};
pub use residual::{helmholtz_residual, ResidualSamples};

use crate::atlas::{BandKind, SectorId, SectorTable};

/// The piece of band `b` that reaches infinity.
pub fn asymptotic_sector(table: &SectorTable, b: usize) -> SectorId {
    match table.bands[b].kind {
        BandKind::True(k) => SectorId::Edge(k),
        BandKind::After(k) | BandKind::Before(k) => SectorId::Wedge(k),
    }
}

/// Constant moved between `h1` and `h2`.
pub fn gauge_constant(table: &SectorTable) -> f64 {
    let f = table.wedge_frames[0].f;
    0.5 * f * f
}
