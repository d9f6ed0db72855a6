//! Python module `polyelliptic_py`: the atlas, scale factors, angular
//! spectrum and the verification report.

use polyelliptic::atlas::{sector_partition, CommonCoord, SectorTable};
use polyelliptic::config::{PolygonInput, RunConfig, SquareInput};
use polyelliptic::metric::scale_factors;
use polyelliptic::polygon::Point;
use polyelliptic::solver::angular_spectrum;
use polyelliptic::verify::run_verify;
use polyelliptic::PolyError;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: PolyError) -> PyErr {
    match e {
        PolyError::Config(_) | PolyError::DegenerateGeometry(_) | PolyError::Unsupported(_) => {
            PyValueError::new_err(e.to_string())
        }
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Polyelliptic atlas of one polygon; give exactly one of `f`, `sides`, `square`.
#[pyclass(frozen)]
struct Atlas {
    table: SectorTable,
}

#[pymethods]
impl Atlas {
    #[new]
    #[pyo3(signature = (f=None, sides=None, square=None))]
    fn new(f: Option<Vec<f64>>, sides: Option<Vec<f64>>, square: Option<f64>) -> PyResult<Self> {
        let input = match (f, sides, square) {
            (Some(f), None, None) => PolygonInput::Semifocal { f },
            (None, Some(sides), None) => PolygonInput::Sides { sides },
            (None, None, Some(f)) => PolygonInput::Square { square: SquareInput { f } },
            _ => return Err(PyValueError::new_err("give exactly one of f, sides, square")),
        };
        let table = sector_partition(&input.build().map_err(err)?).map_err(err)?;
        Ok(Atlas { table })
    }

    fn vertices(&self) -> Vec<(f64, f64)> {
        (0..self.table.n()).map(|k| self.table.spec.vertex(k)).map(|p| (p.x, p.y)).collect()
    }

    fn sector_labels(&self) -> Vec<String> {
        self.table.sectors.iter().map(|s| s.label.clone()).collect()
    }

    /// `(mu_c, theta_c) -> (x, y)`.
    fn forward(&self, mu_c: f64, theta_c: f64) -> (f64, f64) {
        let p = self.table.forward(CommonCoord::new(mu_c, theta_c));
        (p.x, p.y)
    }

    /// `(x, y) -> (mu_c, theta_c, sector label)`.
    fn inverse(&self, x: f64, y: f64) -> PyResult<(f64, f64, String)> {
        let (c, id) = self.table.inverse(Point::new(x, y)).map_err(err)?;
        Ok((c.mu_c, c.theta_c, self.table.sector(id).label.clone()))
    }

    /// `(H_mu, H_theta)`.
    fn scale_factors(&self, mu_c: f64, theta_c: f64) -> (f64, f64) {
        scale_factors(&self.table, CommonCoord::new(mu_c, theta_c))
    }

    #[pyo3(signature = (k, count=6, resolution=720))]
    fn angular_eigenvalues(&self, k: f64, count: usize, resolution: usize) -> PyResult<Vec<f64>> {
        Ok(angular_spectrum(&self.table, k, count, resolution).map_err(err)?.into_iter().map(|p| p.lambda).collect())
    }
}

/// Verification report (JSON text) for a config given as JSON text.
#[pyfunction]
fn verify(config_json: &str) -> PyResult<String> {
    let cfg = RunConfig::from_json(config_json).map_err(err)?;
    let report = run_verify(&cfg).map_err(err)?;
    Ok(report.to_json().to_string())
}

#[pymodule]
fn polyelliptic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Atlas>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", polyelliptic::verify::VERSION)?;
    Ok(())
}
