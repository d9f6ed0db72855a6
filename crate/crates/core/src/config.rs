//! Run configuration: polygon, grids, solver and output settings.
//!
//! A file holding only a polygon (`{"f": [...]}`, `{"sides": [...]}`,
//! `{"square": {"f": 1.0}}`) is accepted as a config with defaults.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::polygon::{build_polygon, build_square, triangle_from_sides, PolygonSpec};
use crate::solver::RadialBc;
use crate::{PolyError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareInput {
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum PolygonInput {
    Semifocal { f: Vec<f64> },
    Sides { sides: Vec<f64> },
    Square { square: SquareInput },
}

impl PolygonInput {
    pub fn build(&self) -> Result<PolygonSpec> {
        match self {
            PolygonInput::Semifocal { f } => build_polygon(f),
            PolygonInput::Sides { sides } => match sides.as_slice() {
                [a, b, c] => triangle_from_sides([*a, *b, *c]),
                _ => build_polygon(&sides.iter().map(|x| 0.5 * x).collect::<Vec<_>>()),
            },
            PolygonInput::Square { square } => {
                if !(square.f > 0.0 && square.f.is_finite()) {
                    return Err(PolyError::DegenerateGeometry(format!("square semifocal {}", square.f)));
                }
                Ok(build_square(square.f))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Svg,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Explicit `mu_c` isolines; overrides `mu_range`/`mu_count`.
    pub mu: Option<Vec<f64>>,
    pub mu_range: [f64; 2],
    pub mu_count: usize,
    pub theta_count: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { mu: None, mu_range: [0.0, 2.0], mu_count: 11, theta_count: 24 }
    }
}

impl GridConfig {
    pub fn mu_values(&self) -> Vec<f64> {
        match &self.mu {
            Some(v) => v.clone(),
            None => {
                let [lo, hi] = self.mu_range;
                (0..self.mu_count).map(|i| lo + (hi - lo) * i as f64 / (self.mu_count - 1) as f64).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub k: f64,
    pub count: usize,
    /// Elements of the base angular grid.
    pub resolution: usize,
    /// Angular eigenpair fed to `radial` and the recomposition check.
    pub index: usize,
    pub mu_max: f64,
    pub steps: usize,
    pub bc: RadialBc,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { k: 1.0, count: 6, resolution: 720, index: 1, mu_max: 3.0, steps: 600, bc: RadialBc::Dirichlet }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileConfig {
    pub mu: f64,
    pub samples: usize,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig { mu: 1.1, samples: 720 }
    }
}

/// Names accepted in `tolerances`.
pub const CHECKS: [&str; 9] = [
    "covering",
    "continuity",
    "round-trip",
    "orthogonality",
    "separability",
    "tangent-matching",
    "degeneration",
    "mathieu-limit",
    "helmholtz-residual",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub polygon: PolygonInput,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub profile: ProfileConfig,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub command: Option<String>,
}

impl RunConfig {
    pub fn from_polygon(polygon: PolygonInput) -> Self {
        RunConfig {
            polygon,
            grid: GridConfig::default(),
            solver: SolverConfig::default(),
            profile: ProfileConfig::default(),
            format: None,
            tolerances: BTreeMap::new(),
            command: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| PolyError::Config(e.to_string()))?;
        let cfg = if v.get("polygon").is_some() {
            serde_json::from_value(v)
        } else {
            serde_json::from_value(v).map(RunConfig::from_polygon)
        }
        .map_err(|e| PolyError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let v: toml::Table = toml::from_str(s).map_err(|e| PolyError::Config(e.to_string()))?;
        let cfg = if v.contains_key("polygon") {
            v.try_into::<RunConfig>()
        } else {
            v.try_into::<PolygonInput>().map(RunConfig::from_polygon)
        }
        .map_err(|e| PolyError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// By extension; anything but `.toml` is read as JSON.
    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| PolyError::Config(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "toml") {
            Self::from_toml(&s)
        } else {
            Self::from_json(&s)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(PolyError::Config(m));
        let g = &self.grid;
        if g.mu_count < 2 || g.theta_count < 2 {
            return bad(format!("grid counts must be >= 2 (mu_count {}, theta_count {})", g.mu_count, g.theta_count));
        }
        if let Some(mu) = &g.mu {
            if mu.len() < 2 {
                return bad(format!("need at least 2 mu values, got {}", mu.len()));
            }
            if mu.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
                return bad("mu values must be finite and >= 0".into());
            }
        }
        let [lo, hi] = g.mu_range;
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return bad(format!("mu_range [{lo}, {hi}] must satisfy 0 <= lo < hi"));
        }
        let s = &self.solver;
        if !(s.k >= 0.0 && s.k.is_finite()) {
            return bad(format!("wavenumber {} must be finite and >= 0", s.k));
        }
        if s.count < 1 || s.index >= s.count {
            return bad(format!("solver count {} must exceed index {}", s.count, s.index));
        }
        if s.resolution < 8 || s.steps < 2 {
            return bad(format!("resolution {} (>= 8) / steps {} (>= 2)", s.resolution, s.steps));
        }
        if !(s.mu_max > 0.0 && s.mu_max.is_finite()) {
            return bad(format!("mu_max {} must be > 0", s.mu_max));
        }
        if !(self.profile.mu >= 0.0 && self.profile.mu.is_finite()) || self.profile.samples < 2 {
            return bad("profile needs mu >= 0 and samples >= 2".into());
        }
        for (name, tol) in &self.tolerances {
            if !CHECKS.contains(&name.as_str()) {
                return bad(format!("unknown check `{name}` in tolerances"));
            }
            if !(*tol > 0.0 && tol.is_finite()) {
                return bad(format!("tolerance for `{name}` must be > 0"));
            }
        }
        self.polygon.build().map_err(|e| PolyError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn spec(&self) -> Result<PolygonSpec> {
        self.polygon.build()
    }
}
