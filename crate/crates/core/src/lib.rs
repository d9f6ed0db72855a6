//! Polyelliptic orthogonal coordinates outside a triangle or a square.

pub mod atlas;
pub mod chart;
pub mod config;
pub mod error;
pub mod metric;
pub mod numfmt;
pub mod polygon;
pub mod render;
pub mod solver;
pub mod verify;

pub use error::{PolyError, Result};
