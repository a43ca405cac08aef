//! Orbit fates, basin grids, Fatou-component centers, area estimates and
//! parameter scans.

mod area;
mod component;
mod critical;
mod grid;
mod orbit;
mod scan;

pub use area::{estimate_basin_area, AreaEstimate, SATURATION_TOL};
pub use component::{component_preperiod, find_center, is_immediate, same_component};
pub use critical::{
    analyze_critical_orbits, CensusEntry, CriticalAnalysis, CriticalOrbit, Landing,
};
pub use grid::{
    basin_grid, basin_grid_with, connectivity_probe, BasinGrid, ConnectivityReport, Viewport,
};
pub use orbit::{iterate_orbit, OrbitEngine, OrbitRecord};
pub use scan::{param_scan, Family, ScanRegion, ScanResult, ScanSample, CSV_HEADER};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::newton::NewtonSpec;

/// Default iteration budget for maps with a repelling fixed point at infinity.
pub const BUDGET_REPELLING: usize = 5_000;
/// Default iteration budget for maps with a parabolic fixed point at infinity.
pub const BUDGET_PARABOLIC: usize = 50_000;

pub fn default_budget(spec: &NewtonSpec) -> usize {
    if spec.n == 0 {
        BUDGET_REPELLING
    } else {
        BUDGET_PARABOLIC
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("no center found within the iteration budget")]
    NoCenter,
}

/// Thresholds of the fate detector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaptureParams {
    /// Capture radius around roots, relative to the root scale.
    pub tau_capture: f64,
    /// Modulus beyond which a petal-aligned orbit is decided at once.
    pub r_esc: f64,
    /// Angular tolerance around petal directions, in radians.
    pub angle_tol: f64,
    /// Consecutive outward petal-aligned steps that decide a petal fate.
    pub window: usize,
    /// Contraction steps confirming a root capture.
    pub confirm: usize,
}

impl Default for CaptureParams {
    fn default() -> Self {
        Self {
            tau_capture: 1e-6,
            r_esc: 1e6,
            angle_tol: 10f64.to_radians(),
            window: 50,
            confirm: 5,
        }
    }
}

/// Where an orbit goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fate {
    /// Converges to root `i` of `p` (lexicographic root order).
    Root(usize),
    /// Escapes to infinity through petal `j`.
    Petal(usize),
    Undecided,
}

impl Fate {
    pub fn is_decided(&self) -> bool {
        !matches!(self, Fate::Undecided)
    }
}

impl fmt::Display for Fate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fate::Root(i) => write!(f, "root{i}"),
            Fate::Petal(j) => write!(f, "petal{j}"),
            Fate::Undecided => f.write_str("undecided"),
        }
    }
}
