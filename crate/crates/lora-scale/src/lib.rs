//! Analytical scalability model for single-cell LoRa uplinks.
//!
//! Devices form a Poisson point process around a central gateway, thinned by
//! the regulatory duty cycle; the cell is split into spreading-factor annuli
//! by a configurable allocation scheme. The library evaluates, in closed form
//! or by adaptive quadrature, the probability that an uplink at a given
//! distance survives noise (SNR), the strongest co-SF collider, the
//! cumulative co-SF interference, and cross-SF interference under imperfect
//! orthogonality — plus cell-wide coverage averages and (radius, load)
//! contour grids. A Monte Carlo simulator with common random numbers
//! cross-checks every analytic curve.

pub mod analytic;
pub mod config;
pub mod coverage;
pub mod error;
pub mod geometry;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod propagation;

pub use analytic::{Scenario, SuccessPoint};
pub use config::{load_config, parse_config, RunConfig};
pub use coverage::{
    contour_grid, coverage, coverage_result, coverage_sweep, plan_for_scheme, ContourGrid,
    CoverageResult, Preset,
};
pub use error::{Error, Result};
pub use geometry::{Deployment, Scheme, SfPlan};
pub use model::{RadioConfig, SirMatrix, SnrThresholds, SpreadingFactor};
pub use montecarlo::{simulate_coverage, simulate_success, CaptureMode, SimSpec, SuccessEstimates};
