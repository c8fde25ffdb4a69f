//! Smooth periodic reconstruction of boundary geometry, boundary data and
//! Robin blending from sparse or noisy samples.

mod anchors;
mod curve;
mod geometry;
mod robin;

pub use anchors::{synth_boundary_data, DataAnchors};
pub use curve::{fit_periodic, fit_periodic_data, periodic_extend, PeriodicCurve, PeriodicGrid};
pub use geometry::{
    arclength_parametrize, curve_normal, curve_point, decimate, signed_area2, smooth_boundary,
    smooth_boundary_on, BoundaryGeometry,
};
pub use robin::{robin_eval, RobinCoefficients, DEFAULT_STEEPNESS};
