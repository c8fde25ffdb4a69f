use std::f64::consts::PI;

use crate::error::Result;
use crate::rbffd::StencilConfig;
use crate::smoothing::{smooth_boundary, BoundaryGeometry};

pub const STAR_RADIUS: f64 = 0.8;
pub const STAR_AMPLITUDE: f64 = 0.15;
pub const STAR_LOBES: usize = 5;

const VERTEX_COUNT: usize = 2048;

/// Synthetic test domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Unit circle.
    Circle,
    /// `r = 0.8 + 0.15 cos(5 theta)`.
    Star,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Circle => "circle",
            Domain::Star => "star",
        }
    }

    pub fn radius(self, theta: f64) -> f64 {
        match self {
            Domain::Circle => 1.0,
            Domain::Star => STAR_RADIUS + STAR_AMPLITUDE * (STAR_LOBES as f64 * theta).cos(),
        }
    }

    /// Counter-clockwise polygon with `count` vertices at uniform angle.
    pub fn vertices(self, count: usize) -> Vec<[f64; 2]> {
        (0..count)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / count as f64;
                let r = self.radius(a);
                [r * a.cos(), r * a.sin()]
            })
            .collect()
    }

    /// Smoothed boundary through a dense vertex polygon.
    pub fn geometry(self, smoothing_nodes: usize, smoothing: StencilConfig) -> Result<BoundaryGeometry> {
        smooth_boundary(&self.vertices(VERTEX_COUNT), 1.0, smoothing_nodes, smoothing)
    }

    /// Inward-corner locations (local minima of the radius).
    pub fn inward_corners(self) -> Vec<[f64; 2]> {
        match self {
            Domain::Circle => Vec::new(),
            Domain::Star => inward_corners(),
        }
    }
}

/// Radius minima of the star.
pub fn inward_corners() -> Vec<[f64; 2]> {
    let k = STAR_LOBES as f64;
    (0..STAR_LOBES)
        .map(|i| {
            let a = (2 * i + 1) as f64 * PI / k;
            let r = STAR_RADIUS - STAR_AMPLITUDE;
            [r * a.cos(), r * a.sin()]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corners_are_radius_minima() {
        for c in inward_corners() {
            let a = c[1].atan2(c[0]);
            let r = Domain::Star.radius(a);
            assert!((r - 0.65).abs() < 1e-12);
            assert!(Domain::Star.radius(a + 0.01) > r && Domain::Star.radius(a - 0.01) > r);
        }
    }

    #[test]
    fn star_geometry_follows_formula() {
        let g = Domain::Star.geometry(512, StencilConfig::quintic_1d(6)).unwrap();
        let ts: Vec<f64> = (0..200).map(|i| i as f64 * 0.0314).collect();
        for p in g.points(&ts).unwrap() {
            let a = p[1].atan2(p[0]);
            let d = (p[0].hypot(p[1]) - Domain::Star.radius(a)).abs();
            assert!(d < 1e-4, "{d}");
        }
    }
}
