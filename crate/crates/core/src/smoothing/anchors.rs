use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::smoothing::curve::{fit_periodic_data, PeriodicCurve, PeriodicGrid};

const TWO_PI: f64 = 2.0 * PI;

/// Sparse `(t, value)` samples of one boundary-data component.
#[derive(Debug, Clone, PartialEq)]
pub struct DataAnchors {
    points: Vec<(f64, f64)>,
}

impl DataAnchors {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("anchors", "need at least one anchor"));
        }
        if points.iter().any(|(t, v)| !(0.0..TWO_PI).contains(t) || !v.is_finite()) {
            return Err(Error::param("anchors", "parameters must lie in [0, 2pi)"));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::param("anchors", "parameters must be strictly increasing"));
        }
        Ok(Self { points })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            points: vec![(0.0, value)],
        }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Periodic piecewise-linear interpolant at `t`.
    pub fn interpolate(&self, t: f64) -> f64 {
        let t = t.rem_euclid(TWO_PI);
        let p = &self.points;
        if p.len() == 1 {
            return p[0].1;
        }
        let k = p.partition_point(|a| a.0 <= t);
        let (lo, hi) = if k == 0 {
            let last = p[p.len() - 1];
            ((last.0 - TWO_PI, last.1), p[0])
        } else if k == p.len() {
            (p[k - 1], (p[0].0 + TWO_PI, p[0].1))
        } else {
            (p[k - 1], p[k])
        };
        lo.1 + (t - lo.0) / (hi.0 - lo.0) * (hi.1 - lo.1)
    }

    /// `count` samples uniform in `t` over `[0, 2pi)`.
    pub fn densify(&self, count: usize) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..count).map(|i| TWO_PI * i as f64 / count as f64).collect();
        let v = t.iter().map(|&t| self.interpolate(t)).collect();
        (t, v)
    }
}

/// Densifies the anchors to `count` points and fits a smooth periodic curve.
pub fn synth_boundary_data(anchors: &DataAnchors, count: usize, grid: &Arc<PeriodicGrid>) -> Result<PeriodicCurve> {
    let (t, v) = anchors.densify(count);
    fit_periodic_data(grid, &t, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rbffd::StencilConfig;

    #[test]
    fn interpolation_wraps() {
        let a = DataAnchors::new(vec![(1.0, 0.0), (3.0, 2.0)]).unwrap();
        assert_eq!(a.interpolate(2.0), 1.0);
        // between 3 and 1 + 2pi the value falls from 2 to 0
        let mid = 0.5 * (3.0 + 1.0 + TWO_PI);
        assert!((a.interpolate(mid) - 1.0).abs() < 1e-14);
        assert!((a.interpolate(mid - TWO_PI) - 1.0).abs() < 1e-14);
        assert!(DataAnchors::new(vec![(2.0, 0.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn constant_anchor() {
        let grid = PeriodicGrid::new(120, StencilConfig::new(6, 1, 5).unwrap().with_stencil_size(28, 1).unwrap()).unwrap();
        let c = synth_boundary_data(&DataAnchors::constant(0.3), 80, &grid).unwrap();
        assert!(c.nodal_values().iter().all(|v| (v - 0.3).abs() < 1e-10));
    }

    #[test]
    fn hat_function() {
        let a = DataAnchors::new(vec![(0.0, 0.0), (2.0, 0.0), (3.0, 1.0), (4.0, 0.0)]).unwrap();
        let grid = PeriodicGrid::new(120, StencilConfig::new(6, 1, 5).unwrap().with_stencil_size(28, 1).unwrap()).unwrap();
        let c = synth_boundary_data(&a, 80, &grid).unwrap();
        let ts: Vec<f64> = (0..2000).map(|i| TWO_PI * i as f64 / 2000.0).collect();
        let v = c.sample(&ts, 0).unwrap();
        for (t, v) in ts.iter().zip(&v) {
            if [2.0, 3.0, 4.0].iter().all(|k| (t - k).abs() > 0.3) {
                assert!((v - a.interpolate(*t)).abs() <= 0.05, "t={t} v={v}");
            }
        }
        for r in c.seam_residuals().unwrap() {
            assert!(r.abs() < 1e-8);
        }
    }
}
