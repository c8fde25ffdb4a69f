use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rbffd::StencilConfig;
use crate::smoothing::curve::{fit_periodic_data, PeriodicCurve, PeriodicGrid};

const TWO_PI: f64 = 2.0 * PI;

/// Samples per unit of parameter in the arclength table.
const ARC_TABLE_SAMPLES: usize = 8192;

/// Tangents shorter than this cannot define a normal.
const MIN_TANGENT: f64 = 1e-12;

/// Approximate arclength parameters of a closed polygon, scaled to
/// `[0, 2pi)`. The closing segment from the last vertex back to the first
/// counts towards the perimeter.
pub fn arclength_parametrize(vertices: &[[f64; 2]]) -> Result<Vec<f64>> {
    if vertices.len() < 3 {
        return Err(Error::param("vertices", "need at least three vertices"));
    }
    let m = vertices.len();
    let mut partial = Vec::with_capacity(m);
    let mut total = 0.0;
    for i in 0..m {
        partial.push(total);
        let (a, b) = (vertices[i], vertices[(i + 1) % m]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        if len == 0.0 {
            return Err(Error::DegenerateSegment(i, (i + 1) % m));
        }
        total += len;
    }
    Ok(partial.into_iter().map(|s| TWO_PI * s / total).collect())
}

/// Keeps every `stride`-th vertex.
pub fn decimate(vertices: &[[f64; 2]], stride: usize) -> Vec<[f64; 2]> {
    vertices.iter().step_by(stride.max(1)).copied().collect()
}

/// Twice the signed polygon area; negative for clockwise ordering.
pub fn signed_area2(vertices: &[[f64; 2]]) -> f64 {
    let m = vertices.len();
    (0..m)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % m]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum()
}

/// Smooth closed boundary curve `t -> (x(t), y(t))`, `t` in `[0, 2pi)`.
#[derive(Debug, Clone)]
pub struct BoundaryGeometry {
    x_curve: PeriodicCurve,
    y_curve: PeriodicCurve,
    scale: f64,
    original_vertices: Vec<[f64; 2]>,
    /// +1 when the parametrization runs clockwise, -1 otherwise.
    orientation: f64,
    arc: ArcTable,
}

#[derive(Debug, Clone)]
struct ArcTable {
    t: Vec<f64>,
    s: Vec<f64>,
}

impl ArcTable {
    fn total(&self) -> f64 {
        *self.s.last().unwrap()
    }

    fn param_at(&self, s: f64) -> f64 {
        let s = s.rem_euclid(self.total());
        let k = self.s.partition_point(|&v| v <= s).clamp(1, self.s.len() - 1);
        let (s0, s1) = (self.s[k - 1], self.s[k]);
        let frac = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        self.t[k - 1] + frac * (self.t[k] - self.t[k - 1])
    }
}

/// Fits a smooth boundary through `vertices` after scaling them by `scale`.
/// The grid has `node_count` nodes and uses the 1D stencils of `cfg`.
pub fn smooth_boundary(
    vertices: &[[f64; 2]],
    scale: f64,
    node_count: usize,
    cfg: StencilConfig,
) -> Result<BoundaryGeometry> {
    let grid = PeriodicGrid::new(node_count, cfg)?;
    smooth_boundary_on(vertices, scale, &grid)
}

/// As [`smooth_boundary`] on an existing grid.
pub fn smooth_boundary_on(vertices: &[[f64; 2]], scale: f64, grid: &Arc<PeriodicGrid>) -> Result<BoundaryGeometry> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::param("scale", "must be positive and finite"));
    }
    let scaled: Vec<[f64; 2]> = vertices.iter().map(|v| [v[0] * scale, v[1] * scale]).collect();
    let extent = scaled
        .iter()
        .flat_map(|v| v.iter())
        .fold(0.0f64, |m, c| m.max(c.abs()));
    if !extent.is_finite() || extent > 1.0 + 1e-12 {
        return Err(Error::ScaleOutOfRange(extent));
    }
    let t = arclength_parametrize(&scaled)?;
    let xs: Vec<f64> = scaled.iter().map(|v| v[0]).collect();
    let ys: Vec<f64> = scaled.iter().map(|v| v[1]).collect();
    let (x_curve, y_curve) = rayon::join(
        || fit_periodic_data(grid, &t, &xs),
        || fit_periodic_data(grid, &t, &ys),
    );
    let orientation = if signed_area2(&scaled) < 0.0 { 1.0 } else { -1.0 };
    BoundaryGeometry::from_curves(x_curve?, y_curve?, scale, vertices.to_vec(), orientation)
}

impl BoundaryGeometry {
    fn from_curves(
        x_curve: PeriodicCurve,
        y_curve: PeriodicCurve,
        scale: f64,
        original_vertices: Vec<[f64; 2]>,
        orientation: f64,
    ) -> Result<Self> {
        let mut geom = Self {
            x_curve,
            y_curve,
            scale,
            original_vertices,
            orientation,
            arc: ArcTable { t: vec![0.0, TWO_PI], s: vec![0.0, 1.0] },
        };
        geom.arc = geom.build_arc_table()?;
        Ok(geom)
    }

    /// Builds a curve from analytic nodal data: the caller supplies the grid
    /// values of both coordinates directly.
    pub fn from_nodal_values(grid: &Arc<PeriodicGrid>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let x_curve = PeriodicCurve::from_values(grid.clone(), x)?;
        let y_curve = PeriodicCurve::from_values(grid.clone(), y)?;
        let mut geom = Self::from_curves(x_curve, y_curve, 1.0, Vec::new(), 1.0)?;
        let poly = geom.polygon(256)?;
        geom.orientation = if signed_area2(&poly) < 0.0 { 1.0 } else { -1.0 };
        Ok(geom)
    }

    fn build_arc_table(&self) -> Result<ArcTable> {
        let k = ARC_TABLE_SAMPLES;
        let t: Vec<f64> = (0..=k).map(|i| TWO_PI * i as f64 / k as f64).collect();
        let dx = self.x_curve.sample(&t, 1)?;
        let dy = self.y_curve.sample(&t, 1)?;
        let speed: Vec<f64> = dx.iter().zip(&dy).map(|(a, b)| a.hypot(*b)).collect();
        let dt = TWO_PI / k as f64;
        let mut s = Vec::with_capacity(k + 1);
        let mut acc = 0.0;
        s.push(0.0);
        for i in 0..k {
            acc += 0.5 * dt * (speed[i] + speed[i + 1]);
            s.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::DegenerateTangent(0.0));
        }
        Ok(ArcTable { t, s })
    }

    pub fn x_curve(&self) -> &PeriodicCurve {
        &self.x_curve
    }

    pub fn y_curve(&self) -> &PeriodicCurve {
        &self.y_curve
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn original_vertices(&self) -> &[[f64; 2]] {
        &self.original_vertices
    }

    pub fn is_clockwise(&self) -> bool {
        self.orientation > 0.0
    }

    /// Length of the fitted curve.
    pub fn perimeter(&self) -> f64 {
        self.arc.total()
    }

    /// Curve parameter reached after arclength `s` from `t = 0`.
    pub fn param_at_arclength(&self, s: f64) -> f64 {
        self.arc.param_at(s)
    }

    /// `count` parameters equally spaced in arclength, starting at `t = 0`.
    pub fn uniform_arclength_params(&self, count: usize) -> Vec<f64> {
        let total = self.perimeter();
        (0..count)
            .map(|i| self.arc.param_at(total * i as f64 / count as f64))
            .collect()
    }

    pub fn points(&self, ts: &[f64]) -> Result<Vec<[f64; 2]>> {
        let (x, y) = rayon::join(|| self.x_curve.sample(ts, 0), || self.y_curve.sample(ts, 0));
        Ok(x?.into_iter().zip(y?).map(|(a, b)| [a, b]).collect())
    }

    /// Outward unit normals.
    pub fn normals(&self, ts: &[f64]) -> Result<Vec<[f64; 2]>> {
        let (dx, dy) = rayon::join(|| self.x_curve.sample(ts, 1), || self.y_curve.sample(ts, 1));
        dx?.into_iter()
            .zip(dy?)
            .map(|(p, q)| {
                let len = p.hypot(q);
                if !(len >= MIN_TANGENT) {
                    return Err(Error::DegenerateTangent(len));
                }
                let o = self.orientation;
                Ok([-o * q / len, o * p / len])
            })
            .collect()
    }

    /// Closed polygon of `count` points equally spaced in the parameter.
    pub fn polygon(&self, count: usize) -> Result<Vec<[f64; 2]>> {
        let ts: Vec<f64> = (0..count).map(|i| TWO_PI * i as f64 / count as f64).collect();
        self.points(&ts)
    }

    /// Polygon with arclength step at most `step`.
    pub fn dense_polygon(&self, step: f64) -> Result<Vec<[f64; 2]>> {
        let count = ((self.perimeter() / step).ceil() as usize).max(16);
        self.points(&self.uniform_arclength_params(count))
    }

    /// Axis-aligned bounding box `[xmin, ymin, xmax, ymax]` of the curve.
    pub fn bounding_box(&self) -> Result<[f64; 4]> {
        let poly = self.polygon(4096)?;
        let mut bb = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for p in &poly {
            bb[0] = bb[0].min(p[0]);
            bb[1] = bb[1].min(p[1]);
            bb[2] = bb[2].max(p[0]);
            bb[3] = bb[3].max(p[1]);
        }
        Ok(bb)
    }
}

pub fn curve_point(geom: &BoundaryGeometry, t: f64) -> Result<[f64; 2]> {
    Ok(geom.points(&[t])?[0])
}

pub fn curve_normal(geom: &BoundaryGeometry, t: f64) -> Result<[f64; 2]> {
    Ok(geom.normals(&[t])?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_and_triangle_parameters() {
        let t = arclength_parametrize(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        for (a, b) in t.iter().zip([0.0, PI / 2.0, PI, 1.5 * PI]) {
            assert!((a - b).abs() < 1e-14);
        }
        let h = 3f64.sqrt() / 2.0;
        let t = arclength_parametrize(&[[0.0, 0.0], [1.0, 0.0], [0.5, h]]).unwrap();
        for (a, b) in t.iter().zip([0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(arclength_parametrize(&[[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(matches!(
            arclength_parametrize(&[[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]]),
            Err(Error::DegenerateSegment(0, 1))
        ));
    }

    fn circle(r: f64, m: usize, clockwise: bool) -> Vec<[f64; 2]> {
        let sign = if clockwise { -1.0 } else { 1.0 };
        (0..m)
            .map(|i| {
                let a = TWO_PI * i as f64 / m as f64;
                [r * a.cos(), sign * r * a.sin()]
            })
            .collect()
    }

    #[test]
    fn circle_fit_and_normals() {
        for clockwise in [true, false] {
            let geom = smooth_boundary(&circle(0.8, 64, clockwise), 1.0, 60, StencilConfig::quintic_1d(6)).unwrap();
            let ts: Vec<f64> = (0..500).map(|i| TWO_PI * i as f64 / 500.0 + 0.001).collect();
            let pts = geom.points(&ts).unwrap();
            let nrm = geom.normals(&ts).unwrap();
            for (p, n) in pts.iter().zip(&nrm) {
                let r = p[0].hypot(p[1]);
                assert!((r - 0.8).abs() <= 1e-5, "radius {r}");
                assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-12);
                // outward: aligned with the radial direction
                assert!((n[0] * p[0] + n[1] * p[1]) / r > 1.0 - 1e-6);
            }
            assert!((geom.perimeter() - TWO_PI * 0.8).abs() < 1e-4);
            assert_eq!(geom.is_clockwise(), clockwise);
        }
    }

    #[test]
    fn periodic_in_parameter() {
        let geom = smooth_boundary(&circle(0.5, 40, true), 1.0, 50, StencilConfig::quintic_1d(6)).unwrap();
        for t in [0.0, 0.3, 2.0, 5.9] {
            let (a, b) = (curve_point(&geom, t).unwrap(), curve_point(&geom, t + TWO_PI).unwrap());
            let (na, nb) = (curve_normal(&geom, t).unwrap(), curve_normal(&geom, t + TWO_PI).unwrap());
            assert!((a[0] - b[0]).abs() < 1e-8 && (a[1] - b[1]).abs() < 1e-8);
            assert!((na[0] - nb[0]).abs() < 1e-8 && (na[1] - nb[1]).abs() < 1e-8);
        }
        let end = geom.x_curve().sample_raw(&[0.0, TWO_PI], &[0]).unwrap();
        let end_y = geom.y_curve().sample_raw(&[0.0, TWO_PI], &[0]).unwrap();
        assert!((end[0][0] - end[0][1]).hypot(end_y[0][0] - end_y[0][1]) <= 1e-8);
    }

    #[test]
    fn scale_out_of_range() {
        let v = circle(150.0, 40, true);
        assert!(matches!(
            smooth_boundary(&v, 1.0, 30, StencilConfig::quintic_1d(6)),
            Err(Error::ScaleOutOfRange(_))
        ));
        assert!(smooth_boundary(&v, 1.0 / 156.92, 30, StencilConfig::quintic_1d(6)).is_ok());
    }

    #[test]
    fn arclength_params_are_uniform() {
        let v: Vec<[f64; 2]> = (0..80)
            .map(|i| {
                let a = -TWO_PI * i as f64 / 80.0;
                [0.9 * a.cos(), 0.4 * a.sin()]
            })
            .collect();
        let geom = smooth_boundary(&v, 1.0, 70, StencilConfig::quintic_1d(6)).unwrap();
        let ts = geom.uniform_arclength_params(200);
        let pts = geom.points(&ts).unwrap();
        let step = geom.perimeter() / 200.0;
        for i in 0..200 {
            let (a, b) = (pts[i], pts[(i + 1) % 200]);
            let d = (a[0] - b[0]).hypot(a[1] - b[1]);
            assert!((d - step).abs() < 0.01 * step, "{d} vs {step}");
        }
    }
}
