//! Unfitted node layouts and geometry-conforming evaluation sets.

mod inside;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rbffd::{KdTree, NodeSet};
use crate::smoothing::BoundaryGeometry;

pub use inside::{inside, InsideTester, BOUNDARY_TOLERANCE};

pub const DEFAULT_TILT: f64 = 0.05 * std::f64::consts::PI;

fn rotate(v: [f64; 2], angle: f64) -> [f64; 2] {
    let (s, c) = angle.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

fn bbox_center(bbox: [f64; 4]) -> [f64; 2] {
    [0.5 * (bbox[0] + bbox[2]), 0.5 * (bbox[1] + bbox[3])]
}

/// Regular grid of spacing `h` through the lower-left corner of `bbox`
/// (`[xmin, ymin, xmax, ymax]`), rotated by `tilt` about the box centre and
/// clipped to the box.
pub fn generate_grid(bbox: [f64; 4], h: f64, tilt: f64) -> Result<NodeSet> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::param("h", "must be positive"));
    }
    if !(bbox[2] > bbox[0] && bbox[3] > bbox[1]) {
        return Err(Error::param("bbox", "empty box"));
    }
    let c = bbox_center(bbox);
    let half_diag = 0.5 * (bbox[2] - bbox[0]).hypot(bbox[3] - bbox[1]);
    let k = (half_diag / h).ceil() as i64 + 1;
    let nx = ((bbox[2] - bbox[0]) / h).ceil() as i64;
    let ny = ((bbox[3] - bbox[1]) / h).ceil() as i64;
    let tol = 1e-12 * (bbox[2] - bbox[0]).max(bbox[3] - bbox[1]);
    let mut pts = Vec::new();
    for j in -k..=ny + k {
        for i in -k..=nx + k {
            let local = [bbox[0] + i as f64 * h - c[0], bbox[1] + j as f64 * h - c[1]];
            let r = rotate(local, tilt);
            let p = [c[0] + r[0], c[1] + r[1]];
            if p[0] >= bbox[0] - tol && p[0] <= bbox[2] + tol && p[1] >= bbox[1] - tol && p[1] <= bbox[3] + tol {
                pts.push(p);
            }
        }
    }
    NodeSet::from_points_2d(&pts)
}

/// Box around `inner` enlarged by `margin` on every side. The margin must
/// cover half a stencil of `stencil_size` nodes at spacing `h`.
pub fn enclosing_bbox(inner: [f64; 4], margin: f64, h: f64, stencil_size: usize) -> Result<[f64; 4]> {
    let needed = stencil_size as f64 * h / 2.0;
    if !(margin >= needed) {
        return Err(Error::param(
            "margin",
            format!("{margin} is smaller than half a stencil ({needed})"),
        ));
    }
    Ok([inner[0] - margin, inner[1] - margin, inner[2] + margin, inner[3] + margin])
}

/// Offsets of the `q` evaluation points inside one grid cell, in units of the
/// cell width and in the grid's own (unrotated) frame.
pub fn cell_template(q: usize) -> Result<Vec<[f64; 2]>> {
    if q == 0 {
        return Err(Error::param("q", "must be at least 1"));
    }
    let m = (q as f64).sqrt().round() as usize;
    Ok(match q {
        1 => vec![[0.0, 0.0]],
        5 => vec![[0.0, 0.0], [-0.25, -0.25], [0.25, -0.25], [-0.25, 0.25], [0.25, 0.25]],
        _ if m * m == q => {
            let mut out = Vec::with_capacity(q);
            for j in 0..m {
                for i in 0..m {
                    out.push([(i as f64 + 0.5) / m as f64 - 0.5, (j as f64 + 0.5) / m as f64 - 0.5]);
                }
            }
            out
        }
        _ => {
            // Rank-1 golden-ratio lattice.
            let g = 0.5 * (5f64.sqrt() - 1.0);
            (0..q)
                .map(|i| {
                    let x = (i as f64 + 0.5) / q as f64;
                    let y = (0.5 + i as f64 * g).fract();
                    [x - 0.5, y - 0.5]
                })
                .collect()
        }
    })
}

/// Evaluation points on and inside the fitted boundary.
#[derive(Debug, Clone)]
pub struct EvaluationPoints {
    pub interior: NodeSet,
    pub boundary: NodeSet,
    pub normals: Vec<[f64; 2]>,
    pub boundary_params: Vec<f64>,
}

/// Stamps the `q`-point template into the Voronoi cell of every grid node and
/// keeps the points inside the geometry; places boundary points at arclength
/// spacing `h / sqrt(q)`.
pub fn generate_evaluation_points(
    grid: &NodeSet,
    geom: &BoundaryGeometry,
    q: usize,
    h: f64,
    tilt: f64,
) -> Result<EvaluationPoints> {
    let template = cell_template(q)?;
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::param("h", "must be positive"));
    }
    let h_y = h / (q as f64).sqrt();
    let tester = InsideTester::from_geometry(geom, h_y / 4.0)?;
    let offsets: Vec<[f64; 2]> = template
        .iter()
        .map(|o| rotate([o[0] * h, o[1] * h], tilt))
        .collect();
    let interior: Vec<[f64; 2]> = (0..grid.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let c = grid.point2(i);
            let tester = &tester;
            offsets
                .iter()
                .map(move |o| [c[0] + o[0], c[1] + o[1]])
                .filter(move |p| tester.contains(*p))
        })
        .collect();
    if interior.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let count = ((geom.perimeter() / h_y).round() as usize).max(3);
    let boundary_params = geom.uniform_arclength_params(count);
    let boundary = geom.points(&boundary_params)?;
    let normals = geom.normals(&boundary_params)?;
    Ok(EvaluationPoints {
        interior: NodeSet::new_unchecked(2, interior.into_iter().flatten().collect())?,
        boundary: NodeSet::new_unchecked(2, boundary.into_iter().flatten().collect())?,
        normals,
        boundary_params,
    })
}

/// Grid nodes that are among the `ceil(n/2)` nearest grid nodes of some
/// evaluation point, in grid order.
pub fn trim_nodes(grid: &NodeSet, eval: &NodeSet, n: usize) -> Result<NodeSet> {
    Ok(grid.select(&trim_indices(grid, eval, n)))
}

pub fn trim_indices(grid: &NodeSet, eval: &NodeSet, n: usize) -> Vec<usize> {
    if eval.is_empty() || grid.is_empty() {
        return Vec::new();
    }
    let k = n.div_ceil(2).min(grid.len());
    let tree = KdTree::new(grid);
    let hits: Vec<Vec<usize>> = (0..eval.len())
        .into_par_iter()
        .map(|l| tree.nearest_k(eval.point(l), k))
        .collect();
    let mut used = vec![false; grid.len()];
    for h in hits.iter().flatten() {
        used[*h] = true;
    }
    (0..grid.len()).filter(|&i| used[i]).collect()
}

/// Mean distance from each point to its nearest other point.
pub fn average_spacing(points: &NodeSet) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Size("average spacing needs at least two points".into()));
    }
    let tree = KdTree::new(points);
    let nearest: Vec<f64> = (0..points.len())
        .into_par_iter()
        .map(|i| tree.nearest_k_with_distances(points.point(i), 2)[1].0.sqrt())
        .collect();
    Ok(nearest.iter().sum::<f64>() / points.len() as f64)
}

/// Settings for building a [`Discretization`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizationParams {
    /// Background grid spacing.
    pub h: f64,
    /// Evaluation points per node cell.
    pub q: usize,
    pub tilt: f64,
    /// Stencil size of the operators built later on the node set.
    pub stencil_size: usize,
    /// Extra space around the geometry's bounding box; defaults to half a
    /// stencil.
    pub margin: Option<f64>,
}

impl DiscretizationParams {
    pub fn new(h: f64, q: usize, stencil_size: usize) -> Self {
        Self {
            h,
            q,
            tilt: DEFAULT_TILT,
            stencil_size,
            margin: None,
        }
    }
}

/// Trimmed node set plus interior and boundary evaluation points.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub nodes: NodeSet,
    pub y_interior: NodeSet,
    pub y_boundary: NodeSet,
    pub normals: Vec<[f64; 2]>,
    pub boundary_params: Vec<f64>,
    /// Measured mean nearest-neighbour distance of the nodes.
    pub h: f64,
    /// Measured mean nearest-neighbour distance of all evaluation points.
    pub h_y: f64,
    /// Background grid spacing.
    pub grid_spacing: f64,
    pub q: usize,
    pub tilt: f64,
}

impl Discretization {
    pub fn build(geom: &BoundaryGeometry, params: DiscretizationParams) -> Result<Self> {
        let DiscretizationParams {
            h,
            q,
            tilt,
            stencil_size,
            margin,
        } = params;
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::param("h", "must be positive"));
        }
        let margin = margin.unwrap_or(stencil_size as f64 * h / 2.0);
        let bbox = enclosing_bbox(geom.bounding_box()?, margin, h, stencil_size)?;
        let grid = generate_grid(bbox, h, tilt)?;
        let eval = generate_evaluation_points(&grid, geom, q, h, tilt)?;
        let all = eval.interior.concat(&eval.boundary)?;
        let nodes = trim_nodes(&grid, &all, stencil_size)?;
        if nodes.len() < stencil_size {
            return Err(Error::Size(format!(
                "{} nodes after trimming, stencils need {stencil_size}",
                nodes.len()
            )));
        }
        Ok(Self {
            h: average_spacing(&nodes)?,
            h_y: average_spacing(&all)?,
            nodes,
            y_interior: eval.interior,
            y_boundary: eval.boundary,
            normals: eval.normals,
            boundary_params: eval.boundary_params,
            grid_spacing: h,
            q,
            tilt,
        })
    }

    /// Interior evaluation points followed by boundary ones.
    pub fn eval_points(&self) -> NodeSet {
        self.y_interior
            .concat(&self.y_boundary)
            .expect("evaluation sets share dimension")
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_eval(&self) -> usize {
        self.y_interior.len() + self.y_boundary.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rbffd::knn;
    use crate::rbffd::StencilConfig;
    use crate::smoothing::smooth_boundary;
    use std::f64::consts::PI;

    #[test]
    fn grid_counts() {
        let g = generate_grid([0.0, 0.0, 1.0, 1.0], 0.5, 0.0).unwrap();
        assert_eq!(g.len(), 9);
        let mut a: Vec<[i64; 2]> = g
            .iter()
            .map(|p| [(p[0] * 1e6).round() as i64, (p[1] * 1e6).round() as i64])
            .collect();
        let g2 = generate_grid([0.0, 0.0, 1.0, 1.0], 0.5, PI / 2.0).unwrap();
        let mut b: Vec<[i64; 2]> = g2
            .iter()
            .map(|p| [(p[0] * 1e6).round() as i64, (p[1] * 1e6).round() as i64])
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert!(generate_grid([0.0, 0.0, 1.0, 1.0], 0.0, 0.0).is_err());
        assert!(enclosing_bbox([0.0, 0.0, 1.0, 1.0], 0.1, 0.1, 12).is_err());
        assert!(enclosing_bbox([0.0, 0.0, 1.0, 1.0], 0.7, 0.1, 12).is_ok());
    }

    #[test]
    fn spacing_examples() {
        let two = NodeSet::from_points_2d(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        assert_eq!(average_spacing(&two).unwrap(), 1.0);
        let g = generate_grid([0.0, 0.0, 2.0, 2.0], 1.0, 0.0).unwrap();
        assert!((average_spacing(&g).unwrap() - 1.0).abs() < 1e-14);
        let line = NodeSet::from_points_1d(&[0.0, 1.0, 3.0]).unwrap();
        assert!((average_spacing(&line).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!(average_spacing(&NodeSet::from_points_1d(&[0.0]).unwrap()).is_err());
    }

    #[test]
    fn templates() {
        assert_eq!(cell_template(1).unwrap(), vec![[0.0, 0.0]]);
        assert_eq!(cell_template(5).unwrap().len(), 5);
        assert_eq!(cell_template(4).unwrap().len(), 4);
        for q in [2, 3, 7] {
            let t = cell_template(q).unwrap();
            assert_eq!(t.len(), q);
            assert!(t.iter().all(|p| p[0].abs() < 0.5 && p[1].abs() < 0.5));
        }
        assert!(cell_template(0).is_err());
    }

    fn disk(r: f64) -> BoundaryGeometry {
        let v: Vec<[f64; 2]> = (0..64)
            .map(|i| {
                let a = -2.0 * PI * i as f64 / 64.0;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        smooth_boundary(&v, 1.0, 60, StencilConfig::quintic_1d(6)).unwrap()
    }

    #[test]
    fn trim_matches_brute_force() {
        let geom = disk(0.5);
        let grid = generate_grid([-1.0, -1.0, 1.0, 1.0], 2.0 / 9.0, 0.0).unwrap();
        assert_eq!(grid.len(), 100);
        let eval = generate_evaluation_points(&grid, &geom, 5, 2.0 / 9.0, 0.0).unwrap();
        let all = eval.interior.concat(&eval.boundary).unwrap();
        let trimmed = trim_indices(&grid, &all, 12);
        let mut brute = vec![false; grid.len()];
        for l in 0..all.len() {
            let mut d: Vec<(f64, usize)> = (0..grid.len())
                .map(|i| {
                    let (p, y) = (grid.point(i), all.point(l));
                    ((p[0] - y[0]).powi(2) + (p[1] - y[1]).powi(2), i)
                })
                .collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for &(_, i) in &d[..6] {
                brute[i] = true;
            }
        }
        let expected: Vec<usize> = (0..grid.len()).filter(|&i| brute[i]).collect();
        assert_eq!(trimmed, expected);
        assert!(trim_indices(&grid, &NodeSet::empty(2), 12).is_empty());
        // dense evaluation over the whole box keeps everything
        let everything = trim_indices(&grid, &grid, 12);
        assert_eq!(everything.len(), grid.len());
        let _ = knn(&grid, &all, 6).unwrap();
    }

    #[test]
    fn evaluation_points_inside_and_spaced() {
        let geom = disk(0.8);
        let h = 0.02;
        let params = DiscretizationParams::new(h, 5, 12);
        let disc = Discretization::build(&geom, params).unwrap();
        let tester = InsideTester::from_geometry(&geom, h / 5f64.sqrt() / 4.0).unwrap();
        assert!(disc.y_interior.iter().all(|p| tester.contains([p[0], p[1]])));
        let h_y = h / 5f64.sqrt();
        let expected = geom.perimeter() / h_y;
        assert!((disc.y_boundary.len() as f64 - expected).abs() <= 1.0);
        let m = disc.y_boundary.len();
        for i in 0..m {
            let (a, b) = (disc.y_boundary.point2(i), disc.y_boundary.point2((i + 1) % m));
            let d = (a[0] - b[0]).hypot(a[1] - b[1]);
            assert!(d < 1.5 * h_y && d > h_y / 1.5);
        }
        for (p, n) in disc.y_boundary.iter().zip(&disc.normals) {
            assert!((p[0] * n[0] + p[1] * n[1]) > 0.0);
        }
        assert!((disc.h - h).abs() < 0.1 * h);
        assert!(disc.n_eval() > disc.n_nodes());
    }

    #[test]
    fn q1_uses_grid_nodes() {
        let geom = disk(0.5);
        let grid = generate_grid([-1.0, -1.0, 1.0, 1.0], 0.1, 0.0).unwrap();
        let eval = generate_evaluation_points(&grid, &geom, 1, 0.1, 0.0).unwrap();
        for p in eval.interior.iter() {
            assert!(grid.iter().any(|g| (g[0] - p[0]).abs() < 1e-15 && (g[1] - p[1]).abs() < 1e-15));
        }
    }

    #[test]
    fn spacing_scaling() {
        let bbox = [-1.0, -1.0, 1.0, 1.0];
        let a = generate_grid(bbox, 0.04, DEFAULT_TILT).unwrap();
        let b = generate_grid(bbox, 0.02, DEFAULT_TILT).unwrap();
        let ratio = b.len() as f64 / a.len() as f64;
        assert!((ratio - 4.0).abs() < 0.15 * 4.0, "{ratio}");
        let (ha, hb) = (average_spacing(&a).unwrap(), average_spacing(&b).unwrap());
        assert!((ha / hb - 2.0).abs() < 0.2);
    }
}
