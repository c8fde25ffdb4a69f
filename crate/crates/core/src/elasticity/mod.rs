//! Oversampled least-squares discretization of the Navier-Cauchy equations
//! with blended displacement/traction boundary conditions, plus the scalar
//! Poisson variant used for verification.

mod field;
mod solver;

use std::ops::Range;

use crate::error::{Error, Result};
use crate::pointset::Discretization;
use crate::rbffd::{DiffSpec, OperatorBuilder, StencilConfig};
use crate::smoothing::{robin_eval, PeriodicCurve, RobinCoefficients};
use crate::sparse::CsrMatrix;

pub use field::{evaluate_field, evaluate_scalar, von_mises, ElasticField};
pub use solver::{lstsq, lstsq_owned, SolveMethod, SolveReport, NORMAL_RESIDUAL_TOL};

/// Isotropic linear elastic material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl Material {
    pub fn new(youngs_modulus: f64, poisson_ratio: f64) -> Result<Self> {
        let (lambda, mu) = lame_parameters(youngs_modulus, poisson_ratio)?;
        Ok(Self {
            youngs_modulus,
            poisson_ratio,
            lambda,
            mu,
        })
    }
}

impl Default for Material {
    fn default() -> Self {
        Self::new(1e5, 0.3).expect("valid default material")
    }
}

/// Lame parameters `(lambda, mu)` from Young's modulus and Poisson's ratio.
pub fn lame_parameters(youngs_modulus: f64, poisson_ratio: f64) -> Result<(f64, f64)> {
    if !(youngs_modulus.is_finite() && youngs_modulus > 0.0) {
        return Err(Error::param("youngs_modulus", "must be positive"));
    }
    if poisson_ratio >= 0.5 {
        return Err(Error::Incompressible(poisson_ratio));
    }
    if !(poisson_ratio >= 0.0) {
        return Err(Error::param("poisson_ratio", "must lie in [0, 0.5)"));
    }
    let (e, nu) = (youngs_modulus, poisson_ratio);
    Ok((e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu))))
}

/// Row weights of the displacement (`beta0`), traction (`beta1`) and
/// interior (`beta2`) equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFactors {
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl ScaleFactors {
    /// All three factors multiplied by `c`.
    pub fn scaled(self, c: f64) -> Self {
        Self {
            beta0: self.beta0 * c,
            beta1: self.beta1 * c,
            beta2: self.beta2 * c,
        }
    }
}

pub fn scale_factors(h: f64, h_y: f64, mu: f64) -> ScaleFactors {
    let root = h_y.sqrt();
    ScaleFactors {
        beta0: root / h,
        beta1: 10.0 / mu * root / h,
        beta2: h_y / mu,
    }
}

/// Pointwise boundary data at the boundary evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValues {
    /// Prescribed displacement.
    pub displacement: Vec<[f64; 2]>,
    /// Prescribed traction.
    pub traction: Vec<[f64; 2]>,
    pub kappa0: Vec<f64>,
    pub kappa1: Vec<f64>,
}

impl BoundaryValues {
    /// Pure displacement data.
    pub fn dirichlet(displacement: Vec<[f64; 2]>) -> Self {
        let m = displacement.len();
        Self {
            displacement,
            traction: vec![[0.0; 2]; m],
            kappa0: vec![1.0; m],
            kappa1: vec![0.0; m],
        }
    }

    pub fn len(&self) -> usize {
        self.displacement.len()
    }

    pub fn is_empty(&self) -> bool {
        self.displacement.is_empty()
    }
}

/// Smoothed boundary data curves and blending coefficients, all indexed by
/// the boundary parameter.
#[derive(Debug, Clone)]
pub struct BoundaryConditionSet {
    pub g1: PeriodicCurve,
    pub g2: PeriodicCurve,
    pub h1: PeriodicCurve,
    pub h2: PeriodicCurve,
    pub robin: RobinCoefficients,
}

impl BoundaryConditionSet {
    pub fn values(&self, params: &[f64]) -> Result<BoundaryValues> {
        let g1 = self.g1.sample(params, 0)?;
        let g2 = self.g2.sample(params, 0)?;
        let h1 = self.h1.sample(params, 0)?;
        let h2 = self.h2.sample(params, 0)?;
        let (kappa0, kappa1) = params.iter().map(|&t| robin_eval(&self.robin, t)).unzip();
        Ok(BoundaryValues {
            displacement: g1.into_iter().zip(g2).map(|(a, b)| [a, b]).collect(),
            traction: h1.into_iter().zip(h2).map(|(a, b)| [a, b]).collect(),
            kappa0,
            kappa1,
        })
    }
}

/// Row ranges of the four equation blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    pub interior1: Range<usize>,
    pub interior2: Range<usize>,
    pub boundary1: Range<usize>,
    pub boundary2: Range<usize>,
}

/// Scaled rectangular system `A u = b`.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub betas: ScaleFactors,
    pub layout: BlockLayout,
    /// Unknowns per field component.
    pub n_nodes: usize,
    /// 2 for elasticity, 1 for the scalar problem.
    pub components: usize,
}

impl AssembledSystem {
    pub fn n_rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.matrix.ncols()
    }
}

const INTERIOR_OPS: [DiffSpec; 3] = [
    DiffSpec::SecondPartial(0, 0),
    DiffSpec::SecondPartial(1, 1),
    DiffSpec::SecondPartial(0, 1),
];
const BOUNDARY_OPS: [DiffSpec; 3] = [DiffSpec::Identity, DiffSpec::Partial(0), DiffSpec::Partial(1)];

/// Assembles the elasticity system with the default scale factors of the
/// discretization.
pub fn assemble_system<F>(
    disc: &Discretization,
    material: &Material,
    boundary: &BoundaryValues,
    body_force: F,
    cfg: StencilConfig,
) -> Result<AssembledSystem>
where
    F: Fn([f64; 2]) -> [f64; 2] + Sync,
{
    let builder = OperatorBuilder::new(&disc.nodes, cfg)?;
    let betas = scale_factors(disc.h, disc.h_y, material.mu);
    assemble_system_with(&builder, disc, material, boundary, body_force, betas)
}

/// Assembles on an existing operator builder with explicit scale factors.
pub fn assemble_system_with<F>(
    builder: &OperatorBuilder,
    disc: &Discretization,
    material: &Material,
    boundary: &BoundaryValues,
    body_force: F,
    betas: ScaleFactors,
) -> Result<AssembledSystem>
where
    F: Fn([f64; 2]) -> [f64; 2] + Sync,
{
    let mb = disc.y_boundary.len();
    if boundary.len() != mb || boundary.traction.len() != mb || boundary.kappa0.len() != mb || boundary.kappa1.len() != mb
    {
        return Err(Error::Assembly(format!(
            "{} boundary values for {mb} boundary points",
            boundary.len()
        )));
    }
    if disc.normals.len() != mb {
        return Err(Error::Assembly("one normal per boundary point required".into()));
    }
    let n = builder.config().stencil_size;
    let nn = builder.nodes().len();
    let mi = disc.y_interior.len();
    let rows = 2 * (mi + mb);
    if rows < 2 * nn {
        return Err(Error::Assembly(format!(
            "{rows} equations for {} unknowns",
            2 * nn
        )));
    }
    let width = 2 * n;
    let mut cols = vec![0u32; rows * width];
    let mut vals = vec![0.0; rows * width];
    let mut rhs = vec![0.0; rows];
    let (lam, mu) = (material.lambda, material.mu);

    let mut put = |row: usize, nb: &[usize], c1: &mut dyn FnMut(usize) -> f64, c2: &mut dyn FnMut(usize) -> f64| {
        let base = row * width;
        for k in 0..n {
            cols[base + k] = nb[k] as u32;
            cols[base + n + k] = (nb[k] + nn) as u32;
            vals[base + k] = c1(k);
            vals[base + n + k] = c2(k);
        }
    };

    let b2 = betas.beta2;
    builder.for_each_weights(&disc.y_interior, &INTERIOR_OPS, |l, nb, w| {
        let (wxx, wyy, wxy) = (&w[..n], &w[n..2 * n], &w[2 * n..]);
        put(
            l,
            nb,
            &mut |k| -b2 * ((lam + 2.0 * mu) * wxx[k] + mu * wyy[k]),
            &mut |k| -b2 * (lam + mu) * wxy[k],
        );
        put(
            mi + l,
            nb,
            &mut |k| -b2 * (lam + mu) * wxy[k],
            &mut |k| -b2 * (mu * wxx[k] + (lam + 2.0 * mu) * wyy[k]),
        );
    })?;

    let (b0, b1) = (betas.beta0, betas.beta1);
    let off = 2 * mi;
    builder.for_each_weights(&disc.y_boundary, &BOUNDARY_OPS, |l, nb, w| {
        let (wi, wx, wy) = (&w[..n], &w[n..2 * n], &w[2 * n..]);
        let [n1, n2] = disc.normals[l];
        let d = b0 * boundary.kappa0[l];
        let t = b1 * boundary.kappa1[l];
        put(
            off + l,
            nb,
            &mut |k| d * wi[k] + t * ((lam + 2.0 * mu) * n1 * wx[k] + mu * n2 * wy[k]),
            &mut |k| t * (lam * n1 * wy[k] + mu * n2 * wx[k]),
        );
        put(
            off + mb + l,
            nb,
            &mut |k| t * (mu * n1 * wy[k] + lam * n2 * wx[k]),
            &mut |k| d * wi[k] + t * (mu * n1 * wx[k] + (lam + 2.0 * mu) * n2 * wy[k]),
        );
    })?;

    for l in 0..mi {
        let f = body_force(disc.y_interior.point2(l));
        rhs[l] = b2 * f[0];
        rhs[mi + l] = b2 * f[1];
    }
    for l in 0..mb {
        let (d, t) = (b0 * boundary.kappa0[l], b1 * boundary.kappa1[l]);
        rhs[off + l] = d * boundary.displacement[l][0] + t * boundary.traction[l][0];
        rhs[off + mb + l] = d * boundary.displacement[l][1] + t * boundary.traction[l][1];
    }
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::Assembly("non-finite right-hand side".into()));
    }

    Ok(AssembledSystem {
        matrix: CsrMatrix::fixed_width(rows, 2 * nn, width, cols, vals)?,
        rhs,
        betas,
        layout: BlockLayout {
            interior1: 0..mi,
            interior2: mi..2 * mi,
            boundary1: off..off + mb,
            boundary2: off + mb..off + 2 * mb,
        },
        n_nodes: nn,
        components: 2,
    })
}

/// Scalar problem `Laplacian u = f` inside, `u = g` on the boundary, with the
/// elasticity scaling conventions at unit modulus.
pub fn assemble_poisson<G, F>(
    disc: &Discretization,
    dirichlet: G,
    rhs_fn: F,
    cfg: StencilConfig,
) -> Result<AssembledSystem>
where
    G: Fn(f64, [f64; 2]) -> f64,
    F: Fn([f64; 2]) -> f64,
{
    let builder = OperatorBuilder::new(&disc.nodes, cfg)?;
    let betas = scale_factors(disc.h, disc.h_y, 1.0);
    let n = cfg.stencil_size;
    let nn = disc.nodes.len();
    let (mi, mb) = (disc.y_interior.len(), disc.y_boundary.len());
    let rows = mi + mb;
    if rows < nn {
        return Err(Error::Assembly(format!("{rows} equations for {nn} unknowns")));
    }
    let mut cols = vec![0u32; rows * n];
    let mut vals = vec![0.0; rows * n];
    let mut rhs = vec![0.0; rows];
    let mut put = |row: usize, nb: &[usize], w: &[f64], beta: f64| {
        for k in 0..n {
            cols[row * n + k] = nb[k] as u32;
            vals[row * n + k] = beta * w[k];
        }
    };
    builder.for_each_weights(&disc.y_interior, &[DiffSpec::Laplacian], |l, nb, w| {
        put(l, nb, w, betas.beta2)
    })?;
    builder.for_each_weights(&disc.y_boundary, &[DiffSpec::Identity], |l, nb, w| {
        put(mi + l, nb, w, betas.beta0)
    })?;
    for l in 0..mi {
        rhs[l] = betas.beta2 * rhs_fn(disc.y_interior.point2(l));
    }
    for l in 0..mb {
        rhs[mi + l] = betas.beta0 * dirichlet(disc.boundary_params[l], disc.y_boundary.point2(l));
    }
    Ok(AssembledSystem {
        matrix: CsrMatrix::fixed_width(rows, nn, n, cols, vals)?,
        rhs,
        betas,
        layout: BlockLayout {
            interior1: 0..mi,
            interior2: mi..mi,
            boundary1: mi..mi + mb,
            boundary2: mi + mb..mi + mb,
        },
        n_nodes: nn,
        components: 1,
    })
}

/// Solves the assembled elasticity system, returning nodal `(u1, u2)`.
pub fn solve_least_squares(sys: &AssembledSystem) -> Result<(Vec<f64>, Vec<f64>)> {
    let (x, _) = solve_with_report(sys, SolveMethod::Auto)?;
    let nn = sys.n_nodes;
    if sys.components == 1 {
        return Ok((x, Vec::new()));
    }
    Ok((x[..nn].to_vec(), x[nn..].to_vec()))
}

pub fn solve_with_report(sys: &AssembledSystem, method: SolveMethod) -> Result<(Vec<f64>, SolveReport)> {
    lstsq(&sys.matrix, &sys.rhs, method)
}
