use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::elasticity::{
    assemble_poisson, assemble_system_with, evaluate_field, evaluate_scalar, lstsq_owned, scale_factors,
    BoundaryConditionSet, BoundaryValues, ElasticField, Material, SolveMethod, SolveReport,
};
use crate::error::{Error, Result};
use crate::pointset::{Discretization, DiscretizationParams, DEFAULT_TILT};
use crate::rbffd::{NodeSet, OperatorBuilder, StencilConfig};
use crate::smoothing::{
    smooth_boundary_on, synth_boundary_data, BoundaryGeometry, DataAnchors, PeriodicGrid, RobinCoefficients,
};

use super::output::{write_convergence_csv, write_spatial_csv, ConvergenceRecord, SpatialRow};
use super::{estimate_order, relative_error, Domain, ErrorReport, ManufacturedField, ORDER_TAIL};

/// Refinement grid and shared discretization settings of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    /// Background grid spacings, coarsest first.
    pub h_list: Vec<f64>,
    pub p_list: Vec<u32>,
    pub q: usize,
    pub tilt: f64,
    pub margin: Option<f64>,
    pub material: Material,
    /// Self-reference spacing and degree.
    pub h_ref: f64,
    pub p_ref: u32,
    /// Store measured run times in the table; otherwise the column is 0 so
    /// that tables are reproducible byte for byte.
    pub record_timing: bool,
    pub solver: SolveMethod,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            h_list: vec![0.04, 0.02, 0.01, 0.005],
            p_list: vec![3, 4, 5],
            q: 5,
            tilt: DEFAULT_TILT,
            margin: None,
            material: Material::default(),
            h_ref: 0.002,
            p_ref: 5,
            record_timing: false,
            solver: SolveMethod::Auto,
        }
    }
}

impl StudyConfig {
    fn validate(&self, self_reference: bool) -> Result<()> {
        if self.h_list.is_empty() || self.p_list.is_empty() {
            return Err(Error::param("h_list", "study needs at least one h and one p"));
        }
        if self.h_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::param("h_list", "must be strictly decreasing"));
        }
        if let Some(&p) = self.p_list.iter().find(|&&p| !(2..=6).contains(&p)) {
            return Err(Error::param("p_list", format!("degree {p} outside 2..=6")));
        }
        let hmin = *self.h_list.last().unwrap();
        if self_reference && !(self.h_ref < hmin / 2.0) {
            return Err(Error::param("h_ref", "must be below half the finest h"));
        }
        Ok(())
    }

    fn params(&self, h: f64, cfg: &StencilConfig) -> DiscretizationParams {
        DiscretizationParams {
            h,
            q: self.q,
            tilt: self.tilt,
            stencil_size: cfg.stencil_size,
            margin: self.margin,
        }
    }
}

/// Boundary treatment for manufactured runs.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryMode {
    Dirichlet,
    Robin(RobinCoefficients),
}

/// Solved discretization, kept for evaluation at other point sets.
#[derive(Debug, Clone)]
pub struct CaseSolution {
    pub disc: Discretization,
    pub builder: OperatorBuilder,
    pub material: Material,
    pub nodal_u1: Vec<f64>,
    /// Empty for scalar problems.
    pub nodal_u2: Vec<f64>,
    /// Solution at the discretization's own evaluation points, interior
    /// first.
    pub field: ElasticField,
    pub report: SolveReport,
    pub wall_ms: u64,
}

impl CaseSolution {
    pub fn is_scalar(&self) -> bool {
        self.nodal_u2.is_empty()
    }

    /// Evaluates the solution at `points` with its own stencils. Scalar
    /// solutions fill only `u1`.
    pub fn evaluate_at(&self, points: &NodeSet) -> Result<ElasticField> {
        if self.is_scalar() {
            let u = evaluate_scalar(&self.builder, points, &self.nodal_u1)?;
            return Ok(scalar_field(points, u));
        }
        evaluate_field(&self.builder, points, &self.nodal_u1, &self.nodal_u2, &self.material)
    }
}

fn scalar_field(points: &NodeSet, u: Vec<f64>) -> ElasticField {
    ElasticField {
        points: (0..points.len()).map(|l| points.point2(l)).collect(),
        u1: u,
        u2: Vec::new(),
        strain: Vec::new(),
        stress: Vec::new(),
        von_mises: Vec::new(),
    }
}

/// Node position of every unknown, components stacked.
fn column_points(disc: &Discretization, components: usize) -> Vec<[f64; 2]> {
    let nodes: Vec<[f64; 2]> = (0..disc.nodes.len()).map(|i| disc.nodes.point2(i)).collect();
    nodes.iter().copied().cycle().take(components * nodes.len()).collect()
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// Discretizes, assembles and solves one elasticity problem.
pub fn solve_case<B, F>(
    geom: &BoundaryGeometry,
    h: f64,
    p: u32,
    cfg: &StudyConfig,
    boundary: B,
    body_force: F,
) -> Result<CaseSolution>
where
    B: Fn(&Discretization) -> Result<BoundaryValues>,
    F: Fn([f64; 2]) -> [f64; 2] + Sync,
{
    let start = Instant::now();
    let stencil = StencilConfig::cubic_2d(p);
    let disc = Discretization::build(geom, cfg.params(h, &stencil))?;
    let builder = OperatorBuilder::new(&disc.nodes, stencil)?;
    let bv = boundary(&disc)?;
    let betas = scale_factors(disc.h, disc.h_y, cfg.material.mu);
    let sys = assemble_system_with(&builder, &disc, &cfg.material, &bv, body_force, betas)?;
    let pts = column_points(&disc, 2);
    let (x, report) = lstsq_owned(sys.matrix, &sys.rhs, cfg.solver, Some(&pts))?;
    let nn = disc.nodes.len();
    let (u1, u2) = (x[..nn].to_vec(), x[nn..].to_vec());
    let field = evaluate_field(&builder, &disc.eval_points(), &u1, &u2, &cfg.material)?;
    Ok(CaseSolution {
        disc,
        builder,
        material: cfg.material,
        nodal_u1: u1,
        nodal_u2: u2,
        field,
        report,
        wall_ms: elapsed_ms(start),
    })
}

/// Discretizes and solves `Laplacian u = rhs` with `u = g(t, y)` on the
/// boundary.
pub fn solve_poisson_case<G, R>(
    geom: &BoundaryGeometry,
    h: f64,
    p: u32,
    cfg: &StudyConfig,
    dirichlet: G,
    rhs: R,
) -> Result<CaseSolution>
where
    G: Fn(f64, [f64; 2]) -> f64,
    R: Fn([f64; 2]) -> f64,
{
    let start = Instant::now();
    let stencil = StencilConfig::cubic_2d(p);
    let disc = Discretization::build(geom, cfg.params(h, &stencil))?;
    let sys = assemble_poisson(&disc, dirichlet, rhs, stencil)?;
    let pts = column_points(&disc, 1);
    let (u, report) = lstsq_owned(sys.matrix, &sys.rhs, cfg.solver, Some(&pts))?;
    let builder = OperatorBuilder::new(&disc.nodes, stencil)?;
    let eval = disc.eval_points();
    let values = evaluate_scalar(&builder, &eval, &u)?;
    Ok(CaseSolution {
        field: scalar_field(&eval, values),
        disc,
        builder,
        material: cfg.material,
        nodal_u1: u,
        nodal_u2: Vec::new(),
        report,
        wall_ms: elapsed_ms(start),
    })
}

/// Tables, spatial dumps and the finest solution of a study.
#[derive(Debug, Clone)]
pub struct StudyResult {
    pub name: String,
    /// Grouped by `p`, coarsest `h` first within a group.
    pub records: Vec<ConvergenceRecord>,
    /// Spatial error dump of the finest run for every `p`.
    pub spatial: Vec<(u32, Vec<SpatialRow>)>,
    /// Measured run times, `(h, p, ms)`.
    pub timings: Vec<(f64, u32, u64)>,
    /// Reference or finest solution.
    pub solution: Option<CaseSolution>,
}

impl StudyResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            records: Vec::new(),
            spatial: Vec::new(),
            timings: Vec::new(),
            solution: None,
        }
    }

    fn push(&mut self, cfg: &StudyConfig, h: f64, p: u32, n_nodes: usize, report: &ErrorReport, wall_ms: u64) {
        self.timings.push((h, p, wall_ms));
        let mut rec = ConvergenceRecord {
            h,
            n_nodes,
            p,
            err: [report.err_u1, report.err_u2, report.err_vm],
            order: [f64::NAN; 3],
            converging: [false; 3],
            wall_ms: if cfg.record_timing { wall_ms } else { 0 },
        };
        let same_p: Vec<&ConvergenceRecord> = self.records.iter().filter(|r| r.p == p).collect();
        if same_p.len() + 1 >= ORDER_TAIL {
            let hs: Vec<f64> = same_p.iter().map(|r| r.h).chain([h]).collect();
            for f in 0..3 {
                let es: Vec<f64> = same_p.iter().map(|r| r.err[f]).chain([rec.err[f]]).collect();
                if let Ok(est) = estimate_order(&hs, &es) {
                    rec.order[f] = est.order;
                    rec.converging[f] = est.converging;
                }
            }
        }
        self.records.push(rec);
    }

    /// Final tail order per `p`: `(p, orders, converging)`.
    pub fn final_orders(&self) -> Vec<(u32, [f64; 3], [bool; 3])> {
        let mut ps: Vec<u32> = self.records.iter().map(|r| r.p).collect();
        ps.dedup();
        ps.into_iter()
            .filter_map(|p| {
                let last = self.records.iter().filter(|r| r.p == p).last()?;
                Some((p, last.order, last.converging))
            })
            .collect()
    }

    pub fn summary(&self) -> String {
        let mut s = format!("study: {}\n", self.name);
        for (h, p, ms) in &self.timings {
            let _ = writeln!(s, "run h={h} p={p}: {ms} ms");
        }
        for (p, order, conv) in self.final_orders() {
            let label = |k: usize| {
                if order[k].is_nan() {
                    "n/a".to_string()
                } else if conv[k] {
                    format!("{:.3}", order[k])
                } else {
                    format!("{:.3} (not converging)", order[k])
                }
            };
            let _ = writeln!(s, "p={p}: order u1 {}, u2 {}, von Mises {}", label(0), label(1), label(2));
        }
        s
    }

    /// Writes `convergence.csv`, `spatial_p{p}.csv` and `summary.txt`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        write_convergence_csv(&dir.join("convergence.csv"), &self.records)?;
        for (p, rows) in &self.spatial {
            write_spatial_csv(&dir.join(format!("spatial_p{p}.csv")), rows)?;
        }
        let path = dir.join("summary.txt");
        std::fs::write(&path, self.summary()).map_err(|source| Error::Io { path, source })
    }
}

fn spatial_rows(reference: &ElasticField, report: &ErrorReport) -> Vec<SpatialRow> {
    let scalar = reference.u2.is_empty();
    (0..reference.len())
        .map(|i| SpatialRow {
            point: reference.points[i],
            u1: reference.u1[i],
            u2: if scalar { 0.0 } else { reference.u2[i] },
            von_mises: if scalar { 0.0 } else { reference.von_mises[i] },
            err: report.pointwise[i],
        })
        .collect()
}

/// Exact field values at the discretization's evaluation points.
fn exact_field(field: ManufacturedField, disc: &Discretization, m: &Material) -> ElasticField {
    let pts = disc.eval_points();
    let points: Vec<[f64; 2]> = (0..pts.len()).map(|l| pts.point2(l)).collect();
    let grads: Vec<[f64; 4]> = points.iter().map(|&y| field.gradient(y)).collect();
    let u: Vec<[f64; 2]> = points.iter().map(|&y| field.displacement(y)).collect();
    ElasticField::from_gradients(
        points,
        u.iter().map(|v| v[0]).collect(),
        u.iter().map(|v| v[1]).collect(),
        &grads,
        m,
    )
}

/// Convergence of a manufactured solution against its exact values at each
/// run's own evaluation points.
pub fn run_manufactured(
    field: ManufacturedField,
    geom: &BoundaryGeometry,
    mode: &BoundaryMode,
    cfg: &StudyConfig,
) -> Result<StudyResult> {
    cfg.validate(false)?;
    let robin = match mode {
        BoundaryMode::Dirichlet => None,
        BoundaryMode::Robin(rc) => Some(rc),
    };
    let name = format!(
        "manufactured {} ({})",
        field.name(),
        if robin.is_some() { "robin" } else { "dirichlet" }
    );
    let mut out = StudyResult::new(&name);
    let m = cfg.material;
    for &p in &cfg.p_list {
        for (i, &h) in cfg.h_list.iter().enumerate() {
            let sol = solve_case(
                geom,
                h,
                p,
                cfg,
                |d| Ok(field.boundary_values(d, &m, robin)),
                |y| field.body_force(y, &m),
            )?;
            let exact = exact_field(field, &sol.disc, &m);
            let report = ErrorReport::compare(
                [&sol.field.u1, &sol.field.u2, &sol.field.von_mises],
                [&exact.u1, &exact.u2, &exact.von_mises],
            )
            .or_else(|e| match e {
                // stress-free fields: report absolute von Mises error
                Error::ZeroNorm(_) => ErrorReport::compare(
                    [&sol.field.u1, &sol.field.u2, &[]],
                    [&exact.u1, &exact.u2, &[]],
                ),
                e => Err(e),
            })?;
            out.push(cfg, h, p, sol.disc.n_nodes(), &report, sol.wall_ms);
            if i + 1 == cfg.h_list.len() {
                out.spatial.push((p, spatial_rows(&exact, &report)));
                out.solution = Some(sol);
            }
        }
    }
    Ok(out)
}

/// Geometry, boundary data and blending for the self-referenced benchmarks.
#[derive(Debug, Clone)]
pub struct BenchmarkInputs {
    /// Raw boundary polygon.
    pub vertices: Vec<[f64; 2]>,
    /// Factor mapping the vertices into `[-1, 1]^2`.
    pub scale: f64,
    pub g1: DataAnchors,
    pub g2: DataAnchors,
    pub h1: DataAnchors,
    pub h2: DataAnchors,
    pub robin: RobinCoefficients,
    /// Smoothing grid size.
    pub smoothing_nodes: usize,
    /// Samples drawn from the anchors before smoothing.
    pub data_samples: usize,
    pub smoothing: StencilConfig,
}

impl BenchmarkInputs {
    pub fn geometry(&self) -> Result<BoundaryGeometry> {
        let grid = PeriodicGrid::new(self.smoothing_nodes, self.smoothing)?;
        smooth_boundary_on(&self.vertices, self.scale, &grid)
    }

    pub fn conditions(&self, robin: RobinCoefficients) -> Result<BoundaryConditionSet> {
        let grid = PeriodicGrid::new(self.smoothing_nodes, self.smoothing)?;
        let fit = |a: &DataAnchors| synth_boundary_data(a, self.data_samples, &grid);
        Ok(BoundaryConditionSet {
            g1: fit(&self.g1)?,
            g2: fit(&self.g2)?,
            h1: fit(&self.h1)?,
            h2: fit(&self.h2)?,
            robin,
        })
    }
}

/// Self-referenced convergence with smoothed boundary data and `f = 0`.
pub fn run_benchmark(name: &str, geom: &BoundaryGeometry, bcs: &BoundaryConditionSet, cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.validate(true)?;
    let data = |d: &Discretization| bcs.values(&d.boundary_params);
    let zero = |_: [f64; 2]| [0.0; 2];
    let reference = solve_case(geom, cfg.h_ref, cfg.p_ref, cfg, data, zero)?;
    let ref_field = reference.field.clone();
    let mut out = StudyResult::new(name);
    for &p in &cfg.p_list {
        for (i, &h) in cfg.h_list.iter().enumerate() {
            let sol = solve_case(geom, h, p, cfg, data, zero)?;
            let report = relative_error(&sol, &ref_field)?;
            out.push(cfg, h, p, sol.disc.n_nodes(), &report, sol.wall_ms);
            if i + 1 == cfg.h_list.len() {
                out.spatial.push((p, spatial_rows(&ref_field, &report)));
            }
        }
    }
    out.solution = Some(reference);
    Ok(out)
}

/// Pure displacement conditions.
pub fn run_benchmark_1(inputs: &BenchmarkInputs, cfg: &StudyConfig) -> Result<StudyResult> {
    let geom = inputs.geometry()?;
    let bcs = inputs.conditions(RobinCoefficients::dirichlet())?;
    run_benchmark("benchmark 1 (dirichlet)", &geom, &bcs, cfg)
}

/// Blended displacement/traction conditions.
pub fn run_benchmark_2(inputs: &BenchmarkInputs, cfg: &StudyConfig) -> Result<StudyResult> {
    let geom = inputs.geometry()?;
    let bcs = inputs.conditions(inputs.robin.clone())?;
    run_benchmark("benchmark 2 (robin)", &geom, &bcs, cfg)
}

/// Scalar study problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoissonCase {
    /// `Laplacian u = cos(2 pi x y)`, `u = sin(theta)` on the boundary.
    Study,
    /// `Laplacian u = 0`, `u = c` on the boundary.
    Constant(f64),
}

impl PoissonCase {
    pub fn rhs(&self, [x, y]: [f64; 2]) -> f64 {
        match self {
            Self::Study => (2.0 * std::f64::consts::PI * x * y).cos(),
            Self::Constant(_) => 0.0,
        }
    }

    pub fn boundary(&self, [x, y]: [f64; 2]) -> f64 {
        match *self {
            Self::Study => y.atan2(x).sin(),
            Self::Constant(c) => c,
        }
    }
}

/// Self-referenced convergence of the scalar problem on a synthetic domain.
pub fn run_poisson_study(domain: Domain, case: PoissonCase, geom: &BoundaryGeometry, cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.validate(true)?;
    let solve = |h: f64, p: u32| {
        solve_poisson_case(geom, h, p, cfg, |_, y| case.boundary(y), |y| case.rhs(y))
    };
    let reference = solve(cfg.h_ref, cfg.p_ref)?;
    let ref_field = reference.field.clone();
    let ref_points = NodeSet::from_points_2d(&ref_field.points)?;
    let mut out = StudyResult::new(&format!("poisson {}", domain.name()));
    for &p in &cfg.p_list {
        for (i, &h) in cfg.h_list.iter().enumerate() {
            let sol = solve(h, p)?;
            let c = sol.evaluate_at(&ref_points)?;
            let report = ErrorReport::compare([&c.u1, &[], &[]], [&ref_field.u1, &[], &[]])?;
            out.push(cfg, h, p, sol.disc.n_nodes(), &report, sol.wall_ms);
            if i + 1 == cfg.h_list.len() {
                out.spatial.push((p, spatial_rows(&ref_field, &report)));
            }
        }
    }
    out.solution = Some(reference);
    Ok(out)
}
