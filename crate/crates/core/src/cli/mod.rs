//! Config format, file I/O and the `meshless` command-line driver.

mod config;
mod io;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::harness::{
    relative_l2, run_benchmark_1, run_benchmark_2, run_manufactured, run_poisson_study, solve_case,
    solve_poisson_case, BenchmarkInputs, BoundaryMode, CaseSolution, Domain, ManufacturedField, PoissonCase,
    StudyResult,
};
use crate::rbffd::StencilConfig;
use crate::smoothing::{smooth_boundary, BoundaryGeometry, DataAnchors, RobinCoefficients};

pub use config::{
    default_manufactured_robin, parse_config, parse_pairs, GeometrySource, InputPaths, Mode, RunConfig,
    SmoothingConfig, KEYS,
};
pub use io::{
    auto_scale, builtin_dataset, curve_csv, parse_pairs_csv, read_anchors, read_vertices, solution_csv,
    write_text, BuiltinDataset, CURVE_HEADER, DIAPHRAGM_SCALE, DIAPHRAGM_TRACTION_WINDOW, SOLUTION_HEADER,
};

/// Smoothing grid used for the synthetic circle and star.
pub const SYNTHETIC_SMOOTHING_NODES: usize = 512;

#[derive(Debug, Parser)]
#[command(name = "meshless", version, about = "Unfitted RBF-FD least-squares elasticity solver")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Reserved; every algorithm is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DomainArg {
    Circle,
    Star,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Smooth a closed vertex polygon and sample the curve with normals.
    SmoothGeometry {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Vertex scale; by default the largest coordinate maps to 0.95.
        #[arg(long)]
        scale: Option<f64>,
        /// Periodic smoothing grid size.
        #[arg(long, default_value_t = 120)]
        nodes: usize,
        /// Polynomial degree of the smoothing stencils.
        #[arg(long, default_value_t = 6)]
        degree: u32,
        /// Output samples, uniform in arclength.
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Single solve at the configured `h` and `p`.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence study of the configured mode.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scalar Poisson study on a synthetic domain.
    PoissonStudy {
        #[arg(long, value_enum)]
        domain: DomainArg,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Manufactured-solution convergence study.
    Manufactured {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Field name: translation, rotation, linear, harmonic or trig.
        #[arg(long)]
        solution: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the driver on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match configure_threads().and_then(|_| dispatch(cli.command)) {
        Ok(msg) => {
            print!("{msg}");
            0
        }
        Err(e) => {
            eprintln!("{}", error_line(&e));
            1
        }
    }
}

/// `error: kind=<tag> <message>` on one line.
pub fn error_line(e: &Error) -> String {
    let msg = e.to_string().replace(['\n', '\r'], " ");
    match e {
        Error::Config { field, .. } => format!("error: kind=config field={field} {msg}"),
        _ => format!("error: kind={} {msg}", e.kind()),
    }
}

/// Applies `MESHLESS_THREADS` (0 or unset = all cores).
fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("MESHLESS_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| Error::Config {
        field: "MESHLESS_THREADS".into(),
        reason: format!("`{v}` is not a thread count"),
    })?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cmd: Command) -> Result<String> {
    match cmd {
        Command::SmoothGeometry {
            input,
            out,
            scale,
            nodes,
            degree,
            samples,
        } => smooth_geometry(&input, &out, scale, nodes, degree, samples),
        Command::Solve { config, out } => {
            let cfg = with_output(parse_config(&config)?, out);
            solve(&cfg)
        }
        Command::Converge { config, out } => {
            let cfg = with_output(parse_config(&config)?, out);
            converge(&cfg)
        }
        Command::PoissonStudy { domain, config, out } => {
            let mode = match domain {
                DomainArg::Circle => "mode = poisson-circle\n",
                DomainArg::Star => "mode = poisson-star\n",
            };
            let cfg = with_output(config_with_mode(config.as_deref(), mode)?, out);
            converge(&cfg)
        }
        Command::Manufactured { config, solution, out } => {
            let mut cfg = with_output(config_with_mode(config.as_deref(), "mode = manufactured\n")?, out);
            if let Some(s) = solution {
                cfg.solution = ManufacturedField::parse(&s)?;
            }
            converge(&cfg)
        }
    }
}

fn with_output(mut cfg: RunConfig, out: Option<PathBuf>) -> RunConfig {
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    cfg
}

/// Loads an optional config and forces its mode.
fn config_with_mode(path: Option<&Path>, mode_line: &str) -> Result<RunConfig> {
    let (text, base) = match path {
        Some(p) => (
            std::fs::read_to_string(p).map_err(|e| Error::Config {
                field: "config".into(),
                reason: format!("cannot read {}: {e}", p.display()),
            })?,
            p.parent().unwrap_or(Path::new(".")).to_path_buf(),
        ),
        None => (String::new(), PathBuf::from(".")),
    };
    let text: String = text
        .lines()
        .filter(|l| !l.trim_start().to_ascii_lowercase().starts_with("mode"))
        .map(|l| format!("{l}\n"))
        .collect();
    RunConfig::from_str_with_base(&format!("{mode_line}{text}"), &base)
}

fn smooth_geometry(input: &Path, out: &Path, scale: Option<f64>, nodes: usize, degree: u32, samples: usize) -> Result<String> {
    if samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    let vertices = read_vertices(input)?;
    let scale = match scale {
        Some(s) => s,
        None => auto_scale(&vertices)?,
    };
    let geom = smooth_boundary(&vertices, scale, nodes, StencilConfig::new(degree, 1, 5)?)?;
    write_text(out, &curve_csv(&geom, samples)?)?;
    Ok(format!("wrote {samples} curve samples to {}\n", out.display()))
}

fn synthetic_geometry(domain: Domain, cfg: &RunConfig) -> Result<BoundaryGeometry> {
    domain.geometry(SYNTHETIC_SMOOTHING_NODES, cfg.smoothing.stencil)
}

/// Vertices, anchors and blending of a benchmark config.
pub fn benchmark_inputs(cfg: &RunConfig) -> Result<BenchmarkInputs> {
    let builtin = cfg.inputs.vertices.is_none().then(builtin_dataset);
    let vertices = match (&cfg.inputs.vertices, &builtin) {
        (Some(p), _) => read_vertices(p)?,
        (None, Some(b)) => b.vertices.clone(),
        (None, None) => unreachable!(),
    };
    let scale = match (cfg.scale, &builtin) {
        (Some(s), _) => s,
        (None, Some(b)) => b.scale,
        (None, None) => auto_scale(&vertices)?,
    };
    let anchor = |path: &Option<PathBuf>, pick: fn(&BuiltinDataset) -> &DataAnchors| -> Result<DataAnchors> {
        match (path, &builtin) {
            (Some(p), _) => read_anchors(p),
            (None, Some(b)) => Ok(pick(b).clone()),
            (None, None) => Ok(DataAnchors::constant(0.0)),
        }
    };
    let robin = match (&cfg.robin, &builtin) {
        (Some(r), _) => r.clone(),
        (None, Some(b)) => b.robin.clone(),
        (None, None) => RobinCoefficients::dirichlet(),
    };
    Ok(BenchmarkInputs {
        vertices,
        scale,
        g1: anchor(&cfg.inputs.g1, |b| &b.g1)?,
        g2: anchor(&cfg.inputs.g2, |b| &b.g2)?,
        h1: anchor(&cfg.inputs.h1, |b| &b.h1)?,
        h2: anchor(&cfg.inputs.h2, |b| &b.h2)?,
        robin,
        smoothing_nodes: cfg.smoothing.nodes,
        data_samples: cfg.smoothing.data_samples,
        smoothing: cfg.smoothing.stencil,
    })
}

fn manufactured_geometry(cfg: &RunConfig) -> Result<BoundaryGeometry> {
    match cfg.geometry {
        GeometrySource::Synthetic(d) => synthetic_geometry(d, cfg),
        GeometrySource::Vertices => benchmark_inputs(cfg)?.geometry(),
    }
}

fn manufactured_mode(cfg: &RunConfig) -> BoundaryMode {
    if cfg.robin_boundary {
        BoundaryMode::Robin(cfg.robin.clone().unwrap_or_else(default_manufactured_robin))
    } else {
        BoundaryMode::Dirichlet
    }
}

fn poisson_setup(cfg: &RunConfig) -> (Domain, PoissonCase) {
    let domain = if cfg.mode == Mode::PoissonCircle { Domain::Circle } else { Domain::Star };
    let case = cfg.poisson_constant.map_or(PoissonCase::Study, PoissonCase::Constant);
    (domain, case)
}

/// Runs the study of `cfg.mode` and writes its tables under the output
/// directory.
pub fn run_study(cfg: &RunConfig) -> Result<StudyResult> {
    let study = &cfg.study;
    match cfg.mode {
        Mode::Benchmark1 => run_benchmark_1(&benchmark_inputs(cfg)?, study),
        Mode::Benchmark2 => run_benchmark_2(&benchmark_inputs(cfg)?, study),
        Mode::Manufactured => run_manufactured(cfg.solution, &manufactured_geometry(cfg)?, &manufactured_mode(cfg), study),
        Mode::PoissonCircle | Mode::PoissonStar => {
            let (domain, case) = poisson_setup(cfg);
            run_poisson_study(domain, case, &synthetic_geometry(domain, cfg)?, study)
        }
        Mode::SmoothOnly => Err(Error::Config {
            field: "mode".into(),
            reason: "smooth-only has no convergence study".into(),
        }),
    }
}

fn converge(cfg: &RunConfig) -> Result<String> {
    let result = run_study(cfg)?;
    result.write(&cfg.output_dir)?;
    Ok(format!("{}wrote {}\n", result.summary(), cfg.output_dir.display()))
}

/// Single solve of `cfg.mode` at `(cfg.h, cfg.p)`.
pub fn solve_single(cfg: &RunConfig) -> Result<(CaseSolution, String)> {
    let (h, p, study) = (cfg.h, cfg.p, &cfg.study);
    let mut notes = String::new();
    let sol = match cfg.mode {
        Mode::Benchmark1 | Mode::Benchmark2 => {
            let inputs = benchmark_inputs(cfg)?;
            let robin = if cfg.mode == Mode::Benchmark1 {
                RobinCoefficients::dirichlet()
            } else {
                inputs.robin.clone()
            };
            let bcs = inputs.conditions(robin)?;
            solve_case(&inputs.geometry()?, h, p, study, |d| bcs.values(&d.boundary_params), |_| [0.0; 2])?
        }
        Mode::Manufactured => {
            let field = cfg.solution;
            let m = study.material;
            let mode = manufactured_mode(cfg);
            let robin = match &mode {
                BoundaryMode::Robin(r) => Some(r),
                BoundaryMode::Dirichlet => None,
            };
            let sol = solve_case(
                &manufactured_geometry(cfg)?,
                h,
                p,
                study,
                |d| Ok(field.boundary_values(d, &m, robin)),
                |y| field.body_force(y, &m),
            )?;
            let exact: Vec<[f64; 2]> = sol.field.points.iter().map(|&y| field.displacement(y)).collect();
            let e1 = relative_l2(&sol.field.u1, &exact.iter().map(|v| v[0]).collect::<Vec<_>>());
            let e2 = relative_l2(&sol.field.u2, &exact.iter().map(|v| v[1]).collect::<Vec<_>>());
            let fmt = |e: Result<f64>| e.map_or("n/a".to_string(), |v| format!("{v:.6e}"));
            let _ = writeln!(notes, "err_u1={}\nerr_u2={}", fmt(e1), fmt(e2));
            sol
        }
        Mode::PoissonCircle | Mode::PoissonStar => {
            let (domain, case) = poisson_setup(cfg);
            let geom = synthetic_geometry(domain, cfg)?;
            solve_poisson_case(&geom, h, p, study, |_, y| case.boundary(y), |y| case.rhs(y))?
        }
        Mode::SmoothOnly => unreachable!("handled by the caller"),
    };
    Ok((sol, notes))
}

fn solve(cfg: &RunConfig) -> Result<String> {
    let dir = &cfg.output_dir;
    if cfg.mode == Mode::SmoothOnly {
        let geom = if cfg.inputs.vertices.is_some() {
            benchmark_inputs(cfg)?.geometry()?
        } else {
            match cfg.geometry {
                GeometrySource::Synthetic(d) => synthetic_geometry(d, cfg)?,
                GeometrySource::Vertices => benchmark_inputs(cfg)?.geometry()?,
            }
        };
        let path = dir.join("curve.csv");
        write_text(&path, &curve_csv(&geom, 400)?)?;
        return Ok(format!("wrote {}\n", path.display()));
    }
    let (sol, notes) = solve_single(cfg)?;
    write_text(&dir.join("solution.csv"), &solution_csv(&sol.field))?;
    let mut s = String::new();
    let _ = writeln!(s, "mode={}", cfg.mode.name());
    let _ = writeln!(s, "h={}\np={}", cfg.h, cfg.p);
    let _ = writeln!(s, "nodes={}\nevaluation_points={}", sol.disc.n_nodes(), sol.disc.n_eval());
    let _ = writeln!(s, "measured_h={:.6e}\nmeasured_h_y={:.6e}", sol.disc.h, sol.disc.h_y);
    let _ = writeln!(s, "residual_norm={:.6e}", sol.report.residual_norm);
    let _ = writeln!(s, "normal_residual={:.6e}", sol.report.normal_residual);
    s.push_str(&notes);
    write_text(&dir.join("summary.txt"), &s)?;
    Ok(format!("{s}wrote {}\n", dir.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_lines_are_single_line() {
        let e = Error::Config {
            field: "poisson_ratio".into(),
            reason: "bad\nvalue".into(),
        };
        let line = error_line(&e);
        assert!(line.starts_with("error: kind=config field=poisson_ratio"));
        assert!(!line.contains('\n'));
    }

    #[test]
    fn usage_exit_codes() {
        assert_eq!(run(["meshless"]), 2);
        assert_eq!(run(["meshless", "frobnicate"]), 2);
    }
}
