use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::elasticity::{lame_parameters, Material, SolveMethod};
use crate::error::{Error, Result};
use crate::harness::{Domain, ManufacturedField, StudyConfig};
use crate::pointset::DEFAULT_TILT;
use crate::rbffd::StencilConfig;
use crate::smoothing::{RobinCoefficients, DEFAULT_STEEPNESS};

/// What a config describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Benchmark1,
    Benchmark2,
    PoissonCircle,
    PoissonStar,
    Manufactured,
    SmoothOnly,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "benchmark1" => Self::Benchmark1,
            "benchmark2" => Self::Benchmark2,
            "poisson-circle" => Self::PoissonCircle,
            "poisson-star" => Self::PoissonStar,
            "manufactured" => Self::Manufactured,
            "smooth-only" => Self::SmoothOnly,
            _ => return Err(config_err("mode", format!("unknown mode `{s}`"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Benchmark1 => "benchmark1",
            Self::Benchmark2 => "benchmark2",
            Self::PoissonCircle => "poisson-circle",
            Self::PoissonStar => "poisson-star",
            Self::Manufactured => "manufactured",
            Self::SmoothOnly => "smooth-only",
        }
    }

    pub fn is_poisson(self) -> bool {
        matches!(self, Self::PoissonCircle | Self::PoissonStar)
    }
}

/// Geometry used by manufactured runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometrySource {
    Synthetic(Domain),
    /// The configured vertex file.
    Vertices,
}

/// Boundary smoothing settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConfig {
    /// Periodic grid size for geometry and data.
    pub nodes: usize,
    /// Samples drawn from the anchors before fitting.
    pub data_samples: usize,
    pub stencil: StencilConfig,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            nodes: 120,
            data_samples: 80,
            stencil: StencilConfig::quintic_1d(6),
        }
    }
}

/// Input files of the self-referenced benchmarks. `None` falls back to the
/// built-in data set (vertices) or to zero data (anchors).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InputPaths {
    pub vertices: Option<PathBuf>,
    pub g1: Option<PathBuf>,
    pub g2: Option<PathBuf>,
    pub h1: Option<PathBuf>,
    pub h2: Option<PathBuf>,
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub study: StudyConfig,
    /// Spacing and degree of single solves.
    pub h: f64,
    pub p: u32,
    pub smoothing: SmoothingConfig,
    /// Vertex scale; `None` maps the largest coordinate to 0.95.
    pub scale: Option<f64>,
    /// `None` keeps the data set's own blending.
    pub robin: Option<RobinCoefficients>,
    pub solution: ManufacturedField,
    pub geometry: GeometrySource,
    /// Manufactured runs only.
    pub robin_boundary: bool,
    /// Poisson runs: solve the constant-data problem instead of the study
    /// problem.
    pub poisson_constant: Option<f64>,
    pub inputs: InputPaths,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Benchmark1,
            study: StudyConfig::default(),
            h: 0.01,
            p: 5,
            smoothing: SmoothingConfig::default(),
            scale: None,
            robin: None,
            solution: ManufacturedField::Trig,
            geometry: GeometrySource::Synthetic(Domain::Star),
            robin_boundary: false,
            poisson_constant: None,
            inputs: InputPaths::default(),
            output_dir: PathBuf::from("output"),
        }
    }
}

/// Keys accepted in a config file.
pub const KEYS: &[&str] = &[
    "mode",
    "youngs_modulus",
    "poisson_ratio",
    "h",
    "h_list",
    "p",
    "p_list",
    "q",
    "tilt",
    "margin",
    "h_ref",
    "p_ref",
    "solver",
    "record_timing",
    "smoothing_nodes",
    "data_samples",
    "smoothing_degree",
    "smoothing_stencil",
    "scale",
    "transitions",
    "steepness",
    "traction_windows",
    "solution",
    "domain",
    "boundary",
    "poisson_constant",
    "vertices",
    "g1",
    "g2",
    "h1",
    "h2",
    "output_dir",
];

fn config_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Splits `key = value` lines. `#` and `;` start comments, `[section]`
/// headers are ignored, later keys override earlier ones.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(config_err("config", format!("line {}: expected `key = value`", i + 1)));
        };
        let k = k.trim().to_ascii_lowercase();
        if !KEYS.contains(&k.as_str()) {
            return Err(config_err(&k, format!("line {}: unknown key", i + 1)));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

struct Fields<'a> {
    map: &'a BTreeMap<String, String>,
}

impl Fields<'_> {
    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str).filter(|v| !v.is_empty())
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| config_err(key, format!("`{v}`: {e}"))))
            .transpose()
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.split([',', ' '])
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<T>().map_err(|e| config_err(key, format!("`{s}`: {e}"))))
                    .collect()
            })
            .transpose()
    }

    fn positive(&self, key: &str) -> Result<Option<f64>> {
        match self.parse::<f64>(key)? {
            Some(v) if !(v.is_finite() && v > 0.0) => Err(config_err(key, "must be positive")),
            v => Ok(v),
        }
    }

    fn path(&self, key: &str, base: &Path) -> Option<PathBuf> {
        self.get(key).map(|v| base.join(v))
    }
}

fn check_degree(key: &str, p: u32) -> Result<u32> {
    if (2..=6).contains(&p) {
        Ok(p)
    } else {
        Err(config_err(key, format!("degree {p} outside 2..=6")))
    }
}

/// Sorts spacings coarsest first and rejects duplicates.
fn normalize_h_list(mut h: Vec<f64>) -> Result<Vec<f64>> {
    if h.is_empty() {
        return Err(config_err("h_list", "empty"));
    }
    if h.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(config_err("h_list", "spacings must be positive"));
    }
    h.sort_by(|a, b| b.total_cmp(a));
    if h.windows(2).any(|w| w[0] == w[1]) {
        return Err(config_err("h_list", "duplicate spacing"));
    }
    Ok(h)
}

/// Study defaults that depend on the mode.
fn mode_defaults(mode: Mode) -> StudyConfig {
    let mut s = StudyConfig::default();
    match mode {
        Mode::PoissonCircle | Mode::PoissonStar => {
            s.h_list = vec![0.1, 0.05, 0.025, 0.0125];
            s.h_ref = 0.005;
            if mode == Mode::PoissonCircle {
                s.p_list = vec![2, 3, 4];
            } else {
                s.p_list = vec![2, 4, 6];
                s.p_ref = 6;
            }
        }
        _ => {}
    }
    s
}

/// Blending used by manufactured Robin runs when none is configured.
pub fn default_manufactured_robin() -> RobinCoefficients {
    RobinCoefficients::new(vec![1.5, 2.3], DEFAULT_STEEPNESS, vec![0]).expect("valid blending")
}

impl RunConfig {
    /// Parses config text. Relative paths resolve against `base`.
    pub fn from_str_with_base(text: &str, base: &Path) -> Result<Self> {
        let map = parse_pairs(text)?;
        let f = Fields { map: &map };
        let mode = f.get("mode").map(Mode::parse).transpose()?.unwrap_or(Mode::Benchmark1);
        let mut cfg = RunConfig {
            mode,
            study: mode_defaults(mode),
            ..Default::default()
        };

        let e = f.parse::<f64>("youngs_modulus")?.unwrap_or(cfg.study.material.youngs_modulus);
        let nu = f.parse::<f64>("poisson_ratio")?.unwrap_or(cfg.study.material.poisson_ratio);
        if !(e.is_finite() && e > 0.0) {
            return Err(config_err("youngs_modulus", "must be positive"));
        }
        if !(0.0..0.5).contains(&nu) {
            return Err(config_err("poisson_ratio", format!("{nu} outside [0, 0.5)")));
        }
        lame_parameters(e, nu).map_err(|err| config_err("poisson_ratio", err.to_string()))?;
        cfg.study.material = Material::new(e, nu).map_err(|err| config_err("youngs_modulus", err.to_string()))?;

        if let Some(h) = f.list::<f64>("h_list")? {
            cfg.study.h_list = normalize_h_list(h)?;
        }
        if let Some(p) = f.list::<u32>("p_list")? {
            if p.is_empty() {
                return Err(config_err("p_list", "empty"));
            }
            for &d in &p {
                check_degree("p_list", d)?;
            }
            cfg.study.p_list = p;
        }
        if let Some(h) = f.positive("h")? {
            cfg.h = h;
        }
        if let Some(p) = f.parse::<u32>("p")? {
            cfg.p = check_degree("p", p)?;
        }
        if let Some(q) = f.parse::<usize>("q")? {
            if q == 0 {
                return Err(config_err("q", "must be at least 1"));
            }
            cfg.study.q = q;
        }
        cfg.study.tilt = f.parse::<f64>("tilt")?.unwrap_or(DEFAULT_TILT);
        if !cfg.study.tilt.is_finite() {
            return Err(config_err("tilt", "must be finite"));
        }
        cfg.study.margin = f.positive("margin")?;
        if let Some(h) = f.positive("h_ref")? {
            cfg.study.h_ref = h;
        }
        if let Some(p) = f.parse::<u32>("p_ref")? {
            cfg.study.p_ref = check_degree("p_ref", p)?;
        }
        let hmin = *cfg.study.h_list.last().expect("non-empty");
        if matches!(mode, Mode::Benchmark1 | Mode::Benchmark2) || mode.is_poisson() {
            if !(cfg.study.h_ref < hmin / 2.0) {
                return Err(config_err("h_ref", format!("{} is not below half the finest h ({hmin})", cfg.study.h_ref)));
            }
        }
        if let Some(s) = f.get("solver") {
            cfg.study.solver = match s {
                "auto" => SolveMethod::Auto,
                "qr" => SolveMethod::Qr,
                "semi-normal" => SolveMethod::SemiNormal,
                _ => return Err(config_err("solver", format!("unknown solver `{s}`"))),
            };
        }
        if let Some(b) = f.parse::<bool>("record_timing")? {
            cfg.study.record_timing = b;
        }

        if let Some(n) = f.parse::<usize>("smoothing_nodes")? {
            cfg.smoothing.nodes = n;
        }
        if let Some(n) = f.parse::<usize>("data_samples")? {
            if n == 0 {
                return Err(config_err("data_samples", "must be at least 1"));
            }
            cfg.smoothing.data_samples = n;
        }
        if let Some(p) = f.parse::<u32>("smoothing_degree")? {
            if !(1..=10).contains(&p) {
                return Err(config_err("smoothing_degree", format!("degree {p} outside 1..=10")));
            }
            cfg.smoothing.stencil = StencilConfig::quintic_1d(p);
        }
        if let Some(n) = f.parse::<usize>("smoothing_stencil")? {
            cfg.smoothing.stencil = cfg
                .smoothing
                .stencil
                .with_stencil_size(n, 1)
                .map_err(|e| config_err("smoothing_stencil", e.to_string()))?;
        }
        if cfg.smoothing.nodes < cfg.smoothing.stencil.stencil_size {
            return Err(config_err("smoothing_nodes", "fewer nodes than the smoothing stencil"));
        }
        cfg.scale = f.positive("scale")?;

        let transitions = f.list::<f64>("transitions")?;
        let windows = f.list::<usize>("traction_windows")?;
        let steepness = f.positive("steepness")?.unwrap_or(DEFAULT_STEEPNESS);
        if transitions.is_some() || windows.is_some() || f.get("steepness").is_some() {
            let t = transitions.unwrap_or_default();
            let w = windows.unwrap_or_else(|| if t.len() >= 2 { vec![0] } else { Vec::new() });
            cfg.robin = Some(RobinCoefficients::new(t, steepness, w).map_err(|e| match e {
                Error::Parameter { name, reason } => config_err(name, reason),
                e => e,
            })?);
        }

        if let Some(s) = f.get("solution") {
            cfg.solution = ManufacturedField::parse(s)?;
        }
        if let Some(d) = f.get("domain") {
            cfg.geometry = match d {
                "star" => GeometrySource::Synthetic(Domain::Star),
                "circle" => GeometrySource::Synthetic(Domain::Circle),
                "vertices" => GeometrySource::Vertices,
                _ => return Err(config_err("domain", format!("unknown domain `{d}`"))),
            };
        }
        if let Some(b) = f.get("boundary") {
            cfg.robin_boundary = match b {
                "dirichlet" => false,
                "robin" => true,
                _ => return Err(config_err("boundary", format!("unknown boundary mode `{b}`"))),
            };
        }
        if let Some(c) = f.parse::<f64>("poisson_constant")? {
            if !c.is_finite() {
                return Err(config_err("poisson_constant", "must be finite"));
            }
            cfg.poisson_constant = Some(c);
        }

        cfg.inputs = InputPaths {
            vertices: f.path("vertices", base),
            g1: f.path("g1", base),
            g2: f.path("g2", base),
            h1: f.path("h1", base),
            h2: f.path("h2", base),
        };
        for (key, p) in [
            ("vertices", &cfg.inputs.vertices),
            ("g1", &cfg.inputs.g1),
            ("g2", &cfg.inputs.g2),
            ("h1", &cfg.inputs.h1),
            ("h2", &cfg.inputs.h2),
        ] {
            if let Some(p) = p {
                if !p.is_file() {
                    return Err(config_err(key, format!("{} does not exist", p.display())));
                }
            }
        }
        if cfg.geometry == GeometrySource::Vertices && cfg.inputs.vertices.is_none() && mode == Mode::Manufactured {
            return Err(config_err("vertices", "domain = vertices needs a vertex file"));
        }
        if mode == Mode::Benchmark2 && cfg.inputs.vertices.is_some() {
            match &cfg.robin {
                Some(r) if !r.traction_windows().is_empty() => {}
                _ => return Err(config_err("traction_windows", "benchmark2 needs at least one traction window")),
            }
        }
        cfg.output_dir = base.join(f.get("output_dir").unwrap_or("output"));
        Ok(cfg)
    }

    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err("config", format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_str_with_base(&text, base)
    }
}

/// Reads a config file; the front end's entry point for config parsing.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    RunConfig::load(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::from_str_with_base(text, Path::new("."))
    }

    #[test]
    fn empty_config_gives_defaults() {
        let c = parse("").unwrap();
        assert_eq!(c.mode, Mode::Benchmark1);
        assert_eq!(c.study.material.youngs_modulus, 1e5);
        assert_eq!(c.study.material.poisson_ratio, 0.3);
        assert_eq!(c.study.q, 5);
        assert_eq!(c.smoothing.stencil.poly_degree, 6);
        assert_eq!(c.robin, None);
    }

    #[test]
    fn incompressible_ratio_names_field() {
        match parse("poisson_ratio = 0.6") {
            Err(Error::Config { field, .. }) => assert_eq!(field, "poisson_ratio"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn h_list_is_sorted_descending() {
        let a = parse("h_list = 0.04, 0.02, 0.01").unwrap();
        let b = parse("h_list = 0.01 0.02 0.04").unwrap();
        assert_eq!(a.study.h_list, vec![0.04, 0.02, 0.01]);
        assert_eq!(a.study.h_list, b.study.h_list);
        assert!(parse("h_list = 0.02, 0.02").is_err());
    }

    #[test]
    fn comments_sections_and_unknown_keys() {
        let c = parse("[material]\nyoungs_modulus = 2e5 # stiff\n; note\nsteepness = 30\n").unwrap();
        assert_eq!(c.study.material.youngs_modulus, 2e5);
        assert_eq!(c.robin.unwrap().steepness(), 30.0);
        assert!(matches!(parse("colour = red"), Err(Error::Config { field, .. }) if field == "colour"));
        assert!(matches!(parse("p_list = 3, 9"), Err(Error::Config { field, .. }) if field == "p_list"));
        assert!(matches!(parse("q = x"), Err(Error::Config { field, .. }) if field == "q"));
    }

    #[test]
    fn missing_input_file() {
        let r = parse("vertices = /nonexistent/vertices.csv");
        assert!(matches!(r, Err(Error::Config { field, .. }) if field == "vertices"));
    }

    #[test]
    fn reference_must_be_finer() {
        assert!(parse("h_list = 0.04, 0.02\nh_ref = 0.015").is_err());
        assert!(parse("mode = manufactured\nh_list = 0.04, 0.02\nh_ref = 0.015").is_ok());
    }
}
