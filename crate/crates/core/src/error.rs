use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point set: {0}")]
    InvalidNodes(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("stencil centred at node {center} is singular (condition estimate {condition:.3e})")]
    StencilSingular { center: usize, condition: f64 },

    #[error("unsupported differential operator: {0}")]
    UnsupportedOperator(String),

    #[error("degenerate segment between vertices {0} and {1}")]
    DegenerateSegment(usize, usize),

    #[error("constrained periodic fit is singular: {0}")]
    FitSingular(String),

    #[error("scaled geometry leaves [-1,1]^2: max |coordinate| = {0}")]
    ScaleOutOfRange(f64),

    #[error("degenerate tangent at t = {0}")]
    DegenerateTangent(f64),

    #[error("no evaluation points inside the geometry")]
    EmptyDomain,

    #[error("incompressible material: poisson ratio {0} must be < 0.5")]
    Incompressible(f64),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("least-squares solve failed: {reason} (condition estimate {condition:.3e}, relative normal residual {residual:.3e})")]
    Solver {
        reason: String,
        condition: f64,
        residual: f64,
    },

    #[error("division by zero norm: {0}")]
    ZeroNorm(String),

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("parse error in {path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable tag, used by the command-line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidNodes(_) => "invalid_nodes",
            Error::Size(_) => "size",
            Error::Parameter { .. } => "parameter",
            Error::StencilSingular { .. } => "stencil_singular",
            Error::UnsupportedOperator(_) => "unsupported_operator",
            Error::DegenerateSegment(..) => "degenerate_segment",
            Error::FitSingular(_) => "fit_singular",
            Error::ScaleOutOfRange(_) => "scale_out_of_range",
            Error::DegenerateTangent(_) => "degenerate_tangent",
            Error::EmptyDomain => "empty_domain",
            Error::Incompressible(_) => "incompressible",
            Error::Assembly(_) => "assembly",
            Error::Solver { .. } => "solver",
            Error::ZeroNorm(_) => "zero_norm",
            Error::Config { .. } => "config",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
