use thiserror::Error;

use crate::parametrix::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid N-function: {0}")]
    InvalidYoung(String),
    #[error("supremum not attained inside the search window at v = {v}")]
    WindowOverflow { v: f64 },
    #[error("value {y} exceeds the trusted range (max {max})")]
    Range { y: f64, max: f64 },
    #[error("unstable limsup estimate: h-trace is not monotone")]
    UnstableLimsup { trace: Vec<(f64, f64)> },
    #[error("no reflexive embedding window (alpha = {alpha}, beta = {beta})")]
    NoReflexiveWindow { alpha: f64, beta: f64 },
    #[error("norm bracket failed: {0}")]
    Bracket(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("operator is not elliptic: {0}")]
    NotElliptic(String),
    #[error("unsupported: {0}")]
    Capability(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("kernel calibration failed (residual {residual:.3e})")]
    Calibration { residual: f64 },
    #[error("Neumann iteration diverged after {} iterations", report.iterations.len())]
    Divergence { report: Box<SolveReport> },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
