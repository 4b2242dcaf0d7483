use std::io;

use thiserror::Error;

/// Errors produced by the trajforge library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("latitude {lat_deg}° is outside the projectable range (|lat| must be below {limit_deg}°)")]
    PolarLatitude { lat_deg: f64, limit_deg: f64 },

    #[error("invalid ellipsoid: {0}")]
    InvalidEllipsoid(&'static str),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("trajectory set has no points")]
    EmptySet,

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("labels must be non-decreasing (position {position})")]
    UnsortedLabels { position: usize },

    #[error("invalid block shape {width}x{height}")]
    InvalidBlock { width: usize, height: usize },

    #[error("kernel bandwidth must be a positive odd integer, got {0}")]
    EvenBandwidth(usize),

    #[error("unknown kernel family `{0}`")]
    UnknownKernel(String),

    #[error("unknown colormap `{0}`")]
    UnknownColormap(String),

    #[error("kernel of bandwidth {bandwidth} does not fit a {u}x{v} grid")]
    KernelTooLarge { bandwidth: usize, u: usize, v: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid density dump: {0}")]
    InvalidDump(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("trajectory sets do not correspond: {0}")]
    Mismatch(String),

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("total trajectory length is zero")]
    ZeroLength,

    #[error("worker pool: {0}")]
    Pool(String),

    #[error("image encoding: {0}")]
    Image(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
