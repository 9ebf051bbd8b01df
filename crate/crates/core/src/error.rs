use std::io;

use thiserror::Error;

/// Errors produced by the concealment toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("file size {size} is not a whole number of {frame_bytes}-byte frames")]
    SizeMismatch { size: u64, frame_bytes: usize },

    #[error("invalid dimensions {width}x{height}: {reason}")]
    Dimension {
        width: usize,
        height: usize,
        reason: &'static str,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("weights sum to zero, the volume has no support")]
    DegenerateWeights,

    #[error("decision area around block ({x0},{y0}) contains no received samples")]
    EmptyDecisionArea { x0: usize, y0: usize },

    #[error("boundary ring around block ({x0},{y0}) contains no received samples")]
    EmptyRing { x0: usize, y0: usize },

    #[error("no reference frame available for frame {frame}")]
    NoReference { frame: usize },

    #[error("unsupported upsampling factor {0}, expected 1, 2 or 4")]
    UnsupportedFactor(u32),

    #[error("malformed report: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;
