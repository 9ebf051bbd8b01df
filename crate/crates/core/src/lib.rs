//! Error concealment for video with motion compensated three-dimensional
//! frequency selective extrapolation.
//!
//! Lost blocks are reconstructed from a sparse Fourier model fitted to the
//! received samples of a spatio-temporal volume around each block. Reference
//! frames in the volume are aligned with sub-pel motion estimated from the
//! neighbourhood of the loss; estimates that fail a reliability test fall
//! back to a volume at fixed position. Temporal replacement, boundary
//! matching and decoder motion vector estimation are included as baselines.

pub mod baselines;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod fse;
pub mod loss;
pub mod motion;
pub mod pipeline;
pub mod plane;
pub mod report;
pub mod sequence;
pub mod store;
pub mod synthetic;

pub use error::{Error, Result};
