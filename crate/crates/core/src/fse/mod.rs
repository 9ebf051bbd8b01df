//! Frequency selective extrapolation in three dimensions.
//!
//! A volume of received samples around a lost block is approximated by a
//! sparse superposition of 3D DFT basis functions. The model is fitted on the
//! received samples only, but defined over the whole volume, so its values in
//! the lost region serve as the concealment.

pub mod fft3;
mod grid;
mod model;
mod solver;
mod volume;

pub use grid::{BasisSpec, Dims3};
pub use model::{evaluate_model, evaluate_model_direct, full_region, synthesize, SparseModel};
pub use solver::{
    generate_model, generate_model_direct, select_basis, weighted_projection, weighted_projection_direct,
    IterationState, ModelFit, Selection, Step,
};
pub use volume::{
    build_fixed_volume, build_weight_volume, clip_references, ExtrapolationVolume, VolumeGeometry, WeightVolume,
};

use crate::error::Result;

/// Transform grid used when none is configured.
pub const DEFAULT_GRID: Dims3 = Dims3::new(64, 64, 16);

/// Parameters of one model generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FseParams {
    pub rho_hat: f64,
    pub delta: f64,
    pub gamma: f64,
    pub iterations: usize,
    pub grid: Dims3,
}

impl FseParams {
    /// Compensated model generation with 800 iterations and `gamma = 0.7`.
    pub const fn compensated() -> Self {
        Self {
            rho_hat: 0.8,
            delta: 0.2,
            gamma: 0.7,
            iterations: 800,
            grid: DEFAULT_GRID,
        }
    }

    /// Uncompensated model generation with 200 iterations.
    pub const fn uncompensated() -> Self {
        Self {
            gamma: 1.0,
            iterations: 200,
            ..Self::compensated()
        }
    }
}

impl Default for FseParams {
    fn default() -> Self {
        Self::compensated()
    }
}

/// Volume positions `(m, n, p)`.
pub type Region = Vec<(usize, usize, usize)>;

/// Fits a model to `vol` and returns its values at the block's lost samples,
/// in the order of [`ExtrapolationVolume::block_loss_region`].
pub fn extrapolate(vol: &ExtrapolationVolume, params: &FseParams) -> Result<(Region, Vec<f64>)> {
    let weights = build_weight_volume(vol, params.rho_hat, params.delta)?;
    let basis = BasisSpec::new(params.grid);
    let fit = generate_model(&vol.samples, &weights, &basis, params.iterations, params.gamma)?;
    let region = vol.block_loss_region();
    let values = evaluate_model(&fit.model, &region);
    Ok((region, values))
}
