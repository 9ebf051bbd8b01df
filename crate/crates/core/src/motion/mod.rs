//! Sub-pel motion estimation, reliability gating and volume alignment.

mod align;
mod reliability;
mod search;
mod upsample;

use std::collections::HashMap;
use std::sync::Arc;

pub use align::build_aligned_volume;
pub use reliability::{check_reliability, ReliabilityConfig, ReliabilityVerdict};
pub use search::{candidate_error, estimate_motion, full_search, DecisionArea, MotionEstimate};
pub use upsample::{upsample_plane, UpsampledPlane};

use crate::error::Result;
use crate::plane::Plane;

/// Upsampled reference planes keyed by `(frame, factor)`.
///
/// Entries must be invalidated when their frame changes.
#[derive(Debug, Default)]
pub struct UpsampleCache {
    planes: HashMap<(usize, u32), Arc<UpsampledPlane>>,
}

impl UpsampleCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(&mut self, plane: &Plane, frame: usize, factor: u32) -> Result<Arc<UpsampledPlane>> {
        if let Some(up) = self.planes.get(&(frame, factor)) {
            return Ok(Arc::clone(up));
        }
        let up = Arc::new(upsample_plane(plane, factor, frame)?);
        self.planes.insert((frame, factor), Arc::clone(&up));
        Ok(up)
    }

    pub fn invalidate(&mut self, frame: usize) {
        self.planes.retain(|&(t, _), _| t != frame);
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }
}
