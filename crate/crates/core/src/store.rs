//! Mutable frame store used while concealing a sequence.
//!
//! Holds real-valued copies of every plane together with the loss state of
//! each sample, so that concealed samples become visible to the blocks and
//! frames processed afterwards.

use crate::error::{Error, Result};
use crate::loss::{LossBlock, LossMask};
use crate::plane::{quantize, Plane};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleState {
    Received,
    /// Lost and not concealed yet.
    Pending,
    /// Lost and already replaced by a concealment result.
    Concealed,
    /// Lost and left at its fill value because every concealment path failed.
    Unrecovered,
}

impl SampleState {
    /// Whether the sample may support model generation or matching.
    #[inline]
    pub fn is_available(self) -> bool {
        matches!(self, SampleState::Received | SampleState::Concealed)
    }
}

#[derive(Debug, Clone)]
pub struct FrameStore {
    width: usize,
    height: usize,
    planes: Vec<Plane>,
    states: Vec<Vec<SampleState>>,
}

impl FrameStore {
    pub fn new(planes: Vec<Plane>, mask: &LossMask) -> Result<Self> {
        let (width, height) = (mask.width(), mask.height());
        if planes.len() != mask.frame_count()
            || planes.iter().any(|p| p.width() != width || p.height() != height)
        {
            return Err(Error::DimensionMismatch(format!(
                "planes do not match the {width}x{height}x{} mask",
                mask.frame_count()
            )));
        }
        let states = (0..mask.frame_count())
            .map(|t| {
                mask.frame(t)
                    .iter()
                    .map(|&ok| if ok { SampleState::Received } else { SampleState::Pending })
                    .collect()
            })
            .collect();
        Ok(Self {
            width,
            height,
            planes,
            states,
        })
    }

    /// A store where every sample is received.
    pub fn received(planes: Vec<Plane>) -> Self {
        let (w, h) = planes.first().map(|p| (p.width(), p.height())).unwrap_or((0, 0));
        let mask = LossMask::all_received(w, h, planes.len());
        Self::new(planes, &mask).expect("consistent planes")
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn frame_count(&self) -> usize {
        self.planes.len()
    }

    #[inline]
    pub fn plane(&self, t: usize) -> &Plane {
        &self.planes[t]
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn into_planes(self) -> Vec<Plane> {
        self.planes
    }

    #[inline]
    pub fn state(&self, x: usize, y: usize, t: usize) -> SampleState {
        self.states[t][y * self.width + x]
    }

    /// Loss state at the margin-replicated position.
    #[inline]
    pub fn state_clamped(&self, x: i64, y: i64, t: usize) -> SampleState {
        let cx = x.clamp(0, self.width as i64 - 1) as usize;
        let cy = y.clamp(0, self.height as i64 - 1) as usize;
        self.state(cx, cy, t)
    }

    #[inline]
    pub fn sample_clamped(&self, x: i64, y: i64, t: usize) -> f64 {
        self.planes[t].get_clamped(x, y)
    }

    /// True if any sample of frame `t` still waits for concealment.
    pub fn has_pending(&self, t: usize) -> bool {
        self.states[t].contains(&SampleState::Pending)
    }

    /// Pending samples inside `block`, as frame coordinates in raster order.
    pub fn pending_in_block(&self, block: &LossBlock) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in block.y0..block.y0 + block.height {
            for x in block.x0..block.x0 + block.width {
                if self.state(x, y, block.frame) == SampleState::Pending {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Writes concealed values into the pending samples of `block`.
    ///
    /// `values` is the block in row-major order; values are rounded and clamped
    /// to the 8-bit range before they enter the store.
    pub fn commit_block(&mut self, block: &LossBlock, values: &[f64]) {
        assert_eq!(values.len(), block.width * block.height);
        let t = block.frame;
        for by in 0..block.height {
            for bx in 0..block.width {
                let (x, y) = (block.x0 + bx, block.y0 + by);
                let i = y * self.width + x;
                if self.states[t][i] == SampleState::Pending {
                    self.planes[t].set(x, y, f64::from(quantize(values[by * block.width + bx])));
                    self.states[t][i] = SampleState::Concealed;
                }
            }
        }
    }

    /// Leaves the pending samples of `block` untouched and marks them unrecovered.
    pub fn retain_block(&mut self, block: &LossBlock) {
        let t = block.frame;
        for y in block.y0..block.y0 + block.height {
            for x in block.x0..block.x0 + block.width {
                let i = y * self.width + x;
                if self.states[t][i] == SampleState::Pending {
                    self.states[t][i] = SampleState::Unrecovered;
                }
            }
        }
    }
}
