//! Extrapolation volumes and their weighting functions.

use crate::error::{Error, Result};
use crate::loss::LossBlock;
use crate::store::{FrameStore, SampleState};

use super::grid::Dims3;

/// Where a volume sits in the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VolumeGeometry {
    pub block: LossBlock,
    pub border: usize,
    /// Previous frames actually included (after clipping at sequence ends).
    pub prev: usize,
    /// Future frames actually included.
    pub next: usize,
}

impl VolumeGeometry {
    /// Layer index of the frame that holds the loss.
    #[inline]
    pub fn current_layer(&self) -> usize {
        self.prev
    }

    /// Frame index of layer `p`.
    #[inline]
    pub fn frame_of_layer(&self, p: usize) -> usize {
        self.block.frame + p - self.prev
    }

    /// Relative frame offset of layer `p`.
    #[inline]
    pub fn kappa_of_layer(&self, p: usize) -> i64 {
        p as i64 - self.prev as i64
    }

    pub fn dims(&self) -> Dims3 {
        Dims3::new(
            self.block.width + 2 * self.border,
            self.block.height + 2 * self.border,
            self.prev + self.next + 1,
        )
    }

    /// Frame coordinates of volume sample `(m, n)` before margin clamping.
    #[inline]
    pub fn frame_position(&self, m: usize, n: usize) -> (i64, i64) {
        (
            self.block.x0 as i64 - self.border as i64 + m as i64,
            self.block.y0 as i64 - self.border as i64 + n as i64,
        )
    }
}

/// The signal cuboid around a lost block with its support partition.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationVolume {
    pub dims: Dims3,
    pub samples: Vec<f64>,
    /// `true` for samples that support model generation.
    pub support: Vec<bool>,
    /// `true` for supporting samples that were concealed earlier in the frame.
    pub concealed: Vec<bool>,
    pub geometry: VolumeGeometry,
    pub aligned: bool,
}

impl ExtrapolationVolume {
    /// Volume positions `(m, n, p)` of the block's samples that still need
    /// concealment.
    pub fn block_loss_region(&self) -> Vec<(usize, usize, usize)> {
        let g = &self.geometry;
        let p = g.current_layer();
        let mut out = Vec::new();
        for bn in 0..g.block.height {
            for bm in 0..g.block.width {
                let (m, n) = (g.border + bm, g.border + bn);
                if !self.support[self.dims.index(m, n, p)] {
                    out.push((m, n, p));
                }
            }
        }
        out
    }

    /// Every volume position outside the support.
    pub fn loss_region(&self) -> Vec<(usize, usize, usize)> {
        (0..self.dims.len())
            .filter(|&i| !self.support[i])
            .map(|i| self.dims.coords(i))
            .collect()
    }
}

/// Clips the requested reference frame counts to what the store provides.
///
/// Previous frames are limited by the sequence start. Future frames must exist
/// and be free of pending losses; counting stops at the first unusable frame.
pub fn clip_references(store: &FrameStore, frame: usize, prev: usize, next: usize) -> (usize, usize) {
    let prev = prev.min(frame);
    let next = (1..=next)
        .take_while(|&k| frame + k < store.frame_count() && !store.has_pending(frame + k))
        .count();
    (prev, next)
}

/// Copies the volume at fixed spatial position around `block` from the
/// current frame and the clipped previous/future frames.
pub fn build_fixed_volume(
    store: &FrameStore,
    block: &LossBlock,
    border: usize,
    prev: usize,
    next: usize,
) -> ExtrapolationVolume {
    let (prev, next) = clip_references(store, block.frame, prev, next);
    let geometry = VolumeGeometry {
        block: *block,
        border,
        prev,
        next,
    };
    let dims = geometry.dims();
    let mut samples = Vec::with_capacity(dims.len());
    let mut support = Vec::with_capacity(dims.len());
    let mut concealed = Vec::with_capacity(dims.len());
    for p in 0..dims.p {
        let t = geometry.frame_of_layer(p);
        let current = p == geometry.current_layer();
        for n in 0..dims.n {
            for m in 0..dims.m {
                let (x, y) = geometry.frame_position(m, n);
                let state = store.state_clamped(x, y, t);
                samples.push(store.sample_clamped(x, y, t));
                support.push(state.is_available());
                concealed.push(current && state == SampleState::Concealed);
            }
        }
    }
    ExtrapolationVolume {
        dims,
        samples,
        support,
        concealed,
        geometry,
        aligned: false,
    }
}

/// Per-sample weights controlling each sample's influence on the model.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVolume {
    pub dims: Dims3,
    pub w: Vec<f64>,
    pub rho_hat: f64,
    pub delta: f64,
}

impl WeightVolume {
    pub fn sum(&self) -> f64 {
        self.w.iter().sum()
    }

    /// Uniform unit weights over the full volume.
    pub fn uniform(dims: Dims3) -> Self {
        Self {
            dims,
            w: vec![1.0; dims.len()],
            rho_hat: 1.0,
            delta: 1.0,
        }
    }
}

/// Isotropic weighting: `rho_hat` raised to the distance from the volume
/// center on supporting samples, scaled by `delta` on previously concealed
/// samples and zero elsewhere.
pub fn build_weight_volume(vol: &ExtrapolationVolume, rho_hat: f64, delta: f64) -> Result<WeightVolume> {
    if !(rho_hat > 0.0 && rho_hat <= 1.0) {
        return Err(Error::Parameter(format!("decay factor {rho_hat} outside (0, 1]")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Parameter(format!("reliability coefficient {delta} outside (0, 1]")));
    }
    let d = vol.dims;
    let (cm, cn, cp) = (
        (d.m as f64 - 1.0) / 2.0,
        (d.n as f64 - 1.0) / 2.0,
        (d.p as f64 - 1.0) / 2.0,
    );
    let mut w = vec![0.0; d.len()];
    for p in 0..d.p {
        for n in 0..d.n {
            for m in 0..d.m {
                let i = d.index(m, n, p);
                if !vol.support[i] {
                    continue;
                }
                let dist = ((m as f64 - cm).powi(2) + (n as f64 - cn).powi(2) + (p as f64 - cp).powi(2)).sqrt();
                let mut value = rho_hat.powf(dist);
                if vol.concealed[i] {
                    value *= delta;
                }
                w[i] = value;
            }
        }
    }
    Ok(WeightVolume {
        dims: d,
        w,
        rho_hat,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::LossMask;
    use crate::plane::Plane;

    fn store_with_block(frames: usize, value: f64, t: usize) -> (FrameStore, LossBlock) {
        let planes = vec![Plane::filled(80, 80, value); frames];
        let mut mask = LossMask::all_received(80, 80, frames);
        mask.mark_block_lost(32, 32, 16, 16, t);
        let block = LossBlock { x0: 32, y0: 32, width: 16, height: 16, frame: t };
        (FrameStore::new(planes, &mask).unwrap(), block)
    }

    #[test]
    fn default_volume_is_48_by_48_by_3() {
        let (store, block) = store_with_block(4, 100.0, 3);
        let vol = build_fixed_volume(&store, &block, 16, 2, 0);
        assert_eq!(vol.dims, Dims3::new(48, 48, 3));
        assert_eq!(vol.block_loss_region().len(), 256);
        assert!(vol.samples.iter().all(|&s| s == 100.0));
    }

    #[test]
    fn first_frame_has_no_previous_layers() {
        let (store, block) = store_with_block(3, 100.0, 0);
        let vol = build_fixed_volume(&store, &block, 16, 2, 0);
        assert_eq!(vol.geometry.prev, 0);
        assert_eq!(vol.dims.p, 1);
    }

    #[test]
    fn future_frames_with_pending_loss_are_skipped() {
        let planes = vec![Plane::filled(64, 64, 1.0); 3];
        let mut mask = LossMask::all_received(64, 64, 3);
        mask.mark_block_lost(16, 16, 16, 16, 1);
        mask.mark_block_lost(0, 0, 16, 16, 2);
        let store = FrameStore::new(planes, &mask).unwrap();
        assert_eq!(clip_references(&store, 1, 2, 1), (1, 0));
        assert_eq!(clip_references(&store, 0, 2, 2), (0, 0));
    }

    #[test]
    fn weights_follow_the_isotropic_model() {
        let (store, block) = store_with_block(2, 50.0, 1);
        let mut vol = build_fixed_volume(&store, &block, 16, 1, 0);
        let w = build_weight_volume(&vol, 0.8, 0.2).unwrap();
        for (i, &s) in vol.support.iter().enumerate() {
            if !s {
                assert_eq!(w.w[i], 0.0);
            }
            assert!((0.0..=1.0).contains(&w.w[i]));
        }

        // 5x5x1 volume centred on (2, 2, 0) so integer distances exist
        vol.dims = Dims3::new(5, 5, 1);
        vol.support = vec![true; 25];
        vol.concealed = vec![false; 25];
        vol.concealed[vol.dims.index(2, 0, 0)] = true;
        let w = build_weight_volume(&vol, 0.8, 0.2).unwrap();
        assert!((w.w[vol.dims.index(3, 2, 0)] - 0.8).abs() < 1e-15);
        assert!((w.w[vol.dims.index(2, 0, 0)] - 0.128).abs() < 1e-15);
        assert_eq!(w.w[vol.dims.index(2, 2, 0)], 1.0);
    }

    #[test]
    fn weight_parameters_are_validated() {
        let (store, block) = store_with_block(1, 0.0, 0);
        let vol = build_fixed_volume(&store, &block, 4, 0, 0);
        assert!(build_weight_volume(&vol, 0.0, 0.2).is_err());
        assert!(build_weight_volume(&vol, 0.8, 1.5).is_err());
    }
}
