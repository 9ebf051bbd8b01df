//! Motion-aligned extrapolation volumes.

use crate::error::{Error, Result};
use crate::fse::{build_fixed_volume, ExtrapolationVolume};
use crate::loss::LossBlock;
use crate::store::FrameStore;

use super::search::MotionEstimate;
use super::upsample::UpsampledPlane;

/// Nearest full-pel coordinate of an upsampled-grid coordinate.
#[inline]
fn nearest_full(u: i64, d: i64) -> i64 {
    (u + d / 2).div_euclid(d)
}

/// Builds a volume whose reference layers follow the estimated motion.
///
/// `refs` and `vectors` hold one entry per reference layer in layer order,
/// skipping the current layer. The current layer is taken as in
/// [`build_fixed_volume`]; reference layer samples are read on the
/// `D`-strided grid of the upsampled plane starting at the displaced origin.
pub fn build_aligned_volume(
    store: &FrameStore,
    refs: &[&UpsampledPlane],
    block: &LossBlock,
    vectors: &[MotionEstimate],
    border: usize,
    prev: usize,
    next: usize,
) -> Result<ExtrapolationVolume> {
    let mut vol = build_fixed_volume(store, block, border, prev, next);
    let g = vol.geometry;
    let layers = g.prev + g.next;
    if refs.len() != layers || vectors.len() != layers {
        return Err(Error::DimensionMismatch(format!(
            "{layers} reference layers but {} planes and {} vectors",
            refs.len(),
            vectors.len()
        )));
    }
    let dims = vol.dims;
    let mut r = 0;
    for p in 0..dims.p {
        if p == g.current_layer() {
            continue;
        }
        let (up, v) = (refs[r], &vectors[r]);
        r += 1;
        let t = g.frame_of_layer(p);
        if up.source_frame != t || v.kappa != g.kappa_of_layer(p) {
            return Err(Error::DimensionMismatch(format!(
                "layer {p} expects frame {t} but got frame {} with offset {}",
                up.source_frame, v.kappa
            )));
        }
        let d = up.factor();
        if i64::from(v.factor) != d {
            return Err(Error::DimensionMismatch(format!(
                "vector at 1/{} pel used with a 1/{d} pel plane",
                v.factor
            )));
        }
        for n in 0..dims.n {
            for m in 0..dims.m {
                let (x, y) = g.frame_position(m, n);
                let (ux, uy) = (d * x + v.dx, d * y + v.dy);
                let i = dims.index(m, n, p);
                vol.samples[i] = up.get_clamped(ux, uy);
                vol.support[i] = store
                    .state_clamped(nearest_full(ux, d), nearest_full(uy, d), t)
                    .is_available();
            }
        }
    }
    vol.aligned = true;
    Ok(vol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::LossMask;
    use crate::motion::upsample::upsample_plane;
    use crate::plane::Plane;

    fn texture(x: usize, y: usize) -> f64 {
        ((x * 7 + y * 13) % 31) as f64 * 3.0 + ((x * y) % 11) as f64
    }

    fn setup(block: LossBlock) -> FrameStore {
        let planes = (0..3).map(|_| Plane::from_fn(80, 80, texture)).collect();
        let mut mask = LossMask::all_received(80, 80, 3);
        mask.mark_block_lost(block.x0, block.y0, 16, 16, 2);
        FrameStore::new(planes, &mask).unwrap()
    }

    fn refs(store: &FrameStore, d: u32) -> Vec<UpsampledPlane> {
        (0..2).map(|t| upsample_plane(store.plane(t), d, t).unwrap()).collect()
    }

    fn vectors(d: u32, dx: i64, dy: i64) -> Vec<MotionEstimate> {
        [-2, -1]
            .into_iter()
            .map(|kappa| MotionEstimate { dx, dy, ..MotionEstimate::zero(kappa, d) })
            .collect()
    }

    #[test]
    fn zero_vectors_reproduce_the_fixed_volume() {
        let block = LossBlock { x0: 32, y0: 32, width: 16, height: 16, frame: 2 };
        let store = setup(block);
        for d in [1, 2, 4] {
            let ups = refs(&store, d);
            let rr: Vec<_> = ups.iter().collect();
            let aligned = build_aligned_volume(&store, &rr, &block, &vectors(d, 0, 0), 16, 2, 0).unwrap();
            let fixed = build_fixed_volume(&store, &block, 16, 2, 0);
            assert_eq!(aligned.samples, fixed.samples);
            assert_eq!(aligned.support, fixed.support);
            assert!(aligned.aligned);
        }
    }

    #[test]
    fn integer_vector_matches_a_shifted_crop() {
        let block = LossBlock { x0: 32, y0: 32, width: 16, height: 16, frame: 2 };
        let store = setup(block);
        for d in [1u32, 2, 4] {
            let ups = refs(&store, d);
            let rr: Vec<_> = ups.iter().collect();
            let vol = build_aligned_volume(&store, &rr, &block, &vectors(d, 3 * i64::from(d), 0), 16, 2, 0).unwrap();
            for p in 0..2 {
                for n in 0..48 {
                    for m in 0..48 {
                        let want = store.sample_clamped(16 + m as i64 + 3, 16 + n as i64, p);
                        assert_eq!(vol.samples[vol.dims.index(m, n, p)], want);
                    }
                }
            }
        }
    }

    #[test]
    fn displacement_past_the_edge_replicates_the_margin() {
        let block = LossBlock { x0: 16, y0: 32, width: 16, height: 16, frame: 2 };
        let store = setup(block);
        let ups = refs(&store, 2);
        let rr: Vec<_> = ups.iter().collect();
        let vol = build_aligned_volume(&store, &rr, &block, &vectors(2, -10, 0), 16, 2, 0).unwrap();
        for n in 0..48 {
            for m in 0..5 {
                // x = 0 + m - 5 <= 0 on the reference grid
                let want = store.sample_clamped(0, 16 + n as i64, 1);
                assert_eq!(vol.samples[vol.dims.index(m, n, 1)], want);
            }
        }
    }

    #[test]
    fn layer_count_is_checked() {
        let block = LossBlock { x0: 32, y0: 32, width: 16, height: 16, frame: 2 };
        let store = setup(block);
        let ups = refs(&store, 1);
        let rr: Vec<_> = ups.iter().collect();
        assert!(build_aligned_volume(&store, &rr[..1], &block, &vectors(1, 0, 0), 16, 2, 0).is_err());
    }
}
