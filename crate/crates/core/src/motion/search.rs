//! Exhaustive block matching on a decision area around a lost block.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::loss::LossBlock;
use crate::plane::Plane;
use crate::store::{FrameStore, SampleState};

use super::upsample::UpsampledPlane;

/// Received samples in a ring around a lost block, used as matching template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionArea {
    pub positions: Vec<(usize, usize)>,
}

impl DecisionArea {
    /// Ring of `width` samples around `block`, clipped to the frame and
    /// restricted to originally received samples.
    pub fn around(block: &LossBlock, width: usize, store: &FrameStore) -> Self {
        let x_lo = block.x0.saturating_sub(width);
        let y_lo = block.y0.saturating_sub(width);
        let x_hi = (block.x0 + block.width + width).min(store.width());
        let y_hi = (block.y0 + block.height + width).min(store.height());
        let inside = |x: usize, y: usize| {
            (block.x0..block.x0 + block.width).contains(&x) && (block.y0..block.y0 + block.height).contains(&y)
        };
        let mut positions = Vec::new();
        for y in y_lo..y_hi {
            for x in x_lo..x_hi {
                if !inside(x, y) && store.state(x, y, block.frame) == SampleState::Received {
                    positions.push((x, y));
                }
            }
        }
        Self { positions }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Estimated displacement towards one reference frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionEstimate {
    /// Relative frame offset of the reference.
    pub kappa: i64,
    /// Horizontal displacement in units of `1/factor` sample.
    pub dx: i64,
    /// Vertical displacement in units of `1/factor` sample.
    pub dy: i64,
    pub factor: u32,
    /// Sum of squared errors over the decision area at the chosen vector.
    pub error: f64,
}

impl MotionEstimate {
    pub fn zero(kappa: i64, factor: u32) -> Self {
        Self {
            kappa,
            dx: 0,
            dy: 0,
            factor,
            error: 0.0,
        }
    }
}

/// Ordering used to pick among equal errors: shorter vectors first, then
/// lexicographic on `(dx, dy)`.
#[inline]
fn better(a: (f64, i64, i64), b: (f64, i64, i64)) -> bool {
    if a.0 != b.0 {
        return a.0 < b.0;
    }
    let la = a.1.abs() + a.2.abs();
    let lb = b.1.abs() + b.2.abs();
    (la, a.1, a.2) < (lb, b.1, b.2)
}

/// Matching error of one candidate displacement.
pub fn candidate_error(
    current: &Plane,
    reference: &UpsampledPlane,
    positions: &[(usize, usize)],
    dx: i64,
    dy: i64,
) -> f64 {
    let d = reference.factor();
    positions
        .iter()
        .map(|&(x, y)| {
            let diff = current.get(x, y) - reference.get_clamped(d * x as i64 + dx, d * y as i64 + dy);
            diff * diff
        })
        .sum()
}

/// Full search over all displacements within `±d_max` samples at the
/// reference's sub-pel resolution. Returns `(dx, dy, error)`.
pub fn full_search(
    current: &Plane,
    reference: &UpsampledPlane,
    positions: &[(usize, usize)],
    d_max: usize,
) -> (i64, i64, f64) {
    let range = reference.factor() * d_max as i64;
    let best = (-range..=range)
        .into_par_iter()
        .map(|dy| {
            let mut row_best = (f64::INFINITY, 0i64, dy);
            for dx in -range..=range {
                let e = candidate_error(current, reference, positions, dx, dy);
                if better((e, dx, dy), row_best) {
                    row_best = (e, dx, dy);
                }
            }
            row_best
        })
        .reduce(
            || (f64::INFINITY, i64::MAX / 4, i64::MAX / 4),
            |a, b| if better(b, a) { b } else { a },
        );
    (best.1, best.2, best.0)
}

/// Estimates the displacement of `area` from the current frame into the
/// upsampled reference frame at offset `kappa`.
pub fn estimate_motion(
    current: &Plane,
    reference: &UpsampledPlane,
    area: &DecisionArea,
    d_max: usize,
    kappa: i64,
    block: &LossBlock,
) -> Result<MotionEstimate> {
    if area.is_empty() {
        return Err(Error::EmptyDecisionArea {
            x0: block.x0,
            y0: block.y0,
        });
    }
    let (dx, dy, error) = full_search(current, reference, &area.positions, d_max);
    Ok(MotionEstimate {
        kappa,
        dx,
        dy,
        factor: reference.factor,
        error,
    })
}
