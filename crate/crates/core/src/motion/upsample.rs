//! Sub-pel interpolation of reference frames.
//!
//! Half-pel samples come from the six-tap filter `(1, -5, 20, 20, -5, 1) / 32`
//! applied horizontally, and for the centre positions vertically on the
//! unrounded horizontal results. Quarter-pel samples average the two nearest
//! full/half-pel samples. All values stay real; nothing is rounded.

use crate::error::{Error, Result};
use crate::plane::Plane;

const TAPS: [f64; 6] = [1.0, -5.0, 20.0, 20.0, -5.0, 1.0];

/// A reference plane on a grid `factor` times finer than the source.
/// Source sample `(x, y)` sits at `(factor*x, factor*y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpsampledPlane {
    pub factor: u32,
    pub source_frame: usize,
    pub samples: Plane,
}

impl UpsampledPlane {
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> f64 {
        self.samples.get_clamped(x, y)
    }

    #[inline]
    pub fn factor(&self) -> i64 {
        i64::from(self.factor)
    }
}

#[inline]
fn six_tap(f: impl Fn(i64) -> f64) -> f64 {
    TAPS.iter()
        .enumerate()
        .map(|(i, c)| c * f(i as i64 - 2))
        .sum::<f64>()
        / 32.0
}

/// Half-pel plane of size `(2(X-1)+1) x (2(Y-1)+1)`.
fn half_pel(src: &Plane) -> Plane {
    let (w, h) = (src.width(), src.height());
    let (uw, uh) = (2 * (w - 1) + 1, 2 * (h - 1) + 1);
    // horizontal half-pel values for every source row, unrounded
    let horizontal = Plane::from_fn(w - 1, h, |x, y| {
        let (x, y) = (x as i64, y as i64);
        six_tap(|o| src.get_clamped(x + o, y))
    });
    Plane::from_fn(uw, uh, |ux, uy| {
        let (x, y) = ((ux / 2) as i64, (uy / 2) as i64);
        match (ux % 2, uy % 2) {
            (0, 0) => src.get(ux / 2, uy / 2),
            (1, 0) => horizontal.get(ux / 2, uy / 2),
            (0, 1) => six_tap(|o| src.get_clamped(x, y + o)),
            _ => six_tap(|o| horizontal.get_clamped(x, y + o)),
        }
    })
}

/// Quarter-pel plane built from the half-pel plane.
fn quarter_pel(half: &Plane) -> Plane {
    let (uw, uh) = (2 * (half.width() - 1) + 1, 2 * (half.height() - 1) + 1);
    Plane::from_fn(uw, uh, |qx, qy| {
        let (hx, hy) = (qx / 2, qy / 2);
        match (qx % 2, qy % 2) {
            (0, 0) => half.get(hx, hy),
            (1, 0) => 0.5 * (half.get(hx, hy) + half.get(hx + 1, hy)),
            (0, 1) => 0.5 * (half.get(hx, hy) + half.get(hx, hy + 1)),
            _ => {
                // of the four surrounding half-grid points, average the two
                // that are neither full-pel nor centre positions
                if (hx + hy) % 2 == 1 {
                    0.5 * (half.get(hx, hy) + half.get(hx + 1, hy + 1))
                } else {
                    0.5 * (half.get(hx + 1, hy) + half.get(hx, hy + 1))
                }
            }
        }
    })
}

/// Upsamples `frame` by `factor` (1, 2 or 4).
pub fn upsample_plane(frame: &Plane, factor: u32, source_frame: usize) -> Result<UpsampledPlane> {
    let samples = match factor {
        1 => frame.clone(),
        2 => half_pel(frame),
        4 => quarter_pel(&half_pel(frame)),
        other => return Err(Error::UnsupportedFactor(other)),
    };
    Ok(UpsampledPlane {
        factor,
        source_frame,
        samples,
    })
}
