//! Luma PSNR restricted to the lost regions.

use crate::error::{Error, Result};
use crate::loss::{check_mask_dims, LossMask};
use crate::sequence::VideoSequence;

/// Value reported when the compared regions are identical.
pub const PSNR_CAP: f64 = 99.0;

/// PSNR in dB from a mean squared error, capped at [`PSNR_CAP`].
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse <= 0.0 {
        return PSNR_CAP;
    }
    (10.0 * (255.0f64 * 255.0 / mse).log10()).min(PSNR_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePsnr {
    pub frame: usize,
    pub samples: usize,
    pub mse: f64,
    pub psnr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionPsnr {
    /// Frames with a non-empty region, in temporal order.
    pub frames: Vec<FramePsnr>,
    pub samples: usize,
    pub mse: f64,
    pub psnr: f64,
}

fn check_pair(reference: &VideoSequence, test: &VideoSequence) -> Result<()> {
    if reference.width() != test.width()
        || reference.height() != test.height()
        || reference.frame_count() != test.frame_count()
    {
        return Err(Error::DimensionMismatch(format!(
            "reference is {}x{}x{}, test is {}x{}x{}",
            reference.width(),
            reference.height(),
            reference.frame_count(),
            test.width(),
            test.height(),
            test.frame_count()
        )));
    }
    Ok(())
}

fn region_psnr(
    reference: &VideoSequence,
    test: &VideoSequence,
    include: impl Fn(usize, usize) -> bool,
) -> Result<RegionPsnr> {
    let mut frames = Vec::new();
    let (mut total, mut count) = (0.0, 0usize);
    for t in 0..reference.frame_count() {
        let (mut sse, mut n) = (0.0, 0usize);
        for (i, (&a, &b)) in reference.luma(t).iter().zip(test.luma(t)).enumerate() {
            if include(t, i) {
                let d = f64::from(a) - f64::from(b);
                sse += d * d;
                n += 1;
            }
        }
        if n == 0 {
            continue;
        }
        let mse = sse / n as f64;
        frames.push(FramePsnr {
            frame: t,
            samples: n,
            mse,
            psnr: psnr_from_mse(mse),
        });
        total += sse;
        count += n;
    }
    if count == 0 {
        return Err(Error::Parameter("evaluation region is empty".into()));
    }
    let mse = total / count as f64;
    Ok(RegionPsnr {
        frames,
        samples: count,
        mse,
        psnr: psnr_from_mse(mse),
    })
}

/// PSNR over the samples that `region` marks as lost, pooled across frames.
pub fn psnr_region(reference: &VideoSequence, test: &VideoSequence, region: &LossMask) -> Result<RegionPsnr> {
    check_pair(reference, test)?;
    check_mask_dims(reference, region)?;
    region_psnr(reference, test, |t, i| !region.frame(t)[i])
}

/// Whole-frame PSNR of every frame.
pub fn full_frame_psnr(reference: &VideoSequence, test: &VideoSequence) -> Result<RegionPsnr> {
    check_pair(reference, test)?;
    region_psnr(reference, test, |_, _| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(frames: Vec<Vec<u8>>) -> VideoSequence {
        VideoSequence::from_luma(48, 48, frames).unwrap()
    }

    fn mask_first_row() -> LossMask {
        let mut m = LossMask::all_received(48, 48, 2);
        m.mark_block_lost(0, 0, 48, 1, 0);
        m.mark_block_lost(0, 0, 48, 2, 1);
        m
    }

    #[test]
    fn identical_regions_hit_the_cap() {
        let a = seq(vec![vec![10; 2304]; 2]);
        let r = psnr_region(&a, &a, &mask_first_row()).unwrap();
        assert_eq!(r.psnr, PSNR_CAP);
        assert_eq!(r.samples, 48 * 3);
    }

    #[test]
    fn unit_error_gives_48_13_db() {
        let a = seq(vec![vec![10; 2304]; 2]);
        let b = seq(vec![vec![11; 2304]; 2]);
        let r = psnr_region(&a, &b, &mask_first_row()).unwrap();
        assert!((r.psnr - 10.0 * 65025f64.log10()).abs() < 1e-12);
        assert!((r.psnr - 48.1308).abs() < 1e-4);
    }

    #[test]
    fn whole_frame_region_matches_the_full_frame_oracle() {
        let a: Vec<Vec<u8>> = (0..2).map(|t| (0..2304).map(|i| ((i * 7 + t) % 256) as u8).collect()).collect();
        let b: Vec<Vec<u8>> = a
            .iter()
            .map(|f| f.iter().enumerate().map(|(i, &s)| s.wrapping_add((i % 3) as u8)).collect())
            .collect();
        let (sa, sb) = (seq(a.clone()), seq(b.clone()));
        let mut all = LossMask::all_received(48, 48, 2);
        all.mark_block_lost(0, 0, 48, 48, 0);
        all.mark_block_lost(0, 0, 48, 48, 1);
        let region = psnr_region(&sa, &sb, &all).unwrap();
        let full = full_frame_psnr(&sa, &sb).unwrap();
        for (t, f) in full.frames.iter().enumerate() {
            let sse: f64 = a[t].iter().zip(&b[t]).map(|(&x, &y)| (f64::from(x) - f64::from(y)).powi(2)).sum();
            let want = 10.0 * (65025.0 / (sse / 2304.0)).log10();
            assert!((f.psnr - want).abs() < 1e-9);
            assert_eq!(f.psnr, region.frames[t].psnr);
        }
        assert_eq!(region.psnr, full.psnr);
    }

    #[test]
    fn empty_regions_and_mismatches_are_errors() {
        let a = seq(vec![vec![0; 2304]; 2]);
        assert!(psnr_region(&a, &a, &LossMask::all_received(48, 48, 2)).is_err());
        let b = seq(vec![vec![0; 2304]; 1]);
        assert!(full_frame_psnr(&a, &b).is_err());
    }

    proptest! {
        #[test]
        fn pooled_mse_is_the_weighted_frame_mean(
            a in prop::collection::vec(any::<u8>(), 2304 * 2),
            b in prop::collection::vec(any::<u8>(), 2304 * 2),
        ) {
            let sa = seq(a.chunks(2304).map(<[u8]>::to_vec).collect());
            let sb = seq(b.chunks(2304).map(<[u8]>::to_vec).collect());
            let m = mask_first_row();
            let r = psnr_region(&sa, &sb, &m).unwrap();
            let swapped = psnr_region(&sb, &sa, &m).unwrap();
            prop_assert_eq!(r.psnr, swapped.psnr);
            let weighted: f64 = r.frames.iter().map(|f| f.mse * f.samples as f64).sum::<f64>() / r.samples as f64;
            prop_assert!((weighted - r.mse).abs() <= 1e-9 * r.mse.max(1.0));
        }

        #[test]
        fn larger_errors_never_raise_psnr(base in 0u8..200, i in 0usize..48, bump in 1u8..20) {
            let a = seq(vec![vec![base; 2304]; 2]);
            let mut b1 = vec![vec![base; 2304]; 2];
            b1[0][i] = base + 1;
            let mut b2 = b1.clone();
            b2[0][i] = base + 1 + bump;
            let m = mask_first_row();
            let p1 = psnr_region(&a, &seq(b1), &m).unwrap().psnr;
            let p2 = psnr_region(&a, &seq(b2), &m).unwrap().psnr;
            prop_assert!(p2 <= p1);
        }
    }
}
