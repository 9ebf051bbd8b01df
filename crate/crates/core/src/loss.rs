//! Macroblock loss patterns and loss masks.
//!
//! Masks are stored per frame as validity planes: `true` marks a received
//! sample, `false` a lost one.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sequence::{chroma_dims, Frame, VideoSequence};

/// Macroblock edge length used by generated patterns.
pub const MACROBLOCK: usize = 16;

/// Default value written into lost samples.
pub const DEFAULT_FILL: u8 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternKind {
    Dispersed,
    Interleaved,
    Mixed,
}

impl FromStr for PatternKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dispersed" => Ok(PatternKind::Dispersed),
            "interleaved" => Ok(PatternKind::Interleaved),
            "mixed" => Ok(PatternKind::Mixed),
            other => Err(Error::Parameter(format!("unknown loss pattern '{other}'"))),
        }
    }
}

/// Geometry of the INTERLEAVED pattern, in macroblock units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterleavedLayout {
    /// Every `row_period`-th macroblock row is hit.
    pub row_period: usize,
    /// Width of each lost segment; `None` means half the frame width (rounded up).
    pub segment_mbs: Option<usize>,
}

impl Default for InterleavedLayout {
    fn default() -> Self {
        Self {
            row_period: 4,
            segment_mbs: None,
        }
    }
}

/// A frame that receives an imprinted loss pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorFrame {
    pub frame: usize,
    /// Whether the pattern is shifted by one macroblock in this frame.
    pub shifted: bool,
}

impl ErrorFrame {
    /// Marks every other listed frame as shifted, starting with the second.
    pub fn alternating(frames: impl IntoIterator<Item = usize>) -> Vec<ErrorFrame> {
        frames
            .into_iter()
            .enumerate()
            .map(|(i, frame)| ErrorFrame {
                frame,
                shifted: i % 2 == 1,
            })
            .collect()
    }
}

/// A lost rectangle inside one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LossBlock {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
    pub frame: usize,
}

/// Per-frame, per-sample validity map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LossMask {
    width: usize,
    height: usize,
    frames: Vec<Vec<bool>>,
}

impl LossMask {
    /// A mask with every sample received.
    pub fn all_received(width: usize, height: usize, frame_count: usize) -> Self {
        Self {
            width,
            height,
            frames: vec![vec![true; width * height]; frame_count],
        }
    }

    pub fn from_frames(width: usize, height: usize, frames: Vec<Vec<bool>>) -> Result<Self> {
        if let Some(t) = frames.iter().position(|f| f.len() != width * height) {
            return Err(Error::DimensionMismatch(format!(
                "mask frame {t} does not have {width}x{height} samples"
            )));
        }
        Ok(Self {
            width,
            height,
            frames,
        })
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
        self.frames.len()
    }

    pub fn frame(&self, t: usize) -> &[bool] {
        &self.frames[t]
    }

    #[inline]
    pub fn is_received(&self, x: usize, y: usize, t: usize) -> bool {
        self.frames[t][y * self.width + x]
    }

    #[inline]
    pub fn is_lost(&self, x: usize, y: usize, t: usize) -> bool {
        !self.is_received(x, y, t)
    }

    pub fn set_lost(&mut self, x: usize, y: usize, t: usize) {
        self.frames[t][y * self.width + x] = false;
    }

    /// Marks a rectangle (clipped to the frame) as lost.
    pub fn mark_block_lost(&mut self, x0: usize, y0: usize, w: usize, h: usize, t: usize) {
        for y in y0..(y0 + h).min(self.height) {
            for x in x0..(x0 + w).min(self.width) {
                self.set_lost(x, y, t);
            }
        }
    }

    pub fn lost_count(&self, t: usize) -> usize {
        self.frames[t].iter().filter(|&&r| !r).count()
    }

    pub fn total_lost(&self) -> usize {
        (0..self.frame_count()).map(|t| self.lost_count(t)).sum()
    }

    pub fn frame_has_loss(&self, t: usize) -> bool {
        self.frames[t].iter().any(|&r| !r)
    }

    /// Mask for 4:2:0 chroma planes: a chroma sample is lost if any of the
    /// luma samples it covers is lost.
    pub fn chroma_mask(&self) -> LossMask {
        let (cw, ch) = chroma_dims(self.width, self.height);
        let frames = self
            .frames
            .iter()
            .map(|plane| {
                let mut out = vec![true; cw * ch];
                for y in 0..self.height {
                    for x in 0..self.width {
                        if !plane[y * self.width + x] {
                            out[(y / 2) * cw + x / 2] = false;
                        }
                    }
                }
                out
            })
            .collect();
        LossMask {
            width: cw,
            height: ch,
            frames,
        }
    }

    /// Raw mask bytes: 0x00 lost, 0xFF received, frames concatenated.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.frames
            .iter()
            .flatten()
            .map(|&r| if r { 0xFF } else { 0x00 })
            .collect()
    }

    /// Parses raw mask bytes; any nonzero byte counts as received.
    pub fn from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        let frame_len = width * height;
        if frame_len == 0 || !bytes.len().is_multiple_of(frame_len) {
            return Err(Error::SizeMismatch {
                size: bytes.len() as u64,
                frame_bytes: frame_len,
            });
        }
        let frames = bytes
            .chunks_exact(frame_len)
            .map(|c| c.iter().map(|&b| b != 0).collect())
            .collect();
        Ok(Self {
            width,
            height,
            frames,
        })
    }
}

pub fn write_mask(mask: &LossMask, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, mask.to_bytes())?;
    Ok(())
}

pub fn read_mask(path: impl AsRef<Path>, width: usize, height: usize) -> Result<LossMask> {
    LossMask::from_bytes(width, height, &fs::read(path)?)
}

/// Lost macroblocks of one frame, before any shift.
fn pattern_cells(
    kind: PatternKind,
    mbw: usize,
    mbh: usize,
    layout: InterleavedLayout,
) -> Vec<bool> {
    let mut lost = vec![false; mbw * mbh];
    match kind {
        PatternKind::Dispersed => {
            for j in 0..mbh {
                for i in 0..mbw {
                    lost[j * mbw + i] = (i + j) % 2 == 0;
                }
            }
        }
        PatternKind::Interleaved => {
            let seg = layout.segment_mbs.unwrap_or(mbw.div_ceil(2)).min(mbw);
            let period = layout.row_period.max(1);
            for (n, j) in (0..mbh).step_by(period).enumerate() {
                let start = if n % 2 == 0 { 0 } else { mbw - seg };
                for i in start..start + seg {
                    lost[j * mbw + i] = true;
                }
            }
        }
        PatternKind::Mixed => unreachable!("mixed is resolved per frame"),
    }
    lost
}

/// Generates a loss mask for `frame_count` frames with the given pattern
/// imprinted on the listed error frames.
///
/// MIXED uses DISPERSED on the even-positioned error frames and INTERLEAVED on
/// the odd-positioned ones. A shifted DISPERSED frame is the complementary
/// checkerboard; a shifted INTERLEAVED frame moves one macroblock right and
/// down with wrap-around.
pub fn generate_pattern(
    kind: PatternKind,
    width: usize,
    height: usize,
    frame_count: usize,
    error_frames: &[ErrorFrame],
    layout: InterleavedLayout,
) -> Result<LossMask> {
    if width < 2 * MACROBLOCK || height < 2 * MACROBLOCK {
        return Err(Error::Dimension {
            width,
            height,
            reason: "loss patterns need at least 32x32 samples",
        });
    }
    let mbw = width.div_ceil(MACROBLOCK);
    let mbh = height.div_ceil(MACROBLOCK);
    let mut mask = LossMask::all_received(width, height, frame_count);
    for (pos, ef) in error_frames.iter().enumerate() {
        if ef.frame >= frame_count {
            return Err(Error::Parameter(format!(
                "error frame {} beyond sequence of {frame_count} frames",
                ef.frame
            )));
        }
        let frame_kind = match kind {
            PatternKind::Mixed if pos % 2 == 0 => PatternKind::Dispersed,
            PatternKind::Mixed => PatternKind::Interleaved,
            k => k,
        };
        let cells = pattern_cells(frame_kind, mbw, mbh, layout);
        // the checkerboard is shifted without wrap so odd widths still
        // produce the exact complement
        let (sx, sy, flip) = match (ef.shifted, frame_kind) {
            (false, _) => (0, 0, false),
            (true, PatternKind::Dispersed) => (0, 0, true),
            (true, _) => (1, 1, false),
        };
        for j in 0..mbh {
            for i in 0..mbw {
                let src_i = (i + mbw - sx) % mbw;
                let src_j = (j + mbh - sy) % mbh;
                if cells[src_j * mbw + src_i] != flip {
                    mask.mark_block_lost(i * MACROBLOCK, j * MACROBLOCK, MACROBLOCK, MACROBLOCK, ef.frame);
                }
            }
        }
    }
    Ok(mask)
}

/// Replaces lost samples with `fill`. Chroma planes, when present, lose every
/// sample that covers a lost luma sample.
pub fn apply_loss(seq: &VideoSequence, mask: &LossMask, fill: u8) -> Result<VideoSequence> {
    check_mask_dims(seq, mask)?;
    let chroma_mask = seq.frames().iter().any(|f| f.chroma.is_some()).then(|| mask.chroma_mask());
    let frames = seq
        .frames()
        .iter()
        .enumerate()
        .map(|(t, frame)| {
            let luma = frame
                .luma
                .iter()
                .zip(mask.frame(t))
                .map(|(&s, &ok)| if ok { s } else { fill })
                .collect();
            let chroma = frame.chroma.as_ref().map(|planes| {
                let cm = chroma_mask.as_ref().expect("chroma mask").frame(t);
                planes.clone().map(|p| {
                    p.iter()
                        .zip(cm)
                        .map(|(&s, &ok)| if ok { s } else { fill })
                        .collect()
                })
            });
            Frame { luma, chroma }
        })
        .collect();
    VideoSequence::new(seq.width(), seq.height(), seq.format(), frames)
}

pub(crate) fn check_mask_dims(seq: &VideoSequence, mask: &LossMask) -> Result<()> {
    if seq.width() != mask.width()
        || seq.height() != mask.height()
        || seq.frame_count() != mask.frame_count()
    {
        return Err(Error::DimensionMismatch(format!(
            "mask is {}x{}x{}, sequence is {}x{}x{}",
            mask.width(),
            mask.height(),
            mask.frame_count(),
            seq.width(),
            seq.height(),
            seq.frame_count()
        )));
    }
    Ok(())
}

/// Lost macroblocks of frame `t` in raster order. A macroblock is listed when
/// any of its samples is lost; blocks on the right or bottom edge are clipped
/// to the frame.
pub fn enumerate_blocks(mask: &LossMask, t: usize) -> Vec<LossBlock> {
    enumerate_blocks_sized(mask, t, MACROBLOCK)
}

/// As [`enumerate_blocks`] with a custom block size.
pub fn enumerate_blocks_sized(mask: &LossMask, t: usize, size: usize) -> Vec<LossBlock> {
    let mut blocks = Vec::new();
    let (w, h) = (mask.width(), mask.height());
    for y0 in (0..h).step_by(size) {
        for x0 in (0..w).step_by(size) {
            let bw = size.min(w - x0);
            let bh = size.min(h - y0);
            let any_lost = (y0..y0 + bh).any(|y| (x0..x0 + bw).any(|x| mask.is_lost(x, y, t)));
            if any_lost {
                blocks.push(LossBlock {
                    x0,
                    y0,
                    width: bw,
                    height: bh,
                    frame: t,
                });
            }
        }
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single(kind: PatternKind, w: usize, h: usize, shifted: bool) -> LossMask {
        generate_pattern(
            kind,
            w,
            h,
            1,
            &[ErrorFrame { frame: 0, shifted }],
            InterleavedLayout::default(),
        )
        .unwrap()
    }

    /// Counts lost macroblocks by looking at each cell's top-left sample.
    fn lost_cells(mask: &LossMask, t: usize) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for j in 0..mask.height() / 16 {
            for i in 0..mask.width() / 16 {
                if mask.is_lost(i * 16, j * 16, t) {
                    cells.push((i, j));
                }
            }
        }
        cells
    }

    #[test]
    fn dispersed_cif_loses_half_the_macroblocks() {
        let mask = single(PatternKind::Dispersed, 352, 288, false);
        assert_eq!(lost_cells(&mask, 0).len(), 198);
        assert_eq!(mask.lost_count(0), 198 * 256);
    }

    #[test]
    fn dispersed_shift_is_the_complement() {
        for (w, h) in [(352, 288), (176, 144), (48, 48)] {
            let a = single(PatternKind::Dispersed, w, h, false);
            let b = single(PatternKind::Dispersed, w, h, true);
            for (x, y) in a.frame(0).iter().zip(b.frame(0)) {
                assert_ne!(x, y, "{w}x{h}");
            }
        }
    }

    #[test]
    fn interleaved_cif_hits_every_fourth_row() {
        let mask = single(PatternKind::Interleaved, 352, 288, false);
        let rows: Vec<usize> = (0..18)
            .filter(|&j| (0..22).any(|i| mask.is_lost(i * 16, j * 16, 0)))
            .collect();
        assert_eq!(rows, vec![0, 4, 8, 12, 16]);
        // segment width is half the frame: 11 macroblocks = 176 samples
        assert_eq!(mask.lost_count(0), 5 * 16 * 176);
        // left, right, left, ...
        assert!(mask.is_lost(0, 0, 0) && !mask.is_lost(351, 0, 0));
        assert!(!mask.is_lost(0, 64, 0) && mask.is_lost(351, 64, 0));
    }

    #[test]
    fn interleaved_shift_moves_one_macroblock_diagonally() {
        let mask = single(PatternKind::Interleaved, 352, 288, true);
        assert!(mask.is_lost(16, 16, 0));
        assert!(!mask.is_lost(0, 16, 0));
        assert!(!mask.is_lost(16, 0, 0));
    }

    #[test]
    fn mixed_alternates_patterns() {
        let frames = ErrorFrame::alternating([1, 2]);
        let mask = generate_pattern(PatternKind::Mixed, 64, 64, 3, &frames, InterleavedLayout::default()).unwrap();
        assert_eq!(mask.lost_count(0), 0);
        assert_eq!(mask.lost_count(1), 8 * 256);
        // frame 2 is interleaved and shifted: row 1 only, 2 macroblocks
        assert_eq!(mask.lost_count(2), 2 * 256);
    }

    #[test]
    fn tiny_frames_are_rejected() {
        let r = generate_pattern(PatternKind::Dispersed, 16, 64, 1, &[], InterleavedLayout::default());
        assert!(matches!(r, Err(Error::Dimension { .. })));
    }

    #[test]
    fn apply_loss_edges() {
        let seq = VideoSequence::from_luma(48, 48, vec![vec![7; 48 * 48]]).unwrap();
        let keep = LossMask::all_received(48, 48, 1);
        assert_eq!(apply_loss(&seq, &keep, 128).unwrap(), seq);

        let mut all = LossMask::all_received(48, 48, 1);
        all.mark_block_lost(0, 0, 48, 48, 0);
        let zero = apply_loss(&seq, &all, 0).unwrap();
        assert!(zero.luma(0).iter().all(|&s| s == 0));

        let wrong = LossMask::all_received(48, 64, 1);
        assert!(apply_loss(&seq, &wrong, 0).is_err());
    }

    #[test]
    fn apply_dispersed_changes_exactly_the_lost_samples() {
        let planes = vec![(0..352 * 288).map(|i| (i % 97) as u8).collect()];
        let seq = VideoSequence::from_luma(352, 288, planes).unwrap();
        let mask = single(PatternKind::Dispersed, 352, 288, false);
        let out = apply_loss(&seq, &mask, 128).unwrap();
        let changed = seq.luma(0).iter().zip(out.luma(0)).filter(|(a, b)| a != b).count();
        let lost_not_fill = seq
            .luma(0)
            .iter()
            .zip(mask.frame(0))
            .filter(|(&s, &ok)| !ok && s != 128)
            .count();
        assert_eq!(changed, lost_not_fill);
        assert!(changed <= 198 * 256);
    }

    #[test]
    fn enumerate_edge_cases() {
        let mask = LossMask::all_received(64, 64, 1);
        assert!(enumerate_blocks(&mask, 0).is_empty());

        let mut one = LossMask::all_received(64, 80, 1);
        one.mark_block_lost(32, 48, 16, 16, 0);
        assert_eq!(
            enumerate_blocks(&one, 0),
            vec![LossBlock { x0: 32, y0: 48, width: 16, height: 16, frame: 0 }]
        );
    }

    #[test]
    fn enumerate_dispersed_is_raster_sorted() {
        let mask = single(PatternKind::Dispersed, 352, 288, false);
        let blocks = enumerate_blocks(&mask, 0);
        assert_eq!(blocks.len(), 198);
        let expected: Vec<(usize, usize)> = (0..18)
            .flat_map(|j| (0..22).map(move |i| (i, j)))
            .filter(|(i, j)| (i + j) % 2 == 0)
            .map(|(i, j)| (i * 16, j * 16))
            .collect();
        let got: Vec<(usize, usize)> = blocks.iter().map(|b| (b.x0, b.y0)).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn mask_bytes_round_trip() {
        let mask = single(PatternKind::Interleaved, 64, 48, true);
        let bytes = mask.to_bytes();
        assert!(bytes.iter().all(|&b| b == 0 || b == 0xFF));
        assert_eq!(LossMask::from_bytes(64, 48, &bytes).unwrap(), mask);
    }

    proptest! {
        #[test]
        fn generation_is_deterministic_and_idempotent(
            kind in prop_oneof![Just(PatternKind::Dispersed), Just(PatternKind::Interleaved), Just(PatternKind::Mixed)],
            mbw in 2usize..8, mbh in 2usize..8, shifted in any::<bool>(),
        ) {
            let (w, h) = (mbw * 16 + 8, mbh * 16);
            let frames = [ErrorFrame { frame: 0, shifted }, ErrorFrame { frame: 1, shifted: !shifted }];
            let a = generate_pattern(kind, w.max(48), h.max(48), 2, &frames, InterleavedLayout::default()).unwrap();
            let b = generate_pattern(kind, w.max(48), h.max(48), 2, &frames, InterleavedLayout::default()).unwrap();
            prop_assert_eq!(&a, &b);

            let planes = (0..2).map(|t| (0..a.width() * a.height()).map(|i| (i * 3 + t) as u8).collect()).collect();
            let seq = VideoSequence::from_luma(a.width(), a.height(), planes).unwrap();
            let once = apply_loss(&seq, &a, 128).unwrap();
            let twice = apply_loss(&once, &a, 128).unwrap();
            prop_assert_eq!(once, twice);

            for t in 0..2 {
                let blocks = enumerate_blocks(&a, t);
                let mut covered = vec![false; a.width() * a.height()];
                for b in &blocks {
                    let mut hits = false;
                    for y in b.y0..b.y0 + b.height {
                        for x in b.x0..b.x0 + b.width {
                            covered[y * a.width() + x] = true;
                            hits |= a.is_lost(x, y, t);
                        }
                    }
                    prop_assert!(hits);
                }
                for (i, &ok) in a.frame(t).iter().enumerate() {
                    prop_assert!(ok || covered[i]);
                }
            }
        }
    }
}
