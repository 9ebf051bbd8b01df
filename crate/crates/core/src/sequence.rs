//! Raw planar video input and output.
//!
//! Files are header-less: frames follow each other in temporal order, every
//! plane row-major, luma first and then (for `yuv420p`) the two chroma planes
//! at half resolution in each direction.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::plane::Plane;

/// Smallest accepted frame width or height.
pub const MIN_DIMENSION: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PixelFormat {
    #[default]
    Gray8,
    Yuv420p,
}

impl PixelFormat {
    /// Bytes occupied by one frame of the given luma dimensions.
    pub fn frame_bytes(self, width: usize, height: usize) -> usize {
        match self {
            PixelFormat::Gray8 => width * height,
            PixelFormat::Yuv420p => {
                let (cw, ch) = chroma_dims(width, height);
                width * height + 2 * cw * ch
            }
        }
    }
}

impl FromStr for PixelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gray8" | "gray" => Ok(PixelFormat::Gray8),
            "yuv420p" | "i420" => Ok(PixelFormat::Yuv420p),
            other => Err(Error::Parameter(format!("unknown pixel format '{other}'"))),
        }
    }
}

/// Dimensions of a 4:2:0 chroma plane for the given luma dimensions.
pub fn chroma_dims(width: usize, height: usize) -> (usize, usize) {
    (width.div_ceil(2), height.div_ceil(2))
}

/// One decoded picture: a luma plane plus optional chroma planes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub luma: Vec<u8>,
    pub chroma: Option<[Vec<u8>; 2]>,
}

/// An immutable stack of 8-bit frames sharing identical dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoSequence {
    width: usize,
    height: usize,
    format: PixelFormat,
    frames: Vec<Frame>,
}

impl VideoSequence {
    pub fn new(width: usize, height: usize, format: PixelFormat, frames: Vec<Frame>) -> Result<Self> {
        check_dims(width, height)?;
        let (cw, ch) = chroma_dims(width, height);
        for (t, frame) in frames.iter().enumerate() {
            if frame.luma.len() != width * height {
                return Err(Error::DimensionMismatch(format!(
                    "frame {t} luma has {} samples, expected {}",
                    frame.luma.len(),
                    width * height
                )));
            }
            match (format, &frame.chroma) {
                (PixelFormat::Gray8, None) => {}
                (PixelFormat::Yuv420p, Some([u, v])) if u.len() == cw * ch && v.len() == cw * ch => {}
                _ => {
                    return Err(Error::DimensionMismatch(format!(
                        "frame {t} chroma planes do not match format {format:?}"
                    )))
                }
            }
        }
        Ok(Self {
            width,
            height,
            format,
            frames,
        })
    }

    /// Builds a luma-only sequence from raw planes.
    pub fn from_luma(width: usize, height: usize, planes: Vec<Vec<u8>>) -> Result<Self> {
        let frames = planes
            .into_iter()
            .map(|luma| Frame { luma, chroma: None })
            .collect();
        Self::new(width, height, PixelFormat::Gray8, frames)
    }

    /// Quantizes real-valued planes into a luma-only sequence.
    pub fn from_planes(planes: &[Plane]) -> Result<Self> {
        let (width, height) = planes
            .first()
            .map(|p| (p.width(), p.height()))
            .unwrap_or((MIN_DIMENSION, MIN_DIMENSION));
        Self::from_luma(width, height, planes.iter().map(Plane::to_u8).collect())
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
    pub fn format(&self) -> PixelFormat {
        self.format
    }

    #[inline]
    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, t: usize) -> &Frame {
        &self.frames[t]
    }

    pub fn luma(&self, t: usize) -> &[u8] {
        &self.frames[t].luma
    }

    /// Real-valued copy of the luma plane of frame `t`.
    pub fn luma_plane(&self, t: usize) -> Plane {
        Plane::from_u8(self.width, self.height, &self.frames[t].luma)
    }

    /// Real-valued copies of all luma planes.
    pub fn luma_planes(&self) -> Vec<Plane> {
        (0..self.frame_count()).map(|t| self.luma_plane(t)).collect()
    }

    /// Real-valued copies of chroma plane `index` (0 = Cb, 1 = Cr), if present.
    pub fn chroma_planes(&self, index: usize) -> Option<Vec<Plane>> {
        let (cw, ch) = chroma_dims(self.width, self.height);
        self.frames
            .iter()
            .map(|f| f.chroma.as_ref().map(|c| Plane::from_u8(cw, ch, &c[index])))
            .collect()
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    /// Sample of frame `t` with margin replication outside the frame.
    #[inline]
    pub fn sample_clamped(&self, x: i64, y: i64, t: usize) -> u8 {
        let cx = x.clamp(0, self.width as i64 - 1) as usize;
        let cy = y.clamp(0, self.height as i64 - 1) as usize;
        self.frames[t].luma[cy * self.width + cx]
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width < MIN_DIMENSION || height < MIN_DIMENSION {
        return Err(Error::Dimension {
            width,
            height,
            reason: "width and height must be at least 48 samples",
        });
    }
    Ok(())
}

/// Reads a header-less raw video file.
pub fn read_raw_video(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    format: PixelFormat,
) -> Result<VideoSequence> {
    check_dims(width, height)?;
    let bytes = fs::read(path)?;
    let frame_bytes = format.frame_bytes(width, height);
    if bytes.len() % frame_bytes != 0 {
        return Err(Error::SizeMismatch {
            size: bytes.len() as u64,
            frame_bytes,
        });
    }
    let luma_len = width * height;
    let (cw, ch) = chroma_dims(width, height);
    let chroma_len = cw * ch;
    let frames = bytes
        .chunks_exact(frame_bytes)
        .map(|chunk| {
            let luma = chunk[..luma_len].to_vec();
            let chroma = match format {
                PixelFormat::Gray8 => None,
                PixelFormat::Yuv420p => Some([
                    chunk[luma_len..luma_len + chroma_len].to_vec(),
                    chunk[luma_len + chroma_len..].to_vec(),
                ]),
            };
            Frame { luma, chroma }
        })
        .collect();
    VideoSequence::new(width, height, format, frames)
}

/// Writes a sequence as a header-less raw video file.
pub fn write_raw_video(seq: &VideoSequence, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for frame in seq.frames() {
        out.write_all(&frame.luma)?;
        if let Some([u, v]) = &frame.chroma {
            out.write_all(u)?;
            out.write_all(v)?;
        }
    }
    out.flush()?;
    Ok(())
}
