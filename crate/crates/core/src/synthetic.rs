//! Seeded synthetic test sequences: a smooth random texture under global
//! translation, optionally with additive noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::plane::{quantize, Plane};
use crate::sequence::VideoSequence;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    /// Horizontal motion in samples per frame.
    pub shift_x: f64,
    /// Vertical motion in samples per frame.
    pub shift_y: f64,
    /// Peak amplitude of uniform noise added to every sample.
    pub noise: f64,
    /// Highest spatial frequency of the texture in radians per sample.
    pub max_frequency: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            width: 96,
            height: 96,
            frames: 6,
            shift_x: 0.0,
            shift_y: 0.0,
            noise: 0.0,
            max_frequency: 0.6,
            seed: 1,
        }
    }
}

/// A sum of random plane waves around mid-gray.
#[derive(Debug, Clone, PartialEq)]
pub struct Texture {
    waves: Vec<(f64, f64, f64, f64)>,
}

impl Texture {
    pub fn random(rng: &mut impl Rng, max_frequency: f64) -> Self {
        let waves = (0..8)
            .map(|_| {
                let fx = rng.gen_range(-max_frequency..=max_frequency);
                let fy = rng.gen_range(-max_frequency..=max_frequency);
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                let amplitude = rng.gen_range(5.0..20.0);
                (fx, fy, phase, amplitude)
            })
            .collect();
        Self { waves }
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        128.0
            + self
                .waves
                .iter()
                .map(|&(fx, fy, phase, a)| a * (fx * x + fy * y + phase).sin())
                .sum::<f64>()
    }
}

/// Frame `t` shows the texture translated by `t * (shift_x, shift_y)`.
pub fn synthetic_planes(spec: &SyntheticSpec) -> Vec<Plane> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let texture = Texture::random(&mut rng, spec.max_frequency);
    (0..spec.frames)
        .map(|t| {
            let (ox, oy) = (spec.shift_x * t as f64, spec.shift_y * t as f64);
            Plane::from_fn(spec.width, spec.height, |x, y| {
                let mut v = texture.value(x as f64 - ox, y as f64 - oy);
                if spec.noise > 0.0 {
                    v += rng.gen_range(-spec.noise..=spec.noise);
                }
                f64::from(quantize(v))
            })
        })
        .collect()
}

pub fn synthetic_sequence(spec: &SyntheticSpec) -> Result<VideoSequence> {
    VideoSequence::from_planes(&synthetic_planes(spec))
}
