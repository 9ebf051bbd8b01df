//! Block-by-block concealment of whole sequences.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::baselines::{dmve_conceal, ebma_conceal, tr_conceal, ConcealedBlock};
use crate::error::{Error, Result};
use crate::fse::{build_fixed_volume, clip_references, extrapolate, Dims3, ExtrapolationVolume, FseParams, DEFAULT_GRID};
use crate::loss::{check_mask_dims, enumerate_blocks_sized, LossBlock, LossMask, MACROBLOCK};
use crate::motion::{
    build_aligned_volume, check_reliability, estimate_motion, DecisionArea, MotionEstimate, ReliabilityConfig,
    ReliabilityVerdict, UpsampleCache, UpsampledPlane,
};
use crate::plane::Plane;
use crate::sequence::{Frame, VideoSequence};
use crate::store::FrameStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Tr,
    Ebma,
    Dmve,
    Fse3d,
    Fse3dOd,
    Mcfse,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Tr,
        Algorithm::Ebma,
        Algorithm::Dmve,
        Algorithm::Fse3d,
        Algorithm::Fse3dOd,
        Algorithm::Mcfse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Tr => "tr",
            Algorithm::Ebma => "ebma",
            Algorithm::Dmve => "dmve",
            Algorithm::Fse3d => "fse3d",
            Algorithm::Fse3dOd => "fse3d-od",
            Algorithm::Mcfse => "mcfse",
        }
    }

    /// Whether the algorithm performs a motion search.
    pub fn uses_motion(self) -> bool {
        matches!(self, Algorithm::Ebma | Algorithm::Dmve | Algorithm::Mcfse)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "tr" => Ok(Algorithm::Tr),
            "ebma" => Ok(Algorithm::Ebma),
            "dmve" => Ok(Algorithm::Dmve),
            "fse3d" => Ok(Algorithm::Fse3d),
            "fse3d-od" | "fse3dod" => Ok(Algorithm::Fse3dOd),
            "mcfse" => Ok(Algorithm::Mcfse),
            other => Err(Error::Parameter(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Motion search precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Accuracy {
    Full,
    Half,
    Quarter,
}

impl Accuracy {
    pub fn factor(self) -> u32 {
        match self {
            Accuracy::Full => 1,
            Accuracy::Half => 2,
            Accuracy::Quarter => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Accuracy::Full => "full",
            Accuracy::Half => "half",
            Accuracy::Quarter => "quarter",
        }
    }
}

impl fmt::Display for Accuracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Accuracy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" | "1" => Ok(Accuracy::Full),
            "half" | "2" => Ok(Accuracy::Half),
            "quarter" | "4" => Ok(Accuracy::Quarter),
            other => Err(Error::Parameter(format!("unknown accuracy '{other}', expected full, half or quarter"))),
        }
    }
}

/// Everything that controls a concealment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcealConfig {
    pub algorithm: Algorithm,
    pub accuracy: Accuracy,
    pub border: usize,
    pub prev: usize,
    pub next: usize,
    pub rho_hat: f64,
    pub delta: f64,
    /// `None` selects the algorithm's default.
    pub gamma: Option<f64>,
    /// `None` selects the algorithm's default.
    pub iterations: Option<usize>,
    pub grid: Dims3,
    pub d_max: usize,
    pub decision_border: usize,
    pub reliability: ReliabilityConfig,
    pub block_size: usize,
    pub chroma: bool,
}

impl ConcealConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            accuracy: Accuracy::Quarter,
            border: 16,
            prev: 2,
            next: 0,
            rho_hat: 0.8,
            delta: 0.2,
            gamma: None,
            iterations: None,
            grid: DEFAULT_GRID,
            d_max: 16,
            decision_border: 4,
            reliability: ReliabilityConfig::default(),
            block_size: MACROBLOCK,
            chroma: false,
        }
    }

    pub fn with_accuracy(mut self, accuracy: Accuracy) -> Self {
        self.accuracy = accuracy;
        self
    }

    /// Model generation parameters after applying per-algorithm defaults.
    pub fn fse_params(&self) -> FseParams {
        let base = match self.algorithm {
            Algorithm::Fse3d => FseParams::uncompensated(),
            _ => FseParams::compensated(),
        };
        FseParams {
            rho_hat: self.rho_hat,
            delta: self.delta,
            gamma: self.gamma.unwrap_or(base.gamma),
            iterations: self.iterations.unwrap_or(base.iterations),
            grid: self.grid,
        }
    }

    /// Settings for the half-resolution chroma planes: every length halved
    /// and rounded up.
    pub fn for_chroma(&self) -> Self {
        let half = |v: usize| v.div_ceil(2);
        Self {
            border: half(self.border),
            grid: Dims3::new(half(self.grid.m), half(self.grid.n), self.grid.p),
            d_max: half(self.d_max),
            decision_border: half(self.decision_border),
            block_size: half(self.block_size),
            chroma: false,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.fse_params();
        if !(p.gamma > 0.0 && p.gamma <= 1.0) {
            return Err(Error::Parameter(format!("gamma {} outside (0, 1]", p.gamma)));
        }
        if p.iterations == 0 {
            return Err(Error::Parameter("iterations must be at least 1".into()));
        }
        if !(self.rho_hat > 0.0 && self.rho_hat <= 1.0) {
            return Err(Error::Parameter(format!("decay factor {} outside (0, 1]", self.rho_hat)));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::Parameter(format!("reliability coefficient {} outside (0, 1]", self.delta)));
        }
        if !(self.reliability.t_abs > 0.0 && self.reliability.t_rel > 0.0) {
            return Err(Error::Parameter("reliability thresholds must be positive".into()));
        }
        if self.block_size == 0 {
            return Err(Error::Parameter("block size must be positive".into()));
        }
        let vol = Dims3::new(
            self.block_size + 2 * self.border,
            self.block_size + 2 * self.border,
            self.prev + self.next + 1,
        );
        if !self.grid.contains(&vol) {
            return Err(Error::Parameter(format!("transform grid {} smaller than volume {vol}", self.grid)));
        }
        Ok(())
    }
}

/// How a block was finally concealed. The tags partition the block set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathTag {
    /// Model generation on a motion-aligned volume.
    Aligned,
    /// Model generation on the fixed volume.
    Fixed,
    Tr,
    Ebma,
    Dmve,
    /// Nothing succeeded; the samples keep their fill value.
    Retained,
}

impl PathTag {
    pub fn name(self) -> &'static str {
        match self {
            PathTag::Aligned => "aligned",
            PathTag::Fixed => "fixed",
            PathTag::Tr => "tr",
            PathTag::Ebma => "ebma",
            PathTag::Dmve => "dmve",
            PathTag::Retained => "retained",
        }
    }
}

impl FromStr for PathTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "aligned" => PathTag::Aligned,
            "fixed" => PathTag::Fixed,
            "tr" => PathTag::Tr,
            "ebma" => PathTag::Ebma,
            "dmve" => PathTag::Dmve,
            "retained" => PathTag::Retained,
            other => return Err(Error::Report(format!("unknown path '{other}'"))),
        })
    }
}

/// Account of one concealed block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRecord {
    /// 0 for luma, 1 and 2 for the chroma planes.
    pub plane: usize,
    pub block: LossBlock,
    pub path: PathTag,
    pub vectors: Vec<MotionEstimate>,
    pub reliability: Option<ReliabilityVerdict>,
    /// Errors that forced a fallback, in order.
    pub fallbacks: Vec<String>,
    pub elapsed: Duration,
}

impl BlockRecord {
    fn new(plane: usize, block: LossBlock) -> Self {
        Self {
            plane,
            block,
            path: PathTag::Retained,
            vectors: Vec::new(),
            reliability: None,
            fallbacks: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    /// True if motion was estimated and then rejected by the reliability check.
    pub fn discarded(&self) -> bool {
        self.reliability.is_some_and(|v| !v.reliable)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub accuracy: Accuracy,
    pub frame_count: usize,
    pub records: Vec<BlockRecord>,
    pub elapsed: Duration,
}

impl RunReport {
    pub fn count(&self, path: PathTag) -> usize {
        self.records.iter().filter(|r| r.path == path).count()
    }

    /// Percentage of reliability-checked luma blocks per frame whose motion
    /// was discarded. Frames without checked blocks are omitted.
    pub fn discarded_per_frame(&self) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for t in 0..self.frame_count {
            let checked: Vec<_> = self
                .records
                .iter()
                .filter(|r| r.plane == 0 && r.block.frame == t && r.reliability.is_some())
                .collect();
            if checked.is_empty() {
                continue;
            }
            let discarded = checked.iter().filter(|r| r.discarded()).count();
            out.push((t, 100.0 * discarded as f64 / checked.len() as f64));
        }
        out
    }
}

/// Replacement values for one block plus its record.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOutcome {
    /// Row-major block samples; `None` when the block is retained.
    pub samples: Option<Vec<f64>>,
    pub record: BlockRecord,
}

/// References available to `frame`, as `(kappa, frame index)` in layer order.
fn reference_frames(store: &FrameStore, frame: usize, prev: usize, next: usize) -> Vec<(i64, usize)> {
    let (prev, next) = clip_references(store, frame, prev, next);
    let before = (1..=prev).rev().map(|k| (-(k as i64), frame - k));
    let after = (1..=next).map(|k| (k as i64, frame + k));
    before.chain(after).collect()
}

/// Fills the block with the current plane and writes the extrapolated values
/// over the lost positions.
fn block_from_volume(store: &FrameStore, vol: &ExtrapolationVolume, params: &FseParams) -> Result<Vec<f64>> {
    let (region, values) = extrapolate(vol, params)?;
    let b = vol.geometry.block;
    let plane = store.plane(b.frame);
    let mut samples: Vec<f64> = (b.y0..b.y0 + b.height)
        .flat_map(|y| (b.x0..b.x0 + b.width).map(move |x| (x, y)))
        .map(|(x, y)| plane.get(x, y))
        .collect();
    let border = vol.geometry.border;
    for (&(m, n, _), v) in region.iter().zip(values) {
        samples[(n - border) * b.width + (m - border)] = v;
    }
    Ok(samples)
}

fn upsampled(
    store: &FrameStore,
    cache: &mut UpsampleCache,
    refs: &[(i64, usize)],
    factor: u32,
) -> Result<Vec<std::sync::Arc<UpsampledPlane>>> {
    refs.iter()
        .map(|&(_, t)| cache.get_or_build(store.plane(t), t, factor))
        .collect()
}

fn motion_compensated(
    store: &FrameStore,
    cache: &mut UpsampleCache,
    block: &LossBlock,
    cfg: &ConcealConfig,
    record: &mut BlockRecord,
) -> Result<Vec<f64>> {
    let params = cfg.fse_params();
    let refs = reference_frames(store, block.frame, cfg.prev, cfg.next);
    let area = DecisionArea::around(block, cfg.decision_border, store);
    if !refs.is_empty() && !area.is_empty() {
        let ups = upsampled(store, cache, &refs, cfg.accuracy.factor())?;
        let current = store.plane(block.frame);
        let estimates = refs
            .iter()
            .zip(&ups)
            .map(|(&(kappa, _), up)| estimate_motion(current, up, &area, cfg.d_max, kappa, block))
            .collect::<Result<Vec<_>>>()?;
        let verdict = check_reliability(&estimates, area.len(), &cfg.reliability);
        record.vectors = estimates.clone();
        record.reliability = Some(verdict);
        if verdict.reliable {
            let planes: Vec<&UpsampledPlane> = ups.iter().map(|u| u.as_ref()).collect();
            let attempt = build_aligned_volume(store, &planes, block, &estimates, cfg.border, cfg.prev, cfg.next)
                .and_then(|vol| block_from_volume(store, &vol, &params));
            match attempt {
                Ok(samples) => {
                    record.path = PathTag::Aligned;
                    return Ok(samples);
                }
                Err(e) => record.fallbacks.push(format!("aligned: {e}")),
            }
        }
    } else if area.is_empty() {
        record.fallbacks.push(
            Error::EmptyDecisionArea {
                x0: block.x0,
                y0: block.y0,
            }
            .to_string(),
        );
    }
    fixed(store, block, cfg, record)
}

fn fixed(store: &FrameStore, block: &LossBlock, cfg: &ConcealConfig, record: &mut BlockRecord) -> Result<Vec<f64>> {
    let vol = build_fixed_volume(store, block, cfg.border, cfg.prev, cfg.next);
    let samples = block_from_volume(store, &vol, &cfg.fse_params())?;
    record.path = PathTag::Fixed;
    Ok(samples)
}

fn baseline(
    store: &FrameStore,
    cache: &mut UpsampleCache,
    block: &LossBlock,
    cfg: &ConcealConfig,
    record: &mut BlockRecord,
) -> Result<Vec<f64>> {
    let concealed: ConcealedBlock = match cfg.algorithm {
        Algorithm::Tr => tr_conceal(store, block)?,
        _ => {
            // the previous frame first, then at most one future frame
            let refs: Vec<_> = reference_frames(store, block.frame, 1, cfg.next.min(1));
            let ups = upsampled(store, cache, &refs, cfg.accuracy.factor())?;
            let planes: Vec<&UpsampledPlane> = ups.iter().map(|u| u.as_ref()).collect();
            if cfg.algorithm == Algorithm::Dmve {
                let area = DecisionArea::around(block, cfg.decision_border, store);
                dmve_conceal(store, &planes, block, &area, cfg.d_max)?
            } else {
                ebma_conceal(store, &planes, block, cfg.d_max)?
            }
        }
    };
    let s = concealed.source;
    if cfg.algorithm != Algorithm::Tr {
        record.vectors = vec![MotionEstimate {
            kappa: s.kappa,
            dx: s.dx,
            dy: s.dy,
            factor: s.factor,
            error: s.error,
        }];
    }
    record.path = match cfg.algorithm {
        Algorithm::Tr => PathTag::Tr,
        Algorithm::Ebma => PathTag::Ebma,
        _ => PathTag::Dmve,
    };
    Ok(concealed.samples)
}

/// Conceals one block of `plane` against the current state of `store`
/// without modifying it.
pub fn conceal_block(
    store: &FrameStore,
    cache: &mut UpsampleCache,
    block: &LossBlock,
    cfg: &ConcealConfig,
    plane: usize,
) -> BlockOutcome {
    let start = Instant::now();
    let mut record = BlockRecord::new(plane, *block);
    let primary = match cfg.algorithm {
        Algorithm::Mcfse => motion_compensated(store, cache, block, cfg, &mut record),
        Algorithm::Fse3d | Algorithm::Fse3dOd => fixed(store, block, cfg, &mut record),
        _ => baseline(store, cache, block, cfg, &mut record),
    };
    let samples = match primary {
        Ok(s) => Some(s),
        Err(e) => {
            record.fallbacks.push(format!("{}: {e}", cfg.algorithm));
            let mut chain = Vec::new();
            if cfg.algorithm == Algorithm::Mcfse {
                chain.push(Algorithm::Fse3dOd);
            }
            if cfg.algorithm != Algorithm::Tr {
                chain.push(Algorithm::Tr);
            }
            let mut out = None;
            for alg in chain {
                let attempt = if alg == Algorithm::Tr {
                    tr_conceal(store, block).map(|c| {
                        record.path = PathTag::Tr;
                        c.samples
                    })
                } else {
                    fixed(store, block, cfg, &mut record)
                };
                match attempt {
                    Ok(s) => {
                        out = Some(s);
                        break;
                    }
                    Err(e) => record.fallbacks.push(format!("{alg}: {e}")),
                }
            }
            if out.is_none() {
                record.path = PathTag::Retained;
            }
            out
        }
    };
    record.elapsed = start.elapsed();
    BlockOutcome { samples, record }
}

/// Conceals every lost block of a stack of planes in temporal, then raster
/// order. Concealed samples immediately support later blocks and frames.
pub fn conceal_planes(
    planes: Vec<Plane>,
    mask: &LossMask,
    cfg: &ConcealConfig,
    plane: usize,
) -> Result<(Vec<Plane>, Vec<BlockRecord>)> {
    let mut store = FrameStore::new(planes, mask)?;
    let mut cache = UpsampleCache::new();
    let mut records = Vec::new();
    for t in 0..mask.frame_count() {
        let blocks = enumerate_blocks_sized(mask, t, cfg.block_size);
        if blocks.is_empty() {
            continue;
        }
        for block in &blocks {
            let outcome = conceal_block(&store, &mut cache, block, cfg, plane);
            match &outcome.samples {
                Some(s) => store.commit_block(block, s),
                None => store.retain_block(block),
            }
            records.push(outcome.record);
        }
        cache.invalidate(t);
    }
    Ok((store.into_planes(), records))
}

/// Conceals the lost regions of `seq` described by `mask`.
///
/// Received samples are never modified. Chroma planes are concealed only when
/// `cfg.chroma` is set; otherwise they pass through unchanged.
pub fn conceal_sequence(seq: &VideoSequence, mask: &LossMask, cfg: &ConcealConfig) -> Result<(VideoSequence, RunReport)> {
    check_mask_dims(seq, mask)?;
    cfg.validate()?;
    let start = Instant::now();
    let (luma, mut records) = conceal_planes(seq.luma_planes(), mask, cfg, 0)?;
    let mut chroma: [Option<Vec<Plane>>; 2] = [None, None];
    if cfg.chroma && seq.chroma_planes(0).is_some() {
        let cmask = mask.chroma_mask();
        let ccfg = cfg.for_chroma();
        for (i, slot) in chroma.iter_mut().enumerate() {
            let planes = seq.chroma_planes(i).expect("chroma planes");
            let (out, recs) = conceal_planes(planes, &cmask, &ccfg, i + 1)?;
            records.extend(recs);
            *slot = Some(out);
        }
    }
    let frames = seq
        .frames()
        .iter()
        .enumerate()
        .map(|(t, f)| Frame {
            luma: luma[t].to_u8(),
            chroma: match (&chroma, &f.chroma) {
                ([Some(u), Some(v)], _) => Some([u[t].to_u8(), v[t].to_u8()]),
                (_, c) => c.clone(),
            },
        })
        .collect();
    let out = VideoSequence::new(seq.width(), seq.height(), seq.format(), frames)?;
    let report = RunReport {
        algorithm: cfg.algorithm,
        accuracy: cfg.accuracy,
        frame_count: seq.frame_count(),
        records,
        elapsed: start.elapsed(),
    };
    Ok((out, report))
}
