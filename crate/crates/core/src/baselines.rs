//! Reference concealment algorithms: temporal replacement, boundary matching
//! and decoder-side motion vector estimation.

use crate::error::{Error, Result};
use crate::loss::LossBlock;
use crate::motion::{full_search, DecisionArea, UpsampledPlane};
use crate::plane::quantize;
use crate::store::FrameStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Tr,
    Ebma,
    Dmve,
}

/// Where a concealed block came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSource {
    pub kind: BaselineKind,
    pub kappa: i64,
    pub dx: i64,
    pub dy: i64,
    pub factor: u32,
    pub error: f64,
}

/// Replacement samples for a whole block, row-major, already in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcealedBlock {
    pub block: LossBlock,
    pub samples: Vec<f64>,
    pub source: BlockSource,
}

/// Copies the co-located block of the previous frame.
pub fn tr_conceal(store: &FrameStore, block: &LossBlock) -> Result<ConcealedBlock> {
    if block.frame == 0 {
        return Err(Error::NoReference { frame: 0 });
    }
    let reference = store.plane(block.frame - 1);
    let mut samples = Vec::with_capacity(block.width * block.height);
    for y in block.y0..block.y0 + block.height {
        for x in block.x0..block.x0 + block.width {
            samples.push(reference.get(x, y));
        }
    }
    Ok(ConcealedBlock {
        block: *block,
        samples,
        source: BlockSource {
            kind: BaselineKind::Tr,
            kappa: -1,
            dx: 0,
            dy: 0,
            factor: 1,
            error: 0.0,
        },
    })
}

/// Reads the block displaced by `(dx, dy)` sub-pel units from `reference`.
pub fn displaced_block(reference: &UpsampledPlane, block: &LossBlock, dx: i64, dy: i64) -> Vec<f64> {
    let d = reference.factor();
    let mut samples = Vec::with_capacity(block.width * block.height);
    for y in block.y0..block.y0 + block.height {
        for x in block.x0..block.x0 + block.width {
            let v = reference.get_clamped(d * x as i64 + dx, d * y as i64 + dy);
            samples.push(f64::from(quantize(v)));
        }
    }
    samples
}

fn match_and_copy(
    store: &FrameStore,
    refs: &[&UpsampledPlane],
    block: &LossBlock,
    positions: &[(usize, usize)],
    d_max: usize,
    kind: BaselineKind,
) -> Result<ConcealedBlock> {
    if refs.is_empty() {
        return Err(Error::NoReference { frame: block.frame });
    }
    let current = store.plane(block.frame);
    let mut best: Option<(&UpsampledPlane, i64, i64, f64)> = None;
    for &up in refs {
        let (dx, dy, error) = full_search(current, up, positions, d_max);
        if best.is_none_or(|b| error < b.3) {
            best = Some((up, dx, dy, error));
        }
    }
    let (up, dx, dy, error) = best.expect("at least one reference");
    Ok(ConcealedBlock {
        block: *block,
        samples: displaced_block(up, block, dx, dy),
        source: BlockSource {
            kind,
            kappa: up.source_frame as i64 - block.frame as i64,
            dx,
            dy,
            factor: up.factor,
            error,
        },
    })
}

/// Matches the decision area around the block against each reference and
/// copies the displaced block from the best one.
///
/// `refs` lists the candidate references in preference order; on equal
/// errors the earlier one wins.
pub fn dmve_conceal(
    store: &FrameStore,
    refs: &[&UpsampledPlane],
    block: &LossBlock,
    area: &DecisionArea,
    d_max: usize,
) -> Result<ConcealedBlock> {
    if area.is_empty() {
        return Err(Error::EmptyDecisionArea {
            x0: block.x0,
            y0: block.y0,
        });
    }
    match_and_copy(store, refs, block, &area.positions, d_max, BaselineKind::Dmve)
}

/// Matches the received one-sample ring around the block against the ring of
/// each candidate block and copies the best candidate.
pub fn ebma_conceal(
    store: &FrameStore,
    refs: &[&UpsampledPlane],
    block: &LossBlock,
    d_max: usize,
) -> Result<ConcealedBlock> {
    let ring = DecisionArea::around(block, 1, store);
    if ring.is_empty() {
        return Err(Error::EmptyRing {
            x0: block.x0,
            y0: block.y0,
        });
    }
    match_and_copy(store, refs, block, &ring.positions, d_max, BaselineKind::Ebma)
}
