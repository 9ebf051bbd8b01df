//! Estimates the motion of a lost block from its decision area at full-,
//! half- and quarter-pel accuracy on content moving by (1.75, -0.5) samples
//! per frame.
//!
//! ```text
//! cargo run --release --example motion_search
//! ```

use mcfse::loss::{LossBlock, LossMask};
use mcfse::motion::{check_reliability, estimate_motion, upsample_plane, DecisionArea, ReliabilityConfig};
use mcfse::store::FrameStore;
use mcfse::synthetic::{synthetic_planes, SyntheticSpec};

fn main() -> mcfse::Result<()> {
    let planes = synthetic_planes(&SyntheticSpec {
        width: 96,
        height: 96,
        frames: 3,
        shift_x: 1.75,
        shift_y: -0.5,
        max_frequency: 0.4,
        ..SyntheticSpec::default()
    });
    let block = LossBlock { x0: 32, y0: 48, width: 16, height: 16, frame: 2 };
    let mut mask = LossMask::all_received(96, 96, 3);
    mask.mark_block_lost(block.x0, block.y0, 16, 16, 2);
    let store = FrameStore::new(planes, &mask)?;
    let area = DecisionArea::around(&block, 4, &store);
    println!("decision area: {} samples", area.len());

    for factor in [1, 2, 4] {
        let mut estimates = Vec::new();
        for (kappa, t) in [(-2i64, 0usize), (-1, 1)] {
            let up = upsample_plane(store.plane(t), factor, t)?;
            estimates.push(estimate_motion(store.plane(2), &up, &area, 8, kappa, &block)?);
        }
        let verdict = check_reliability(&estimates, area.len(), &ReliabilityConfig::default());
        for e in &estimates {
            println!(
                "1/{factor} pel, kappa {:>2}: vector ({:>5.2}, {:>5.2}) samples, error {:.0}",
                e.kappa,
                e.dx as f64 / factor as f64,
                e.dy as f64 / factor as f64,
                e.error
            );
        }
        println!("  reliable: {} (max mean error {:.2})", verdict.reliable, verdict.max_mean_error);
    }
    Ok(())
}
