//! Conceals DISPERSED losses with the temporal baselines at each accuracy.
//!
//! ```text
//! cargo run --release --example baselines
//! ```

use mcfse::evaluation::psnr_region;
use mcfse::loss::{apply_loss, generate_pattern, ErrorFrame, InterleavedLayout, PatternKind};
use mcfse::pipeline::{conceal_sequence, Accuracy, Algorithm, ConcealConfig};
use mcfse::synthetic::{synthetic_sequence, SyntheticSpec};

fn main() -> mcfse::Result<()> {
    let seq = synthetic_sequence(&SyntheticSpec {
        width: 96,
        height: 96,
        frames: 3,
        shift_x: 2.5,
        shift_y: 0.75,
        noise: 1.0,
        max_frequency: 0.4,
        ..SyntheticSpec::default()
    })?;
    let mask = generate_pattern(
        PatternKind::Dispersed,
        96,
        96,
        3,
        &ErrorFrame::alternating([2]),
        InterleavedLayout::default(),
    )?;
    let lossy = apply_loss(&seq, &mask, 128)?;
    for alg in [Algorithm::Tr, Algorithm::Ebma, Algorithm::Dmve] {
        for acc in [Accuracy::Full, Accuracy::Half, Accuracy::Quarter] {
            if alg == Algorithm::Tr && acc != Accuracy::Full {
                continue;
            }
            let cfg = ConcealConfig::new(alg).with_accuracy(acc);
            let (out, _) = conceal_sequence(&lossy, &mask, &cfg)?;
            println!("{:>5} {:>8}: {:.2} dB", alg.name(), acc.name(), psnr_region(&seq, &out, &mask)?.psnr);
        }
    }
    Ok(())
}
