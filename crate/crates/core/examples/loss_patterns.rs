//! Prints the macroblock maps of the three loss patterns on two consecutive
//! error frames, the second one shifted.
//!
//! ```text
//! cargo run --example loss_patterns
//! ```

use mcfse::loss::{generate_pattern, ErrorFrame, InterleavedLayout, LossMask, PatternKind, MACROBLOCK};

fn print_map(mask: &LossMask, t: usize) {
    for my in 0..mask.height() / MACROBLOCK {
        let row: String = (0..mask.width() / MACROBLOCK)
            .map(|mx| if mask.is_lost(mx * MACROBLOCK, my * MACROBLOCK, t) { '#' } else { '.' })
            .collect();
        println!("    {row}");
    }
}

fn main() -> mcfse::Result<()> {
    let (width, height) = (176, 144);
    let error_frames = ErrorFrame::alternating([1, 2]);
    for kind in [PatternKind::Dispersed, PatternKind::Interleaved, PatternKind::Mixed] {
        let mask = generate_pattern(kind, width, height, 3, &error_frames, InterleavedLayout::default())?;
        println!("{kind:?}");
        for ef in &error_frames {
            let share = mask.lost_count(ef.frame) as f64 / (width * height) as f64;
            println!("  frame {} (shifted: {}), {:.0}% lost", ef.frame, ef.shifted, 100.0 * share);
            print_map(&mask, ef.frame);
        }
    }
    Ok(())
}
