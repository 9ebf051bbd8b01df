//! Compares two algorithms, writes the comparison report to stdout and reads
//! it back.
//!
//! ```text
//! cargo run --release --example evaluation_report
//! ```

use mcfse::evaluation::{full_frame_psnr, psnr_region};
use mcfse::loss::{apply_loss, generate_pattern, ErrorFrame, InterleavedLayout, PatternKind};
use mcfse::pipeline::{conceal_sequence, Algorithm, ConcealConfig};
use mcfse::report::{emit_report, parse_report, Report, ReportOptions, Section};
use mcfse::synthetic::{synthetic_sequence, SyntheticSpec};

fn main() -> mcfse::Result<()> {
    let seq = synthetic_sequence(&SyntheticSpec {
        width: 48,
        height: 48,
        frames: 3,
        shift_x: 1.0,
        max_frequency: 0.3,
        ..SyntheticSpec::default()
    })?;
    let mask = generate_pattern(
        PatternKind::Interleaved,
        48,
        48,
        3,
        &ErrorFrame::alternating([2]),
        InterleavedLayout { row_period: 2, segment_mbs: None },
    )?;
    let lossy = apply_loss(&seq, &mask, 128)?;

    let mut sections = Vec::new();
    for alg in [Algorithm::Tr, Algorithm::Fse3d] {
        let (out, run) = conceal_sequence(&lossy, &mask, &ConcealConfig::new(alg))?;
        sections.push(Section {
            label: alg.name().to_string(),
            run: Some(run),
            region: Some(psnr_region(&seq, &out, &mask)?),
            full_frame: Some(full_frame_psnr(&seq, &out)?),
        });
    }
    let report = Report { sections };
    let text = emit_report(&report, ReportOptions::default());
    print!("{text}");

    // timings are not written by default, so compare the re-emitted text
    let parsed = parse_report(&text)?;
    assert_eq!(emit_report(&parsed, ReportOptions::default()), text);
    println!("# report parsed back identically");
    Ok(())
}
