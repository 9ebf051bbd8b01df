//! Line-oriented text reports (`fse-report v1`).
//!
//! A report holds one or more labelled sections. Each section may carry a
//! concealment run (block records as CSV) and region or full-frame PSNR
//! figures. Floating-point values are written in shortest round-trip form, so
//! parsing an emitted report gives back identical values. Timing is written
//! only on request, which keeps default reports reproducible byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::evaluation::{FramePsnr, RegionPsnr};
use crate::loss::LossBlock;
use crate::motion::{MotionEstimate, ReliabilityVerdict};
use crate::pipeline::{Accuracy, Algorithm, BlockRecord, PathTag, RunReport};

pub const HEADER: &str = "fse-report v1";

const BLOCK_COLUMNS: &str = "plane,frame,x0,y0,width,height,path,reliable,max_mean_error,spread,vectors,fallbacks";
const FRAME_COLUMNS: &str = "frame,samples,mse,psnr";
const PATHS: [PathTag; 6] = [
    PathTag::Aligned,
    PathTag::Fixed,
    PathTag::Tr,
    PathTag::Ebma,
    PathTag::Dmve,
    PathTag::Retained,
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    pub label: String,
    pub run: Option<RunReport>,
    pub region: Option<RegionPsnr>,
    pub full_frame: Option<RegionPsnr>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReportOptions {
    /// Include wall-clock timings.
    pub timing: bool,
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '%' | ',' | '|' | '[' | ']' | '\n' | '\r' => {
                let _ = write!(out, "%{:02X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Result<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '%' {
            let hex: String = chars.by_ref().take(2).collect();
            let code = u8::from_str_radix(&hex, 16).map_err(|_| Error::Report(format!("bad escape '%{hex}'")))?;
            out.push(char::from(code));
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

fn fmt_vectors(vectors: &[MotionEstimate]) -> String {
    vectors
        .iter()
        .map(|v| format!("{}:{}:{}:{}:{}", v.kappa, v.dx, v.dy, v.factor, v.error))
        .collect::<Vec<_>>()
        .join("|")
}

fn parse<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Report(format!("cannot parse {what} from '{s}'")))
}

fn parse_vectors(s: &str) -> Result<Vec<MotionEstimate>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('|')
        .map(|v| {
            let f: Vec<&str> = v.split(':').collect();
            if f.len() != 5 {
                return Err(Error::Report(format!("bad vector '{v}'")));
            }
            Ok(MotionEstimate {
                kappa: parse(f[0], "kappa")?,
                dx: parse(f[1], "dx")?,
                dy: parse(f[2], "dy")?,
                factor: parse(f[3], "factor")?,
                error: parse(f[4], "error")?,
            })
        })
        .collect()
}

fn emit_psnr(out: &mut String, kind: &str, p: &RegionPsnr) {
    let _ = writeln!(out, "[psnr {kind}]");
    let _ = writeln!(out, "samples={}", p.samples);
    let _ = writeln!(out, "mse={}", p.mse);
    let _ = writeln!(out, "psnr={}", p.psnr);
    let _ = writeln!(out, "{FRAME_COLUMNS}");
    for f in &p.frames {
        let _ = writeln!(out, "{},{},{},{}", f.frame, f.samples, f.mse, f.psnr);
    }
}

fn emit_run(out: &mut String, run: &RunReport, opts: ReportOptions) {
    let _ = writeln!(out, "algorithm={}", run.algorithm);
    let _ = writeln!(out, "accuracy={}", run.accuracy);
    let _ = writeln!(out, "frames={}", run.frame_count);
    let _ = writeln!(out, "blocks={}", run.records.len());
    for path in PATHS {
        let _ = writeln!(out, "path.{}={}", path.name(), run.count(path));
    }
    if opts.timing {
        let _ = writeln!(out, "elapsed_ns={}", run.elapsed.as_nanos());
    }
    let _ = writeln!(out, "[blocks]");
    if opts.timing {
        let _ = writeln!(out, "{BLOCK_COLUMNS},elapsed_ns");
    } else {
        let _ = writeln!(out, "{BLOCK_COLUMNS}");
    }
    for r in &run.records {
        let b = &r.block;
        let (reliable, mme, spread) = match r.reliability {
            Some(v) => (u8::from(v.reliable).to_string(), v.max_mean_error.to_string(), v.spread.to_string()),
            None => ("-".into(), "-".into(), "-".into()),
        };
        let fallbacks = r.fallbacks.iter().map(|f| escape(f)).collect::<Vec<_>>().join("|");
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{reliable},{mme},{spread},{},{fallbacks}",
            r.plane,
            b.frame,
            b.x0,
            b.y0,
            b.width,
            b.height,
            r.path.name(),
            fmt_vectors(&r.vectors),
        );
        if opts.timing {
            let _ = write!(out, ",{}", r.elapsed.as_nanos());
        }
        out.push('\n');
    }
    let _ = writeln!(out, "[discarded]");
    let _ = writeln!(out, "frame,percent");
    for (t, pct) in run.discarded_per_frame() {
        let _ = writeln!(out, "{t},{pct}");
    }
}

/// Serializes `report` into the text format.
pub fn emit_report(report: &Report, opts: ReportOptions) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "sections={}", report.sections.len());
    for s in &report.sections {
        let _ = writeln!(out, "[section {}]", escape(&s.label));
        if let Some(run) = &s.run {
            emit_run(&mut out, run, opts);
        }
        if let Some(p) = &s.region {
            emit_psnr(&mut out, "region", p);
        }
        if let Some(p) = &s.full_frame {
            emit_psnr(&mut out, "full", p);
        }
    }
    if report.sections.len() > 1 {
        let _ = writeln!(out, "[comparison]");
        let _ = writeln!(out, "label,psnr_region,psnr_full,aligned,fixed,discarded_percent");
        for s in &report.sections {
            let db = |p: &Option<RegionPsnr>| p.as_ref().map_or("-".to_string(), |p| format!("{:.4}", p.psnr));
            let (aligned, fixed, discarded) = match &s.run {
                Some(run) => {
                    let checked = run.records.iter().filter(|r| r.plane == 0 && r.reliability.is_some()).count();
                    let dropped = run.records.iter().filter(|r| r.plane == 0 && r.discarded()).count();
                    let pct = if checked == 0 {
                        "-".to_string()
                    } else {
                        format!("{:.2}", 100.0 * dropped as f64 / checked as f64)
                    };
                    (run.count(PathTag::Aligned).to_string(), run.count(PathTag::Fixed).to_string(), pct)
                }
                None => ("-".into(), "-".into(), "-".into()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{aligned},{fixed},{discarded}",
                escape(&s.label),
                db(&s.region),
                db(&s.full_frame)
            );
        }
    }
    out
}

pub fn write_report(report: &Report, opts: ReportOptions, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, emit_report(report, opts))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Run,
    Blocks,
    Discarded,
    Psnr(bool),
    Comparison,
}

#[derive(Default)]
struct RunBuilder {
    algorithm: Option<Algorithm>,
    accuracy: Option<Accuracy>,
    frames: Option<usize>,
    blocks: Option<usize>,
    elapsed: Duration,
    records: Vec<BlockRecord>,
}

impl RunBuilder {
    fn is_empty(&self) -> bool {
        self.algorithm.is_none() && self.accuracy.is_none() && self.frames.is_none()
    }

    fn build(self) -> Result<RunReport> {
        let missing = |k: &str| Error::Report(format!("run is missing '{k}'"));
        let run = RunReport {
            algorithm: self.algorithm.ok_or_else(|| missing("algorithm"))?,
            accuracy: self.accuracy.ok_or_else(|| missing("accuracy"))?,
            frame_count: self.frames.ok_or_else(|| missing("frames"))?,
            records: self.records,
            elapsed: self.elapsed,
        };
        if self.blocks.is_some_and(|b| b != run.records.len()) {
            return Err(Error::Report("block count does not match the block records".into()));
        }
        Ok(run)
    }
}

fn parse_block(line: &str) -> Result<BlockRecord> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 12 && f.len() != 13 {
        return Err(Error::Report(format!("block record has {} fields: '{line}'", f.len())));
    }
    let reliability = if f[7] == "-" {
        None
    } else {
        Some(ReliabilityVerdict {
            reliable: f[7] == "1",
            max_mean_error: parse(f[8], "max_mean_error")?,
            spread: parse(f[9], "spread")?,
        })
    };
    let fallbacks = if f[11].is_empty() {
        Vec::new()
    } else {
        f[11].split('|').map(unescape).collect::<Result<_>>()?
    };
    Ok(BlockRecord {
        plane: parse(f[0], "plane")?,
        block: LossBlock {
            frame: parse(f[1], "frame")?,
            x0: parse(f[2], "x0")?,
            y0: parse(f[3], "y0")?,
            width: parse(f[4], "width")?,
            height: parse(f[5], "height")?,
        },
        path: f[6].parse()?,
        vectors: parse_vectors(f[10])?,
        reliability,
        fallbacks,
        elapsed: match f.get(12) {
            Some(ns) => Duration::from_nanos(parse(ns, "elapsed_ns")?),
            None => Duration::ZERO,
        },
    })
}

fn finish(section: &mut Option<Section>, run: &mut RunBuilder, out: &mut Vec<Section>) -> Result<()> {
    if let Some(mut s) = section.take() {
        let r = std::mem::take(run);
        if !r.is_empty() {
            s.run = Some(r.build()?);
        }
        out.push(s);
    }
    Ok(())
}

/// Parses the text format back into a [`Report`]. The comparison table and
/// per-path counts are derived data and are not read back.
pub fn parse_report(text: &str) -> Result<Report> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(HEADER) {
        return Err(Error::Report(format!("missing '{HEADER}' header")));
    }
    let mut sections = Vec::new();
    let mut declared = None;
    let mut section: Option<Section> = None;
    let mut run = RunBuilder::default();
    let mut part = Part::Run;
    for line in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(head) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            if let Some(label) = head.strip_prefix("section ") {
                finish(&mut section, &mut run, &mut sections)?;
                section = Some(Section {
                    label: unescape(label)?,
                    ..Section::default()
                });
                part = Part::Run;
                continue;
            }
            part = match head {
                "blocks" => Part::Blocks,
                "discarded" => Part::Discarded,
                "psnr region" | "psnr full" => {
                    let full = head == "psnr full";
                    let s = section.as_mut().ok_or_else(|| Error::Report("psnr outside a section".into()))?;
                    let empty = RegionPsnr {
                        frames: Vec::new(),
                        samples: 0,
                        mse: 0.0,
                        psnr: 0.0,
                    };
                    if full {
                        s.full_frame = Some(empty);
                    } else {
                        s.region = Some(empty);
                    }
                    Part::Psnr(full)
                }
                "comparison" => {
                    finish(&mut section, &mut run, &mut sections)?;
                    Part::Comparison
                }
                other => return Err(Error::Report(format!("unknown section '[{other}]'"))),
            };
            continue;
        }
        if section.is_none() {
            match (part, line.split_once('=')) {
                (Part::Comparison, _) => continue,
                (_, Some(("sections", n))) => {
                    declared = Some(parse::<usize>(n, "sections")?);
                    continue;
                }
                _ => return Err(Error::Report(format!("unexpected line '{line}'"))),
            }
        }
        let s = section.as_mut().expect("inside a section");
        match part {
            Part::Run => {
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| Error::Report(format!("expected key=value, got '{line}'")))?;
                match k {
                    "algorithm" => run.algorithm = Some(v.parse()?),
                    "accuracy" => run.accuracy = Some(v.parse()?),
                    "frames" => run.frames = Some(parse(v, "frames")?),
                    "blocks" => run.blocks = Some(parse(v, "blocks")?),
                    "elapsed_ns" => run.elapsed = Duration::from_nanos(parse(v, "elapsed_ns")?),
                    k if k.starts_with("path.") => {}
                    other => return Err(Error::Report(format!("unknown key '{other}'"))),
                }
            }
            Part::Blocks => {
                if !line.starts_with("plane,") {
                    run.records.push(parse_block(line)?);
                }
            }
            Part::Discarded | Part::Comparison => {}
            Part::Psnr(full) => {
                let p = if full { s.full_frame.as_mut() } else { s.region.as_mut() }.expect("psnr block opened");
                if let Some((k, v)) = line.split_once('=') {
                    match k {
                        "samples" => p.samples = parse(v, "samples")?,
                        "mse" => p.mse = parse(v, "mse")?,
                        "psnr" => p.psnr = parse(v, "psnr")?,
                        other => return Err(Error::Report(format!("unknown key '{other}'"))),
                    }
                } else if line != FRAME_COLUMNS {
                    let f: Vec<&str> = line.split(',').collect();
                    if f.len() != 4 {
                        return Err(Error::Report(format!("bad frame row '{line}'")));
                    }
                    p.frames.push(FramePsnr {
                        frame: parse(f[0], "frame")?,
                        samples: parse(f[1], "samples")?,
                        mse: parse(f[2], "mse")?,
                        psnr: parse(f[3], "psnr")?,
                    });
                }
            }
        }
    }
    finish(&mut section, &mut run, &mut sections)?;
    if declared.is_some_and(|n| n != sections.len()) {
        return Err(Error::Report("section count does not match the header".into()));
    }
    Ok(Report { sections })
}

pub fn read_report(path: impl AsRef<Path>) -> Result<Report> {
    parse_report(&fs::read_to_string(path)?)
}
