//! Command-line front end: `corrupt`, `conceal`, `evaluate` and `pipeline`.
//!
//! `pipeline` writes exactly the files that the other three subcommands would
//! write when chained by hand with the same flags.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::evaluation::{full_frame_psnr, psnr_region};
use crate::fse::{Dims3, DEFAULT_GRID};
use crate::loss::{
    apply_loss, generate_pattern, read_mask, write_mask, ErrorFrame, InterleavedLayout, LossMask, PatternKind,
    DEFAULT_FILL, MACROBLOCK,
};
use crate::motion::ReliabilityConfig;
use crate::pipeline::{conceal_sequence, Accuracy, Algorithm, ConcealConfig, RunReport};
use crate::report::{write_report, Report, ReportOptions, Section};
use crate::sequence::{read_raw_video, write_raw_video, PixelFormat, VideoSequence};
use crate::synthetic::{synthetic_sequence, SyntheticSpec};

#[derive(Debug, Parser)]
#[command(name = "mcfse", version, about = "Video error concealment with motion compensated 3D frequency selective extrapolation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Imprint a loss pattern on a video and write the distorted video and its mask.
    Corrupt(CorruptArgs),
    /// Conceal the lost regions of a distorted video.
    Conceal(ConcealArgs),
    /// Compare a processed video against its original.
    Evaluate(EvaluateArgs),
    /// Corrupt, conceal with one or more algorithms and evaluate in one pass.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Args)]
pub struct VideoArgs {
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    /// Raw sample layout: gray8 or yuv420p.
    #[arg(long, default_value = "gray8")]
    pub format: PixelFormat,
}

#[derive(Debug, Clone, Args)]
pub struct SyntheticArgs {
    /// Generate the original video instead of reading --input.
    #[arg(long)]
    pub synthetic: bool,
    #[arg(long, default_value_t = 6)]
    pub frames: usize,
    /// Horizontal motion of the synthetic texture in samples per frame.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub shift_x: f64,
    /// Vertical motion of the synthetic texture in samples per frame.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub shift_y: f64,
    /// Peak amplitude of uniform noise added to the synthetic video.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Highest spatial frequency of the synthetic texture in radians per sample.
    #[arg(long, default_value_t = 0.6)]
    pub max_frequency: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct PatternArgs {
    /// dispersed, interleaved or mixed.
    #[arg(long, default_value = "dispersed")]
    pub pattern: PatternKind,
    /// Frames that receive the pattern. Defaults to every --error-step-th frame from --error-start.
    #[arg(long, value_delimiter = ',')]
    pub error_frames: Option<Vec<usize>>,
    #[arg(long, default_value_t = 2)]
    pub error_start: usize,
    #[arg(long, default_value_t = 2)]
    pub error_step: usize,
    /// Do not shift the pattern in every other error frame.
    #[arg(long)]
    pub no_toggle: bool,
    /// Value written into lost samples.
    #[arg(long, default_value_t = DEFAULT_FILL)]
    pub fill: u8,
    /// Macroblock row period of the interleaved pattern.
    #[arg(long, default_value_t = 4)]
    pub row_period: usize,
    /// Segment width of the interleaved pattern in macroblocks (default: half the frame).
    #[arg(long)]
    pub segment_mbs: Option<usize>,
}

impl PatternArgs {
    fn error_frames(&self, frame_count: usize) -> Result<Vec<ErrorFrame>> {
        let frames: Vec<usize> = match &self.error_frames {
            Some(list) => list.clone(),
            None => {
                if self.error_step == 0 {
                    return Err(Error::Parameter("--error-step must be positive".into()));
                }
                (self.error_start..frame_count).step_by(self.error_step).collect()
            }
        };
        if let Some(&bad) = frames.iter().find(|&&t| t >= frame_count) {
            return Err(Error::Parameter(format!("error frame {bad} beyond the {frame_count} frames")));
        }
        Ok(if self.no_toggle {
            frames.into_iter().map(|frame| ErrorFrame { frame, shifted: false }).collect()
        } else {
            ErrorFrame::alternating(frames)
        })
    }

    fn mask(&self, seq: &VideoSequence) -> Result<LossMask> {
        let layout = InterleavedLayout {
            row_period: self.row_period,
            segment_mbs: self.segment_mbs,
        };
        generate_pattern(
            self.pattern,
            seq.width(),
            seq.height(),
            seq.frame_count(),
            &self.error_frames(seq.frame_count())?,
            layout,
        )
    }
}

fn parse_grid(s: &str) -> std::result::Result<Dims3, String> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    if parts.len() != 3 {
        return Err(format!("expected MxNxP, got '{s}'"));
    }
    let n = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("'{p}': {e}"));
    Ok(Dims3::new(n(parts[0])?, n(parts[1])?, n(parts[2])?))
}

/// Overrides for every field of [`ConcealConfig`].
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Motion search precision: full, half or quarter.
    #[arg(long, default_value = "quarter")]
    pub accuracy: Accuracy,
    /// Border width of the extrapolation volume in samples.
    #[arg(long, default_value_t = 16)]
    pub border: usize,
    /// Previous frames in the volume.
    #[arg(long, default_value_t = 2)]
    pub prev: usize,
    /// Future frames in the volume; also enables the future reference of the baselines.
    #[arg(long, default_value_t = 0)]
    pub next: usize,
    /// Decay factor of the weighting function.
    #[arg(long, default_value_t = 0.8)]
    pub rho_hat: f64,
    /// Weight factor for samples concealed earlier in the same frame.
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    /// Update damping factor (default 0.7, or 1 for fse3d).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Model generation iterations (default 800, or 200 for fse3d).
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Transform grid as MxNxP.
    #[arg(long, default_value_t = DEFAULT_GRID, value_parser = parse_grid)]
    pub grid: Dims3,
    /// Motion search range in full samples.
    #[arg(long, default_value_t = 16)]
    pub d_max: usize,
    /// Width of the decision area ring in samples.
    #[arg(long, default_value_t = 4)]
    pub decision_border: usize,
    /// Reliability threshold on the mean error per sample.
    #[arg(long, default_value_t = 10.0)]
    pub t_abs: f64,
    /// Reliability threshold on the error spread across references.
    #[arg(long, default_value_t = 3.0)]
    pub t_rel: f64,
    #[arg(long, default_value_t = MACROBLOCK)]
    pub block_size: usize,
    /// Conceal the chroma planes of yuv420p input as well.
    #[arg(long)]
    pub chroma: bool,
}

impl ConfigArgs {
    pub fn config(&self, algorithm: Algorithm, accuracy: Accuracy) -> Result<ConcealConfig> {
        let cfg = ConcealConfig {
            algorithm,
            accuracy,
            border: self.border,
            prev: self.prev,
            next: self.next,
            rho_hat: self.rho_hat,
            delta: self.delta,
            gamma: self.gamma,
            iterations: self.iterations,
            grid: self.grid,
            d_max: self.d_max,
            decision_border: self.decision_border,
            reliability: ReliabilityConfig {
                t_abs: self.t_abs,
                t_rel: self.t_rel,
            },
            block_size: self.block_size,
            chroma: self.chroma,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct CorruptArgs {
    #[command(flatten)]
    pub video: VideoArgs,
    #[command(flatten)]
    pub synthetic: SyntheticArgs,
    #[command(flatten)]
    pub pattern: PatternArgs,
    /// Original video; not needed with --synthetic.
    #[arg(long, required_unless_present = "synthetic")]
    pub input: Option<PathBuf>,
    /// Where to write the generated original (with --synthetic).
    #[arg(long, requires = "synthetic")]
    pub original: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub mask: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ConcealArgs {
    #[command(flatten)]
    pub video: VideoArgs,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// tr, ebma, dmve, fse3d, fse3d-od or mcfse.
    #[arg(long, default_value = "mcfse")]
    pub algo: Algorithm,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub video: VideoArgs,
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Loss mask selecting the evaluated region.
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub video: VideoArgs,
    #[command(flatten)]
    pub synthetic: SyntheticArgs,
    #[command(flatten)]
    pub pattern: PatternArgs,
    #[arg(long, required_unless_present = "synthetic")]
    pub input: Option<PathBuf>,
    /// Comma separated algorithms, each optionally suffixed with `:accuracy`.
    #[arg(long, value_delimiter = ',', default_value = "mcfse")]
    pub algos: Vec<String>,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub timing: bool,
}

/// Label used for a run in reports and file names.
pub fn run_label(algorithm: Algorithm, accuracy: Accuracy) -> String {
    format!("{algorithm}-{accuracy}")
}

fn parse_algo(spec: &str, default: Accuracy) -> Result<(Algorithm, Accuracy)> {
    match spec.split_once(':') {
        Some((a, acc)) => Ok((a.parse()?, acc.parse()?)),
        None => Ok((spec.parse()?, default)),
    }
}

fn original(video: &VideoArgs, synthetic: &SyntheticArgs, input: Option<&Path>) -> Result<VideoSequence> {
    if synthetic.synthetic {
        if video.format != PixelFormat::Gray8 {
            return Err(Error::Parameter("synthetic video is gray8 only".into()));
        }
        return synthetic_sequence(&SyntheticSpec {
            width: video.width,
            height: video.height,
            frames: synthetic.frames,
            shift_x: synthetic.shift_x,
            shift_y: synthetic.shift_y,
            noise: synthetic.noise,
            max_frequency: synthetic.max_frequency,
            seed: synthetic.seed,
        });
    }
    let path = input.ok_or_else(|| Error::Parameter("--input is required without --synthetic".into()))?;
    read_raw_video(path, video.width, video.height, video.format)
}

fn read_video(video: &VideoArgs, path: &Path) -> Result<VideoSequence> {
    read_raw_video(path, video.width, video.height, video.format)
}

pub fn run_corrupt(args: &CorruptArgs) -> Result<()> {
    let seq = original(&args.video, &args.synthetic, args.input.as_deref())?;
    let mask = args.pattern.mask(&seq)?;
    let lossy = apply_loss(&seq, &mask, args.pattern.fill)?;
    if let Some(path) = &args.original {
        write_raw_video(&seq, path)?;
    }
    write_raw_video(&lossy, &args.output)?;
    write_mask(&mask, &args.mask)?;
    println!(
        "corrupted {} frames: {} samples lost in {} frames",
        seq.frame_count(),
        mask.total_lost(),
        (0..mask.frame_count()).filter(|&t| mask.frame_has_loss(t)).count()
    );
    Ok(())
}

fn conceal_report(run: RunReport, label: String) -> Report {
    Report {
        sections: vec![Section {
            label,
            run: Some(run),
            ..Section::default()
        }],
    }
}

fn summary(run: &RunReport) -> String {
    use crate::pipeline::PathTag::*;
    format!(
        "{} blocks: aligned {}, fixed {}, tr {}, ebma {}, dmve {}, retained {}",
        run.records.len(),
        run.count(Aligned),
        run.count(Fixed),
        run.count(Tr),
        run.count(Ebma),
        run.count(Dmve),
        run.count(Retained)
    )
}

pub fn run_conceal(args: &ConcealArgs) -> Result<()> {
    let cfg = args.config.config(args.algo, args.config.accuracy)?;
    let seq = read_video(&args.video, &args.input)?;
    let mask = read_mask(&args.mask, args.video.width, args.video.height)?;
    let (out, run) = conceal_sequence(&seq, &mask, &cfg)?;
    write_raw_video(&out, &args.output)?;
    println!("{}: {}", run_label(cfg.algorithm, cfg.accuracy), summary(&run));
    if let Some(path) = &args.report {
        let report = conceal_report(run, run_label(cfg.algorithm, cfg.accuracy));
        write_report(&report, ReportOptions { timing: args.timing }, path)?;
    }
    Ok(())
}

fn evaluation_section(reference: &VideoSequence, test: &VideoSequence, mask: &LossMask, label: String) -> Result<Section> {
    let region = if mask.total_lost() > 0 {
        Some(psnr_region(reference, test, mask)?)
    } else {
        None
    };
    Ok(Section {
        label,
        run: None,
        region,
        full_frame: Some(full_frame_psnr(reference, test)?),
    })
}

pub fn run_evaluate(args: &EvaluateArgs) -> Result<()> {
    let reference = read_video(&args.video, &args.reference)?;
    let test = read_video(&args.video, &args.test)?;
    let mask = read_mask(&args.mask, args.video.width, args.video.height)?;
    let section = evaluation_section(&reference, &test, &mask, "evaluation".into())?;
    match &section.region {
        Some(r) => println!("region psnr {:.4} dB over {} samples", r.psnr, r.samples),
        None => println!("no lost samples in the mask"),
    }
    if let Some(f) = &section.full_frame {
        println!("full-frame psnr {:.4} dB", f.psnr);
    }
    if let Some(path) = &args.report {
        write_report(&Report { sections: vec![section] }, ReportOptions::default(), path)?;
    }
    Ok(())
}

/// File names written by `pipeline` inside its output directory.
pub mod files {
    pub const ORIGINAL: &str = "original.yuv";
    pub const CORRUPTED: &str = "corrupted.yuv";
    pub const MASK: &str = "mask.bin";
    pub const COMPARISON: &str = "comparison.txt";

    pub fn concealed(label: &str) -> String {
        format!("{label}.yuv")
    }

    pub fn conceal_report(label: &str) -> String {
        format!("{label}.conceal.txt")
    }

    pub fn evaluate_report(label: &str) -> String {
        format!("{label}.evaluate.txt")
    }
}

pub fn run_pipeline(args: &PipelineArgs) -> Result<()> {
    let runs = args
        .algos
        .iter()
        .map(|s| parse_algo(s.trim(), args.config.accuracy))
        .collect::<Result<Vec<_>>>()?;
    let configs = runs
        .iter()
        .map(|&(a, acc)| args.config.config(a, acc))
        .collect::<Result<Vec<_>>>()?;
    let seq = original(&args.video, &args.synthetic, args.input.as_deref())?;
    let mask = args.pattern.mask(&seq)?;
    let lossy = apply_loss(&seq, &mask, args.pattern.fill)?;

    let dir = &args.out_dir;
    fs::create_dir_all(dir)?;
    if args.synthetic.synthetic {
        write_raw_video(&seq, dir.join(files::ORIGINAL))?;
    }
    write_raw_video(&lossy, dir.join(files::CORRUPTED))?;
    write_mask(&mask, dir.join(files::MASK))?;

    let opts = ReportOptions { timing: args.timing };
    let mut comparison = Vec::new();
    for cfg in &configs {
        let label = run_label(cfg.algorithm, cfg.accuracy);
        let (out, run) = conceal_sequence(&lossy, &mask, cfg)?;
        write_raw_video(&out, dir.join(files::concealed(&label)))?;
        write_report(&conceal_report(run.clone(), label.clone()), opts, dir.join(files::conceal_report(&label)))?;
        let eval = evaluation_section(&seq, &out, &mask, "evaluation".into())?;
        write_report(
            &Report {
                sections: vec![eval.clone()],
            },
            ReportOptions::default(),
            dir.join(files::evaluate_report(&label)),
        )?;
        println!(
            "{label}: {} | region psnr {}",
            summary(&run),
            eval.region.as_ref().map_or("-".into(), |r| format!("{:.4} dB", r.psnr))
        );
        comparison.push(Section {
            label,
            run: Some(run),
            region: eval.region,
            full_frame: eval.full_frame,
        });
    }
    write_report(&Report { sections: comparison }, opts, dir.join(files::COMPARISON))?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Corrupt(a) => run_corrupt(a),
        Command::Conceal(a) => run_conceal(a),
        Command::Evaluate(a) => run_evaluate(a),
        Command::Pipeline(a) => run_pipeline(a),
    }
}

/// Applies `FSE_THREADS` to the global thread pool.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("FSE_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Parameter(format!("FSE_THREADS must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(Error::Parameter("FSE_THREADS must be positive".into()));
        }
        // a pool may already exist when embedded; the first one wins
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Entry point of the `mcfse` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("mcfse").chain(args.iter().copied()))
    }

    #[test]
    fn defaults_equal_the_reference_configuration() {
        let cli = parse(&[
            "conceal", "--width", "64", "--height", "64", "--input", "a", "--mask", "m", "--output", "o", "--algo",
            "mcfse", "--accuracy", "quarter",
        ])
        .unwrap();
        let Command::Conceal(a) = cli.command else { panic!() };
        let cfg = a.config.config(a.algo, a.config.accuracy).unwrap();
        assert_eq!(cfg, ConcealConfig::new(Algorithm::Mcfse));
        let p = cfg.fse_params();
        assert_eq!((p.gamma, p.iterations), (0.7, 800));
        assert_eq!((cfg.reliability.t_abs, cfg.reliability.t_rel), (10.0, 3.0));
    }

    #[test]
    fn explicit_defaults_match_implicit_ones() {
        let base = ["conceal", "--width", "64", "--height", "64", "--input", "a", "--mask", "m", "--output", "o"];
        let implicit = parse(&base).unwrap();
        let mut explicit: Vec<&str> = base.to_vec();
        explicit.extend([
            "--algo", "mcfse", "--accuracy", "quarter", "--border", "16", "--prev", "2", "--next", "0", "--rho-hat",
            "0.8", "--delta", "0.2", "--grid", "64x64x16", "--d-max", "16", "--decision-border", "4", "--t-abs", "10",
            "--t-rel", "3", "--block-size", "16",
        ]);
        let explicit = parse(&explicit).unwrap();
        let (Command::Conceal(a), Command::Conceal(b)) = (implicit.command, explicit.command) else { panic!() };
        assert_eq!(a.config.config(a.algo, a.config.accuracy).unwrap(), b.config.config(b.algo, b.config.accuracy).unwrap());
    }

    #[test]
    fn missing_width_is_reported() {
        let err = parse(&["conceal", "--height", "64", "--input", "a", "--mask", "m", "--output", "o"]).unwrap_err();
        assert!(err.to_string().contains("--width"));
    }

    #[test]
    fn algo_specs_and_grids_parse() {
        assert_eq!(parse_algo("mcfse:full", Accuracy::Quarter).unwrap(), (Algorithm::Mcfse, Accuracy::Full));
        assert_eq!(parse_algo("tr", Accuracy::Half).unwrap(), (Algorithm::Tr, Accuracy::Half));
        assert!(parse_algo("mcfse:eighth", Accuracy::Half).is_err());
        assert_eq!(parse_grid("48x48x3").unwrap(), Dims3::new(48, 48, 3));
        assert!(parse_grid("48x48").is_err());
    }

    #[test]
    fn default_error_frames_alternate() {
        let cli = parse(&["corrupt", "--width", "64", "--height", "64", "--synthetic", "--output", "o", "--mask", "m"])
            .unwrap();
        let Command::Corrupt(a) = cli.command else { panic!() };
        let frames = a.pattern.error_frames(7).unwrap();
        assert_eq!(
            frames,
            vec![
                ErrorFrame { frame: 2, shifted: false },
                ErrorFrame { frame: 4, shifted: true },
                ErrorFrame { frame: 6, shifted: false },
            ]
        );
    }
}
