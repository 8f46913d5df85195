//! Batch command line: analyze, synth, render, lod, serve.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use strokesynth::io::svg::Background;
use strokesynth::io::{
    export_svg, load_document, modulate_attributes, save_document, synthesize_lod, AttributeMap,
    LodOptions, LuminanceImage, PatternDocument, SvgStyle,
};
use strokesynth::synthesis::{synthesize, SynthesisRequest};
use strokesynth::{analyze, AnalysisParams, Behavior, PatternType, ReferenceFrame, TargetRegion, Vec2};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "strokesynth", version, about = "Example-based hatching and stippling synthesis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TypeArg {
    Hatching,
    Stippling,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FrameArg {
    #[value(name = "1d")]
    OneD,
    #[value(name = "2d")]
    TwoD,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BehaviorArg {
    Sampling,
    Copying,
    Cloning,
}

impl From<BehaviorArg> for Behavior {
    fn from(b: BehaviorArg) -> Self {
        match b {
            BehaviorArg::Sampling => Behavior::Sampling,
            BehaviorArg::Copying => Behavior::Copying,
            BehaviorArg::Cloning => Behavior::Cloning,
        }
    }
}

#[derive(clap::Args, Debug)]
struct SynthArgs {
    /// Target region document (JSON `{"kind": "polygon" | "path", "points": [[x, y], ...]}`).
    #[arg(long)]
    region: PathBuf,
    #[arg(long, value_enum, default_value = "sampling")]
    behavior: BehaviorArg,
    /// Correction amount in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the node count.
    #[arg(long)]
    n: Option<usize>,
    /// Override the target spacing ratio σ/μ.
    #[arg(long)]
    r_star: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(clap::Args, Debug)]
struct ModulationArgs {
    /// PNG whose tones drive stroke attributes; also drawn under the strokes.
    #[arg(long)]
    background: Option<PathBuf>,
    /// Attribute map JSON (`width`, `opacity`, `color` breakpoint lists).
    #[arg(long, requires = "background")]
    map: Option<PathBuf>,
    /// Pattern units per background pixel.
    #[arg(long, default_value_t = 1.0)]
    pixel_size: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze the document strokes and store the analysis in the document.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// Output document; defaults to rewriting the input.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        epsilon: f64,
        #[arg(long = "type", value_enum)]
        pattern_type: TypeArg,
        #[arg(long, value_enum)]
        frame: FrameArg,
        /// Main axis `x0,y0,x1,y1` for 1D frames; fitted to the strokes when absent.
        #[arg(long, value_delimiter = ',')]
        axis: Option<Vec<f64>>,
        /// Reference area polygon for 2D frames (region document).
        #[arg(long)]
        area: Option<PathBuf>,
    },
    /// Synthesize a pattern from the document analysis and append it to the document.
    Synth {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        synth: SynthArgs,
    },
    /// Write a stored pattern as SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        /// SVG path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Pattern index; defaults to the last one.
        #[arg(long)]
        pattern: Option<usize>,
        #[command(flatten)]
        modulation: ModulationArgs,
        #[arg(long)]
        show_region: bool,
    },
    /// Synthesize at several scales and write one SVG per scale.
    Lod {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        scales: Vec<f64>,
        #[command(flatten)]
        synth: SynthArgs,
        /// Scale element extents with the region.
        #[arg(long)]
        scale_extents: bool,
    },
    /// Run the HTTP service.
    Serve {
        /// Bind address; defaults to $STROKESYNTH_BIND or 127.0.0.1:8080.
        #[arg(long)]
        bind: Option<String>,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn data(message: impl fmt::Display) -> CliError {
    CliError {
        code: EXIT_DATA,
        message: message.to_string(),
    }
}

fn usage(message: impl fmt::Display) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn read_document(path: &Path) -> Result<PatternDocument, CliError> {
    load_document(&read(path)?).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_slice(&read(path)?).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn read_region(path: &Path) -> Result<TargetRegion, CliError> {
    let region: TargetRegion = read_json(path)?;
    region.validate().map_err(|e| data(format!("{}: {e}", path.display())))?;
    Ok(region)
}

fn request(args: &SynthArgs) -> Result<SynthesisRequest, CliError> {
    let mut req = SynthesisRequest::new(read_region(&args.region)?, args.behavior.into(), args.alpha, args.seed);
    req.overrides.n = args.n;
    req.overrides.r_star = args.r_star;
    req.overrides.max_iters = args.max_iters;
    req.validate().map_err(usage)?;
    Ok(req)
}

fn background(args: &ModulationArgs) -> Result<Option<(LuminanceImage, Background)>, CliError> {
    let Some(path) = &args.background else {
        return Ok(None);
    };
    if !(args.pixel_size > 0.0) {
        return Err(usage("--pixel-size must be positive"));
    }
    let png = read(path)?;
    let lum = LuminanceImage::from_png(&png)
        .map_err(|e| data(format!("{}: {e}", path.display())))?
        .placed(Vec2::ZERO, args.pixel_size);
    let bg = Background {
        width_px: lum.width,
        height_px: lum.height,
        png,
        origin: Vec2::ZERO,
        pixel_size: args.pixel_size,
    };
    Ok(Some((lum, bg)))
}

fn run_command(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze {
            input,
            out,
            epsilon,
            pattern_type,
            frame,
            axis,
            area,
        } => {
            let mut doc = read_document(&input)?;
            let frame = match (frame, axis) {
                (FrameArg::OneD, Some(a)) if a.len() != 4 => {
                    return Err(usage("--axis takes four numbers x0,y0,x1,y1"))
                }
                (FrameArg::OneD, Some(a)) => {
                    ReferenceFrame::one_d(Vec2::new(a[0], a[1]), Vec2::new(a[2], a[3])).map_err(usage)?
                }
                (FrameArg::OneD, None) => ReferenceFrame::one_d_fitted(&doc.strokes).map_err(data)?,
                (FrameArg::TwoD, Some(_)) => return Err(usage("--axis applies to 1D frames")),
                (FrameArg::TwoD, None) => ReferenceFrame::TwoD {
                    region: match area {
                        Some(p) => match read_region(&p)? {
                            TargetRegion::Polygon { points } => Some(points),
                            TargetRegion::Path { .. } => return Err(data("reference area must be a polygon")),
                        },
                        None => None,
                    },
                },
            };
            let pattern_type = match pattern_type {
                TypeArg::Hatching => PatternType::Hatching,
                TypeArg::Stippling => PatternType::Stippling,
            };
            let params = AnalysisParams::new(pattern_type, frame, epsilon);
            params.validate().map_err(usage)?;
            let analysis = analyze(&doc.strokes, &params).map_err(data)?;
            doc.params = Some(params);
            doc.analysis = Some(analysis);
            doc.patterns.clear();
            write(out.as_ref().unwrap_or(&input), &save_document(&doc))
        }
        Command::Synth { input, out, synth } => {
            let mut doc = read_document(&input)?;
            let req = request(&synth)?;
            let analysis = doc.analysis.as_ref().ok_or_else(|| data("document has no analysis"))?;
            let pattern = synthesize(analysis, &req).map_err(data)?;
            for w in &pattern.warnings {
                eprintln!("warning: {}", serde_json::to_string(w).unwrap_or_default());
            }
            doc.patterns.push(pattern);
            write(out.as_ref().unwrap_or(&input), &save_document(&doc))
        }
        Command::Render {
            input,
            out,
            pattern,
            modulation,
            show_region,
        } => {
            let doc = read_document(&input)?;
            let index = pattern.unwrap_or(doc.patterns.len().saturating_sub(1));
            let mut p = doc
                .patterns
                .get(index)
                .cloned()
                .ok_or_else(|| data("document has no pattern to render"))?;
            let mut style = SvgStyle {
                show_region,
                ..Default::default()
            };
            if let Some((lum, bg)) = background(&modulation)? {
                if let Some(map_path) = &modulation.map {
                    let map: AttributeMap = read_json(map_path)?;
                    p = modulate_attributes(&p, &lum, &map).map_err(data)?;
                }
                style.background = Some(bg);
            }
            let svg = export_svg(&p, &style);
            match out {
                Some(path) => write(&path, svg.as_bytes()),
                None => {
                    print!("{svg}");
                    Ok(())
                }
            }
        }
        Command::Lod {
            input,
            out_dir,
            scales,
            synth,
            scale_extents,
        } => {
            let doc = read_document(&input)?;
            let req = request(&synth)?;
            let analysis = doc.analysis.as_ref().ok_or_else(|| data("document has no analysis"))?;
            let patterns = synthesize_lod(analysis, &req.region, &scales, &req, LodOptions { scale_extents })
                .map_err(data)?;
            std::fs::create_dir_all(&out_dir).map_err(|e| data(format!("{}: {e}", out_dir.display())))?;
            for (i, (p, k)) in patterns.iter().zip(&scales).enumerate() {
                let path = out_dir.join(format!("lod-{i}-x{k}.svg"));
                write(&path, export_svg(p, &SvgStyle::default()).as_bytes())?;
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Serve { bind } => {
            let addr = bind
                .or_else(|| std::env::var(crate::BIND_ENV).ok())
                .unwrap_or_else(|| crate::DEFAULT_BIND.to_string());
            let rt = tokio::runtime::Runtime::new().map_err(data)?;
            rt.block_on(crate::http::serve(&addr)).map_err(data)
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run_command(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
