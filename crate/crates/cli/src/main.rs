//! `aperiodix`: words, diffraction, spectra and cohomology of one-dimensional
//! substitution tilings from the command line.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};

use aperiodix_core::diffraction::Decoration;
use aperiodix_core::groups::{SearchBounds, DEFAULT_TOL};
use aperiodix_core::spectral::{Model, DEFAULT_REL_THRESHOLD};
use aperiodix_core::substitution::{BUILTIN_FAMILIES, DEFAULT_LENGTH_CAP};

mod commands;
mod output;
mod svg;

use commands::{BlochArgs, Ctx, GenerateSource, Grid, Labeling, Loaded, SpectralSide};
use output::Sink;

/// A problem with the command line rather than with the computation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[macro_export]
macro_rules! usage {
    ($($t:tt)*) => { anyhow::Error::new($crate::UsageError(format!($($t)*))) };
}

const LENGTH_CAP_VAR: &str = "APERIODIX_LENGTH_CAP";

#[derive(Parser)]
#[command(name = "aperiodix", version, about = "One-dimensional aperiodic tilings: words, diffraction, spectra and cohomology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; results go to standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Source {
    /// Built-in substitution family.
    #[arg(long, value_parser = PossibleValuesParser::new(BUILTIN_FAMILIES), conflicts_with = "rule_file")]
    family: Option<String>,
    /// Substitution rule as JSON: {"alphabet": [...], "images": {...}, "projection": {...}}.
    #[arg(long)]
    rule_file: Option<PathBuf>,
    /// Letter the word is grown from (default: the first letter).
    #[arg(long)]
    seed_letter: Option<String>,
}

impl Source {
    fn given(&self) -> bool {
        self.family.is_some() || self.rule_file.is_some()
    }

    fn load(&self) -> anyhow::Result<Loaded> {
        Loaded::new(self.family.as_deref(), self.rule_file.as_deref(), self.seed_letter.as_deref())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Onsite,
    Hopping,
}

#[derive(Args)]
struct ModelArgs {
    /// Tight-binding model.
    #[arg(long, value_enum, default_value = "onsite")]
    model: ModelKind,
    /// Value attached to the first tile letter.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    va: f64,
    /// Value attached to the second tile letter.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    vb: f64,
    /// Hopping strength scale for the hopping model.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    eps: f64,
}

impl ModelArgs {
    fn model(&self) -> Model<f64> {
        match self.model {
            ModelKind::Onsite => Model::onsite(self.va, self.vb),
            ModelKind::Hopping => Model::hopping(self.eps, self.va, self.vb),
        }
    }
}

#[derive(Args)]
struct LabelArgs {
    /// Gap threshold relative to the median level spacing.
    #[arg(long, default_value_t = DEFAULT_REL_THRESHOLD)]
    rel_threshold: f64,
    /// Largest integer coefficient tried when labeling.
    #[arg(long, default_value_t = SearchBounds::default().coef)]
    q_max: i64,
    /// Largest power of the localizing prime tried when labeling.
    #[arg(long, default_value_t = SearchBounds::default().depth)]
    nmax: u32,
    /// Largest residual accepted for a label.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

impl LabelArgs {
    fn labeling(&self) -> anyhow::Result<Labeling> {
        if !(self.rel_threshold > 0.0) || !(self.tol >= 0.0) || self.q_max < 1 {
            return Err(usage!("--rel-threshold and --q-max must be positive and --tol nonnegative"));
        }
        Ok(Labeling { rel_threshold: self.rel_threshold, bounds: SearchBounds { coef: self.q_max, depth: self.nmax }, tol: self.tol })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecorationArg {
    Identical,
    Signed,
    Auto,
}

#[derive(Subcommand)]
enum Command {
    /// Substitution or cut-and-project word with its atom chain.
    Generate {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 10)]
        order: u32,
        /// Cut-and-project slope instead of a substitution: p/q, golden, 1/golden or a decimal.
        #[arg(long, conflicts_with_all = ["family", "rule_file"])]
        slope: Option<String>,
        /// Cut-and-project phason angle.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phason: f64,
        /// Cut-and-project word length.
        #[arg(long, default_value_t = 144)]
        count: usize,
        /// Standard output format.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Structure factor on a uniform grid of wave numbers.
    Diffract {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 10)]
        order: u32,
        /// Scattering amplitudes and tile lengths.
        #[arg(long, value_enum, default_value = "identical")]
        decoration: DecorationArg,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        kmin: f64,
        #[arg(long, default_value_t = 4.0 * std::f64::consts::PI, allow_negative_numbers = true)]
        kmax: f64,
        #[arg(long, default_value_t = 2048)]
        samples: usize,
        /// Also plot to this SVG file.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Tight-binding eigenvalues.
    Spectrum {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 10)]
        order: u32,
        #[command(flatten)]
        model: ModelArgs,
        /// Standard output format.
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Spectral gaps labeled by the trace group.
    Gaps {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 10)]
        order: u32,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        labels: LabelArgs,
        /// Spectrum written by `spectrum` (CSV or JSON) instead of computing one.
        #[arg(long, alias = "spectrum-file")]
        input: Option<PathBuf>,
    },
    /// Čech H¹ of the tiling space.
    Cohomology {
        #[command(flatten)]
        source: Source,
    },
    /// Image of the cohomology trace.
    Trace {
        #[command(flatten)]
        source: Source,
    },
    /// Gap labels, trace image and Bragg module compared for a built-in family.
    Bloch {
        #[arg(long, value_parser = PossibleValuesParser::new(BUILTIN_FAMILIES))]
        family: String,
        /// Substitution order of the spectral chain (default: about a thousand sites).
        #[arg(long)]
        order: Option<u32>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        labels: LabelArgs,
        /// Output of `spectrum` or `gaps` to use instead of computing a spectrum.
        #[arg(long, alias = "spectrum-file")]
        input: Option<PathBuf>,
        /// Also plot diffraction and counting function to this SVG file.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Diffraction samples in the plot.
        #[arg(long, default_value_t = 2048)]
        samples: usize,
    },
}

fn length_cap() -> anyhow::Result<usize> {
    match std::env::var(LENGTH_CAP_VAR) {
        Ok(v) => v.trim().parse::<usize>().ok().filter(|&c| c > 0).ok_or_else(|| usage!("{LENGTH_CAP_VAR} must be a positive integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_LENGTH_CAP),
    }
}

fn output_dir(out: Option<PathBuf>) -> anyhow::Result<Option<PathBuf>> {
    let Some(dir) = out else { return Ok(None) };
    std::fs::create_dir_all(&dir).map_err(|e| usage!("cannot create output directory {}: {e}", dir.display()))?;
    let meta = std::fs::metadata(&dir).map_err(|e| usage!("{}: {e}", dir.display()))?;
    if !meta.is_dir() || meta.permissions().readonly() {
        return Err(usage!("output directory {} is not writable", dir.display()));
    }
    Ok(Some(dir))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage!("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let ctx = Ctx { sink: Sink::new(output_dir(cli.out)?), cap: length_cap()? };
    match cli.command {
        Command::Generate { source, order, slope, phason, count, format } => {
            let src = match slope {
                Some(slope) => GenerateSource::CutProject { slope, phason, count },
                None => GenerateSource::Rule(source.load()?, order),
            };
            commands::generate(&ctx, src, matches!(format, Format::Json))
        }
        Command::Diffract { source, order, decoration, kmin, kmax, samples, svg } => {
            let decoration = match decoration {
                DecorationArg::Identical => Decoration::Identical,
                DecorationArg::Signed => Decoration::Signed,
                DecorationArg::Auto => Decoration::Auto,
            };
            commands::diffract(&ctx, &source.load()?, order, decoration, &Grid { kmin, kmax, samples }, svg.as_deref())
        }
        Command::Spectrum { source, order, model, format } => commands::spectrum(&ctx, &source.load()?, order, &model.model(), matches!(format, Format::Json)),
        Command::Gaps { source, order, model, labels, input } => {
            let loaded = if source.given() || input.is_none() { Some(source.load()?) } else { None };
            commands::gaps(&ctx, loaded, &SpectralSide { order, model: model.model() }, &labels.labeling()?, input.as_deref())
        }
        Command::Cohomology { source } => commands::cohomology(&ctx, &source.load()?),
        Command::Trace { source } => commands::trace(&ctx, &source.load()?),
        Command::Bloch { family, order, model, labels, input, svg, samples } => {
            let args = BlochArgs { family: &family, order, model: model.model(), lab: labels.labeling()?, input: input.as_deref(), svg, samples };
            commands::bloch(&ctx, &args)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { ExitCode::from(2) } else { ExitCode::SUCCESS };
            }
            let text = e.to_string();
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("aperiodix: {}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("aperiodix: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("aperiodix: {e:#}");
            ExitCode::from(1)
        }
    }
}
