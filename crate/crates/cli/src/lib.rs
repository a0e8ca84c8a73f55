//! Command-line front end: `aps <subcommand> [options]`.
//!
//! [`run`] returns the process exit code: 0 on success, 1 for usage errors,
//! 2 for unreadable or invalid data, 3 for internal failures.

pub mod config;

use std::ffi::OsString;
use std::io::Write as _;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use aps_core::ingest::{self, IngestError};
use aps_core::metrics::metric_table;
use aps_core::reduce::pca_project;
use aps_core::select::{exhaustive_search, greedy_search};
use aps_core::viz::{mini_aps_grid, pca_scatter_svg};
use aps_core::{
    report, ColorBy, HighlightGroup, MatrixError, MetricReport, PcaProjection, PerformanceMatrix, PlotSpec,
    ReduceError, SearchMode, SearchResult, SelectError, VizError,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use config::{
    parse_config_file, DifficultyArg, DiversityArg, FormatArg, ImputationArg, Overrides, RunConfig, Workers,
    OUTPUT_DIR_ENV,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: IngestError },
    #[error("{0}")]
    Data(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Data(_) => 2,
            CliError::Write { .. } | CliError::Internal(_) => 3,
        }
    }
}

macro_rules! data_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(err: $t) -> Self {
                CliError::Data(err.to_string())
            }
        }
    )*};
}
data_error!(MatrixError, ReduceError, VizError, aps_core::MetricsError);

impl From<SelectError> for CliError {
    fn from(err: SelectError) -> Self {
        match err {
            SelectError::SizeTooSmall(_) | SelectError::ZeroTopK => CliError::Usage(err.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "aps", version, about = "Algorithm performance space toolkit")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Performance table (CSV, wide or long)
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, global = true, value_enum)]
    difficulty: Option<DifficultyArg>,
    /// How the bounding-box volume enters Diversity
    #[arg(long, global = true, value_enum)]
    diversity: Option<DiversityArg>,
    /// Missing-cell handling for PCA
    #[arg(long, global = true, value_enum)]
    imputation: Option<ImputationArg>,
    /// Output directory [env: APS_OUTPUT_DIR] [default: ./aps-out]
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,
    /// Search threads: a positive integer or `auto`
    #[arg(long, global = true, value_name = "N|auto")]
    workers: Option<Workers>,
    /// File of `key = value` lines; flags take precedence
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print cell counts and warnings for the input
    Validate,
    /// Write metrics.csv with Difficulty and Variance per dataset
    Metrics,
    /// Search for maximally or minimally diverse dataset selections
    Select(SelectArgs),
    /// Write pca.csv and pca_ratios.csv
    Pca {
        #[arg(long, default_value_t = 2)]
        components: usize,
    },
    /// Write SVG plots
    Plot(PlotArgs),
    /// Write report.md summarizing metrics, selections and PCA
    Report {
        #[arg(long, default_value = "2..4", value_parser = parse_size_range)]
        size: RangeInclusive<usize>,
        #[arg(long, default_value_t = 3)]
        top: usize,
    },
}

#[derive(Debug, Args)]
struct SelectArgs {
    /// Selection size or inclusive range, e.g. `3` or `2..4`
    #[arg(long, value_parser = parse_size_range)]
    size: RangeInclusive<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Max)]
    mode: ModeArg,
    #[arg(long, default_value_t = 5)]
    top: usize,
    /// Greedy growth from the best pair instead of exhaustive search
    #[arg(long)]
    greedy: bool,
    /// Only use these algorithms, so rows complete on them become eligible
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    algorithms: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Max,
    Min,
}

impl From<ModeArg> for SearchMode {
    fn from(arg: ModeArg) -> Self {
        match arg {
            ModeArg::Max => SearchMode::Max,
            ModeArg::Min => SearchMode::Min,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlotKind {
    Mini,
    Pca,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ColorByArg {
    Difficulty,
    Variance,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(value_enum)]
    kind: PlotKind,
    /// One plot per ordered algorithm pair (mini only)
    #[arg(long)]
    ordered: bool,
    /// Fill PCA points by a per-dataset metric
    #[arg(long, value_enum)]
    color_by: Option<ColorByArg>,
    /// `name:prefix:#RRGGBB`, repeatable; replaces the default groups
    #[arg(long, value_parser = parse_highlight)]
    highlight: Vec<HighlightGroup>,
    #[arg(long, default_value_t = 600)]
    width: u32,
    #[arg(long, default_value_t = 600)]
    height: u32,
}

fn parse_size_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| format!("expected a size like `3` or `2..4`, got {s:?}"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo < 2 || hi < lo {
        return Err(format!("size range {s:?} must satisfy 2 <= A <= B"));
    }
    Ok(lo..=hi)
}

fn parse_highlight(s: &str) -> Result<HighlightGroup, String> {
    let mut parts = s.splitn(3, ':');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(name), Some(prefix), Some(color)) if !name.is_empty() && !prefix.is_empty() => {
            Ok(HighlightGroup::new(name, prefix, color))
        }
        _ => Err(format!("expected `name:prefix:#RRGGBB`, got {s:?}")),
    }
}

fn default_highlights() -> Vec<HighlightGroup> {
    vec![
        HighlightGroup::new("MovieLens", "MovieLens", "#8a2be2"),
        HighlightGroup::new("Amazon", "Amazon_", "#000000"),
    ]
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code. Diagnostics go to standard error.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn resolve_config(global: &GlobalArgs) -> Result<RunConfig, CliError> {
    let file = match &global.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config_file(path, &text)?
        }
        None => Overrides::default(),
    };
    let flags = Overrides {
        input_path: global.input.clone(),
        input_format: global.format,
        difficulty_orientation: global.difficulty,
        diversity_variant: global.diversity,
        pca_imputation: global.imputation,
        output_dir: global.output_dir.clone(),
        worker_count: global.workers,
    };
    let env = std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    Ok(RunConfig::resolve(file, flags, env))
}

struct Context {
    config: RunConfig,
    matrix: PerformanceMatrix,
}

impl Context {
    fn load(config: RunConfig) -> Result<Self, CliError> {
        let path = config
            .input_path
            .clone()
            .ok_or_else(|| CliError::Usage("no input: pass --input or set input_path in --config".into()))?;
        let text = std::fs::read_to_string(&path).map_err(|source| CliError::Read {
            path: path.clone(),
            source,
        })?;
        let format = config.input_format.resolve(&text);
        let matrix = ingest::parse(&text, format).map_err(|source| CliError::Parse { path, source })?;
        Ok(Self { config, matrix })
    }

    fn metrics(&self) -> Result<MetricReport, CliError> {
        Ok(metric_table(&self.matrix, self.config.difficulty_orientation.into())?)
    }

    fn pca(&self, components: usize) -> Result<PcaProjection, CliError> {
        Ok(pca_project(&self.matrix, components, self.config.pca_imputation.into())?)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.worker_count.threads())
            .build()
            .map_err(|e| CliError::Internal(format!("cannot start worker pool: {e}")))
    }

    fn search(
        &self,
        matrix: &PerformanceMatrix,
        sizes: RangeInclusive<usize>,
        modes: &[SearchMode],
        top: usize,
        greedy: bool,
    ) -> Result<Vec<SearchResult>, CliError> {
        let variant = self.config.diversity_variant.into();
        let pool = self.pool()?;
        pool.install(|| {
            let mut results = Vec::new();
            for &mode in modes {
                for size in sizes.clone() {
                    results.push(if greedy {
                        greedy_search(matrix, size, mode, variant)?
                    } else {
                        exhaustive_search(matrix, size, mode, top, variant)?
                    });
                }
            }
            Ok(results)
        })
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        write_atomic(&self.config.output_dir, name, contents)
    }
}

/// Writes through a temporary file in `dir` and renames it into place.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let fail = |source| CliError::Write {
        path: path.clone(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(fail)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.persist(&path).map_err(|e| fail(e.error))?;
    Ok(path)
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let config = resolve_config(&cli.global)?;
    eprintln!("{config}");
    let ctx = Context::load(config)?;

    match cli.command {
        Command::Validate => {
            print!("{}", ingest::validate(&ctx.matrix));
        }
        Command::Metrics => {
            announce(&ctx.write("metrics.csv", &report::metrics_csv(&ctx.metrics()?))?);
        }
        Command::Select(args) => {
            if args.top == 0 {
                return Err(CliError::Usage("--top must be at least 1".into()));
            }
            let restricted;
            let matrix = match &args.algorithms {
                Some(names) => {
                    let names: Vec<&str> = names.iter().map(String::as_str).collect();
                    restricted = ctx.matrix.select_algorithms(&names)?;
                    &restricted
                }
                None => &ctx.matrix,
            };
            let results = ctx.search(matrix, args.size, &[args.mode.into()], args.top, args.greedy)?;
            for r in &results {
                eprintln!(
                    "size {}: {} candidates evaluated ({})",
                    r.size,
                    r.candidates_evaluated,
                    r.mode.as_str()
                );
            }
            announce(&ctx.write("selections.csv", &report::selections_csv(&results))?);
        }
        Command::Pca { components } => {
            let projection = ctx.pca(components)?;
            announce(&ctx.write("pca.csv", &report::pca_csv(&projection))?);
            announce(&ctx.write("pca_ratios.csv", &report::pca_ratios_csv(&projection))?);
        }
        Command::Plot(args) => plot(&ctx, args)?,
        Command::Report { size, top } => {
            if top == 0 {
                return Err(CliError::Usage("--top must be at least 1".into()));
            }
            let validation = ingest::validate(&ctx.matrix);
            let metrics = ctx.metrics()?;
            let selections = ctx.search(&ctx.matrix, size, &[SearchMode::Max, SearchMode::Min], top, false)?;
            let pca = ctx.pca(2.min(ctx.matrix.dimension()))?;
            let source = ctx
                .config
                .input_path
                .as_deref()
                .map(|p| p.display().to_string())
                .unwrap_or_default();
            let md = report::markdown(&report::Summary {
                source: &source,
                validation: Some(&validation),
                metrics: Some(&metrics),
                selections: &selections,
                pca: Some(&pca),
            });
            announce(&ctx.write("report.md", &md)?);
        }
    }
    Ok(())
}

fn plot(ctx: &Context, args: PlotArgs) -> Result<(), CliError> {
    let spec = PlotSpec {
        width_px: args.width,
        height_px: args.height,
        highlight_groups: if args.highlight.is_empty() {
            default_highlights()
        } else {
            args.highlight
        },
        color_by: args.color_by.map(|c| match c {
            ColorByArg::Difficulty => ColorBy::Difficulty,
            ColorByArg::Variance => ColorBy::Variance,
        }),
        ..PlotSpec::default()
    };
    match args.kind {
        PlotKind::Mini => {
            let grid = mini_aps_grid(&ctx.matrix, &spec, args.ordered)?;
            for warning in &grid.warnings {
                eprintln!("warning: {warning}");
            }
            for plot in &grid.plots {
                announce(&ctx.write(&plot.file_name(), &plot.svg)?);
            }
        }
        PlotKind::Pca => {
            let projection = ctx.pca(2)?;
            let values: Option<Vec<Option<f64>>> = match spec.color_by {
                None => None,
                Some(by) => {
                    let metrics = ctx.metrics()?;
                    Some(
                        projection
                            .dataset_ids
                            .iter()
                            .map(|id| {
                                metrics.get(id.as_str()).and_then(|row| match by {
                                    ColorBy::Difficulty => Some(row.difficulty),
                                    ColorBy::Variance => row.variance,
                                })
                            })
                            .collect(),
                    )
                }
            };
            let svg = pca_scatter_svg(&projection, values.as_deref(), &spec)?;
            announce(&ctx.write("pca.svg", &svg)?);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ranges() {
        assert_eq!(parse_size_range("2..4").unwrap(), 2..=4);
        assert_eq!(parse_size_range("3").unwrap(), 3..=3);
        assert_eq!(parse_size_range("2..=3").unwrap(), 2..=3);
        assert!(parse_size_range("1..3").is_err());
        assert!(parse_size_range("4..2").is_err());
        assert!(parse_size_range("x").is_err());
    }

    #[test]
    fn highlights() {
        let g = parse_highlight("ML:MovieLens:#8a2be2").unwrap();
        assert_eq!((g.name.as_str(), g.prefix.as_str(), g.color.as_str()), ("ML", "MovieLens", "#8a2be2"));
        assert!(parse_highlight("ML:#fff").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage(String::new()).exit_code(), 1);
        assert_eq!(CliError::Data(String::new()).exit_code(), 2);
        assert_eq!(CliError::Internal(String::new()).exit_code(), 3);
        assert_eq!(CliError::from(SelectError::ZeroTopK).exit_code(), 1);
        assert_eq!(CliError::from(SelectError::NoCompleteRows).exit_code(), 2);
    }
}
