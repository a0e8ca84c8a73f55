//! Resolved run configuration: defaults, then the config file, then flags.

use std::fmt;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use aps_core::{DifficultyOrientation, Imputation, TableFormat, VolumeRoot};
use clap::ValueEnum;

use crate::CliError;

pub const OUTPUT_DIR_ENV: &str = "APS_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "./aps-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum FormatArg {
    #[default]
    Auto,
    Wide,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum DifficultyArg {
    #[default]
    OneMinusMean,
    RawMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum DiversityArg {
    #[default]
    NthRoot,
    LiteralSqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ImputationArg {
    #[default]
    CompleteRowsOnly,
    ZeroFill,
    ColumnMean,
}

impl FormatArg {
    pub fn resolve(self, text: &str) -> TableFormat {
        match self {
            FormatArg::Auto => aps_core::ingest::detect_format(text),
            FormatArg::Wide => TableFormat::Wide,
            FormatArg::Long => TableFormat::Long,
        }
    }
}

impl From<DifficultyArg> for DifficultyOrientation {
    fn from(arg: DifficultyArg) -> Self {
        match arg {
            DifficultyArg::OneMinusMean => DifficultyOrientation::OneMinusMean,
            DifficultyArg::RawMean => DifficultyOrientation::RawMean,
        }
    }
}

impl From<DiversityArg> for VolumeRoot {
    fn from(arg: DiversityArg) -> Self {
        match arg {
            DiversityArg::NthRoot => VolumeRoot::NthRoot,
            DiversityArg::LiteralSqrt => VolumeRoot::LiteralSqrt,
        }
    }
}

impl From<ImputationArg> for Imputation {
    fn from(arg: ImputationArg) -> Self {
        match arg {
            ImputationArg::CompleteRowsOnly => Imputation::CompleteRowsOnly,
            ImputationArg::ZeroFill => Imputation::ZeroFill,
            ImputationArg::ColumnMean => Imputation::ColumnMean,
        }
    }
}

/// `auto` or a positive thread count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    #[default]
    Auto,
    Count(NonZeroUsize),
}

impl Workers {
    /// Thread count for a rayon pool builder, where 0 means "let rayon decide".
    pub fn threads(self) -> usize {
        match self {
            Workers::Auto => 0,
            Workers::Count(n) => n.get(),
        }
    }
}

impl FromStr for Workers {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Workers::Auto);
        }
        s.parse::<NonZeroUsize>()
            .map(Workers::Count)
            .map_err(|_| format!("expected a positive integer or `auto`, got {s:?}"))
    }
}

impl fmt::Display for Workers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Workers::Auto => f.write_str("auto"),
            Workers::Count(n) => write!(f, "{n}"),
        }
    }
}

fn value_name<E: ValueEnum>(value: E) -> String {
    value
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub input_path: Option<PathBuf>,
    pub input_format: FormatArg,
    pub difficulty_orientation: DifficultyArg,
    pub diversity_variant: DiversityArg,
    pub pca_imputation: ImputationArg,
    pub output_dir: PathBuf,
    pub worker_count: Workers,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input_path: None,
            input_format: FormatArg::default(),
            difficulty_orientation: DifficultyArg::default(),
            diversity_variant: DiversityArg::default(),
            pca_imputation: ImputationArg::default(),
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            worker_count: Workers::default(),
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let input = self
            .input_path
            .as_deref()
            .map(|p| p.display().to_string())
            .unwrap_or_default();
        writeln!(f, "input_path = {input}")?;
        writeln!(f, "input_format = {}", value_name(self.input_format))?;
        writeln!(f, "difficulty_orientation = {}", value_name(self.difficulty_orientation))?;
        writeln!(f, "diversity_variant = {}", value_name(self.diversity_variant))?;
        writeln!(f, "pca_imputation = {}", value_name(self.pca_imputation))?;
        writeln!(f, "output_dir = {}", self.output_dir.display())?;
        write!(f, "worker_count = {}", self.worker_count)
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub input_path: Option<PathBuf>,
    pub input_format: Option<FormatArg>,
    pub difficulty_orientation: Option<DifficultyArg>,
    pub diversity_variant: Option<DiversityArg>,
    pub pca_imputation: Option<ImputationArg>,
    pub output_dir: Option<PathBuf>,
    pub worker_count: Option<Workers>,
}

fn enum_value<E: ValueEnum>(path: &Path, line: usize, key: &str, value: &str) -> Result<E, CliError> {
    E::from_str(value, false).map_err(|_| {
        let allowed: Vec<String> = E::value_variants().iter().map(|v| value_name(v.clone())).collect();
        CliError::Usage(format!(
            "{}:{line}: invalid value {value:?} for {key} (expected one of: {})",
            path.display(),
            allowed.join(", ")
        ))
    })
}

/// Reads flat `key = value` lines. Blank lines and lines starting with `#`
/// are ignored.
pub fn parse_config_file(path: &Path, text: &str) -> Result<Overrides, CliError> {
    let mut out = Overrides::default();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{line}: expected `key = value`",
                path.display()
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "input_path" => out.input_path = Some(PathBuf::from(value)),
            "input_format" => out.input_format = Some(enum_value(path, line, key, value)?),
            "difficulty_orientation" => out.difficulty_orientation = Some(enum_value(path, line, key, value)?),
            "diversity_variant" => out.diversity_variant = Some(enum_value(path, line, key, value)?),
            "pca_imputation" => out.pca_imputation = Some(enum_value(path, line, key, value)?),
            "output_dir" => out.output_dir = Some(PathBuf::from(value)),
            "worker_count" => {
                out.worker_count = Some(
                    value
                        .parse()
                        .map_err(|e| CliError::Usage(format!("{}:{line}: worker_count: {e}", path.display())))?,
                )
            }
            other => {
                return Err(CliError::Usage(format!(
                    "{}:{line}: unknown key {other:?}",
                    path.display()
                )))
            }
        }
    }
    Ok(out)
}

impl RunConfig {
    /// Flags override the file; the environment only fills an output directory
    /// that neither sets.
    pub fn resolve(file: Overrides, flags: Overrides, env_output_dir: Option<PathBuf>) -> Self {
        let d = RunConfig::default();
        RunConfig {
            input_path: flags.input_path.or(file.input_path),
            input_format: flags.input_format.or(file.input_format).unwrap_or(d.input_format),
            difficulty_orientation: flags
                .difficulty_orientation
                .or(file.difficulty_orientation)
                .unwrap_or(d.difficulty_orientation),
            diversity_variant: flags
                .diversity_variant
                .or(file.diversity_variant)
                .unwrap_or(d.diversity_variant),
            pca_imputation: flags.pca_imputation.or(file.pca_imputation).unwrap_or(d.pca_imputation),
            output_dir: flags
                .output_dir
                .or(file.output_dir)
                .or(env_output_dir)
                .unwrap_or(d.output_dir),
            worker_count: flags.worker_count.or(file.worker_count).unwrap_or(d.worker_count),
        }
    }
}
