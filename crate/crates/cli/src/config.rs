//! Command-line flags, the optional JSON config file and the resolved run
//! configuration.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    Scaling,
    Returnmap,
    Cobweb,
    Tower,
    Extension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Tower,
    Pwa,
    Extension,
    Horseshoe,
}

#[derive(Debug, Parser)]
#[command(name = "renorm", version, about = "Period tripling and quintupling renormalization numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Fixed point of the return map with its scaling data
    Solve,
    /// Feasible domain with binding conditions
    Feasible,
    /// Sampled curves for plotting
    Plotdata {
        #[arg(value_enum)]
        kind: PlotKind,
    },
    /// Interval tower of a stationary or symbol-driven sequence
    Tower,
    /// C^{1+Lip} extension by the graph transform
    Extend,
    /// Expanding branch system, cylinder counts and entropy
    Horseshoe,
    /// Invariant suites; exit 0 iff every check passes
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Feasible => "feasible",
            Command::Plotdata { .. } => "plotdata",
            Command::Tower => "tower",
            Command::Extend => "extend",
            Command::Horseshoe => "horseshoe",
            Command::Verify { .. } => "verify",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, global = true)]
    pub period: Option<u32>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Number of grid points for sampled output
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Scan step for the feasible domain
    #[arg(long, global = true)]
    pub step: Option<f64>,
    /// Points per seed segment of the extension
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Comma-separated perturbation parameters
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub eps: Option<Vec<f64>>,
    /// Comma-separated symbol word for a symbol-driven tower
    #[arg(long, global = true, value_delimiter = ',')]
    pub word: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON file with the same keys as the flags; flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    period: Option<u32>,
    tol: Option<f64>,
    depth: Option<usize>,
    grid: Option<usize>,
    step: Option<f64>,
    resolution: Option<usize>,
    eps: Option<Vec<f64>>,
    word: Option<Vec<usize>>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

/// Fully resolved settings, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<PlotKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    pub period: u32,
    pub tol: f64,
    pub depth: usize,
    pub grid: usize,
    pub step: f64,
    pub resolution: usize,
    pub eps: Vec<f64>,
    pub word: Vec<usize>,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub const MAX_DEPTH: usize = 12;
pub const MAX_TOWER_DEPTH: usize = 30;
pub const MAX_GRID: usize = 1_000_000;

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

fn default_depth(command: &Command, period: u32) -> usize {
    match command {
        Command::Tower | Command::Horseshoe => 10,
        Command::Plotdata { kind: PlotKind::Tower } => 10,
        Command::Verify { .. } if period == 5 => 6,
        _ => 8,
    }
}

fn default_format(command: &Command) -> Format {
    match command {
        Command::Plotdata { .. } => Format::Csv,
        _ => Format::Json,
    }
}

impl RunConfig {
    pub fn resolve(command: &Command, flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let period = flags.period.or(file.period).unwrap_or(3);
        if period != 3 && period != 5 {
            return Err(CliError::Usage(format!("period must be 3 or 5, got {period}")));
        }
        let depth = flags.depth.or(file.depth).unwrap_or_else(|| default_depth(command, period));
        let cfg = RunConfig {
            command: command.name().to_string(),
            kind: match command {
                Command::Plotdata { kind } => Some(*kind),
                _ => None,
            },
            suite: match command {
                Command::Verify { suite } => Some(*suite),
                _ => None,
            },
            period,
            tol: flags.tol.or(file.tol).unwrap_or(1e-12),
            depth,
            grid: flags.grid.or(file.grid).unwrap_or(2000),
            step: flags.step.or(file.step).unwrap_or(1e-4),
            resolution: flags.resolution.or(file.resolution).unwrap_or(64),
            eps: flags.eps.clone().or(file.eps).unwrap_or_else(|| vec![1.02, 1.00, 0.98]),
            word: flags.word.clone().or(file.word).unwrap_or_default(),
            seed: flags.seed.or(file.seed).unwrap_or(20),
            format: flags.format.or(file.format).unwrap_or_else(|| default_format(command)),
            out: flags.out.clone().or(file.out),
        };
        cfg.validate(command)?;
        Ok(cfg)
    }

    fn validate(&self, command: &Command) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol must lie in (0, 1), got {}", self.tol));
        }
        if !(self.step > 0.0 && self.step <= 0.05) {
            return bad(format!("step must lie in (0, 0.05], got {}", self.step));
        }
        let cap = match command {
            Command::Tower | Command::Plotdata { kind: PlotKind::Tower } => MAX_TOWER_DEPTH,
            Command::Horseshoe => renorm_core::horseshoe::MAX_CYLINDER_DEPTH,
            _ => MAX_DEPTH,
        };
        if self.depth == 0 || self.depth > cap {
            return bad(format!("depth must lie in 1..={cap}, got {}", self.depth));
        }
        if self.grid < 2 || self.grid > MAX_GRID {
            return bad(format!("grid must lie in 2..={MAX_GRID}, got {}", self.grid));
        }
        if self.resolution < 64 {
            return bad(format!("resolution must be at least 64, got {}", self.resolution));
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return bad(format!("eps values must be positive, got {:?}", self.eps));
        }
        let csv_ok = matches!(
            command,
            Command::Feasible | Command::Plotdata { .. } | Command::Tower | Command::Extend
        );
        if self.format == Format::Csv && !csv_ok {
            return bad(format!("{} has no CSV form", command.name()));
        }
        Ok(())
    }
}
