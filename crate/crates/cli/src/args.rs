use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use susyh_core::radial::Sign;

#[derive(Debug, Parser)]
#[command(name = "susyh", version, about = "Relativistic hydrogen in D dimensions: spectra, N=2 supersymmetry checks and level schemes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Numerical against closed-form E/m for one κ sector.
    Spectrum(SpectrumArgs),
    /// Clifford algebra and the supersymmetry identity suite.
    Verify(VerifyArgs),
    /// Kernel doublet of A: normalization, annihilation order, Rayleigh quotient.
    Kernel(KernelArgs),
    /// Level-scheme dataset with SUSY partner links.
    Levels(LevelsArgs),
    /// Eigenvalue errors and fitted order over a grid family.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A single dimension `3` or an inclusive range `2:9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimRange {
    pub lo: u32,
    pub hi: u32,
}

impl DimRange {
    pub fn dims(&self) -> Vec<u32> {
        (self.lo..=self.hi).collect()
    }
}

impl fmt::Display for DimRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}:{}", self.lo, self.hi)
        }
    }
}

impl FromStr for DimRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("not a dimension: {t:?}"));
        let (lo, hi) = match s.split_once(':') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let d = parse(s)?;
                (d, d)
            }
        };
        if lo > hi {
            return Err(format!("empty dimension range {lo}:{hi}"));
        }
        if lo < 2 {
            return Err(format!("D must be at least 2, got {lo}"));
        }
        Ok(Self { lo, hi })
    }
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    s.parse::<Sign>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct Common {
    /// Spatial dimension, or an inclusive range a:b.
    #[arg(long = "D", default_value = "3")]
    pub dim: DimRange,
    #[arg(long, default_value_t = 0.5)]
    pub zalpha: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Primary grid nodes (the finest grid for refinement studies).
    #[arg(long, default_value_t = 800)]
    pub grid_points: usize,
    /// Outer radius in units of 1/m; sized from the requested levels if omitted.
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    #[arg(long, default_value = "+", value_parser = parse_sign, allow_hyphen_values = true)]
    pub sign: Sign,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GridArgs,
    /// |κ| values, comma separated; defaults to the two smallest allowed.
    #[arg(long, value_delimiter = ',')]
    pub abs_kappa: Vec<f64>,
    /// Levels per sector for the pairing check.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Exact gamma-matrix checks only.
    #[arg(long)]
    pub clifford_only: bool,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 0)]
    pub l: u32,
}

#[derive(Debug, Args)]
pub struct LevelsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 4)]
    pub n_max: u32,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    #[arg(long, default_value = "+", value_parser = parse_sign, allow_hyphen_values = true)]
    pub sign: Sign,
    #[arg(long, default_value_t = 2)]
    pub levels: usize,
}
