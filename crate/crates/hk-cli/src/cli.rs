//! Argument tree for the `hk` binary.
//!
//! Parse errors exit with code 2 through clap, matching the input-error
//! class used by the command bodies.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hk_core::{CapVariant, Operator, ParabolaCase};

/// Fallback seed when neither `--seed` nor `HK_DEFAULT_SEED` is given.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(
    name = "hk",
    version,
    about = "Weighted mean identities, their prism geometry, and guarded midpoint reconstruction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weighted arithmetic and harmonic means, the gap between them, and
    /// the equal-weight scaling relation.
    Means(MeansArgs),
    /// Assemble a prism scene, verify the common crossing point, and
    /// compare the analytic point with the damped Newton solve.
    Geometry(GeometryArgs),
    /// Sample scene surfaces and markers into a plottable artifact.
    Figure(FigureArgs),
    /// Run linear and guarded midpoint reconstruction on a test signal.
    Recon(ReconArgs),
    /// Run the seeded property suite across all modules.
    Verify(VerifyArgs),
}

/// Output encoding. JSON is canonical; CSV is a lossy projection available
/// for figures and reconstruction tables only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Scene cap selection, plus the rescaled corollary construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    /// Flat cap; the crossing height is `w_n * h_w`.
    Thm3,
    /// Paraboloid cap; the crossing height is `h_w / n`.
    Thm4,
    /// Rescaled sample `a_i / w_i` under equal weights; every surface
    /// flattens and the crossing height is `h_w` itself.
    Corollary,
}

impl VariantArg {
    pub fn name(self) -> &'static str {
        match self {
            VariantArg::Thm3 => "thm3",
            VariantArg::Thm4 => "thm4",
            VariantArg::Corollary => "corollary",
        }
    }

    /// Cap for the non-rescaled scenes; `None` selects the corollary build.
    pub fn cap(self) -> Option<CapVariant> {
        match self {
            VariantArg::Thm3 => Some(CapVariant::Plane),
            VariantArg::Thm4 => Some(CapVariant::Paraboloid),
            VariantArg::Corollary => None,
        }
    }
}

/// Built-in reconstruction test signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignalArg {
    /// Unit jump at one half on `[0, 1]`.
    Step,
    /// `sin(x)` on `[0.6, 2.5]`, where the curvature stays bounded away
    /// from zero.
    Sin,
    /// A fixed cubic on `[0, 1]`; the linear operator reproduces it to
    /// rounding.
    Cubic,
    /// Grid samples loaded from `--samples FILE`.
    Custom,
}

impl SignalArg {
    pub fn name(self) -> &'static str {
        match self {
            SignalArg::Step => "step",
            SignalArg::Sin => "sin",
            SignalArg::Cubic => "cubic",
            SignalArg::Custom => "custom",
        }
    }
}

/// Which midpoint operators a recon run reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    Linear,
    Pph,
    Both,
}

impl OperatorArg {
    pub fn name(self) -> &'static str {
        match self {
            OperatorArg::Linear => "linear",
            OperatorArg::Pph => "pph",
            OperatorArg::Both => "both",
        }
    }

    pub fn wants(self, op: Operator) -> bool {
        matches!(
            (self, op),
            (OperatorArg::Both, _)
                | (OperatorArg::Linear, Operator::Linear)
                | (OperatorArg::Pph, Operator::Pph)
        )
    }
}

pub fn case_from_index(index: u8) -> ParabolaCase {
    match index {
        1 => ParabolaCase::Case1,
        2 => ParabolaCase::Case2,
        _ => ParabolaCase::Case3,
    }
}

#[derive(Debug, Args)]
pub struct MeansArgs {
    /// Comma-separated strictly positive sample values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub a: Vec<f64>,
    /// Comma-separated positive weights, or the literal `uniform`.
    /// Weights are normalized to unit sum.
    #[arg(long, required = true)]
    pub w: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Recorded in the artifact provenance.
    #[arg(long, env = "HK_DEFAULT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// Comma-separated strictly positive sample values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub a: Vec<f64>,
    /// Comma-separated positive weights, or the literal `uniform`.
    #[arg(long, required = true)]
    pub w: String,
    #[arg(long, value_enum, default_value_t = VariantArg::Thm3)]
    pub variant: VariantArg,
    /// Two-point construction to report alongside the scene; only valid
    /// for samples of length two.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub case: Option<u8>,
    /// Seeds the extra random Newton starts.
    #[arg(long, env = "HK_DEFAULT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Comma-separated strictly positive sample values (two or three of
    /// them; surfaces do not exist above three dimensions).
    #[arg(long, value_delimiter = ',', required = true)]
    pub a: Vec<f64>,
    /// Comma-separated positive weights, or the literal `uniform`.
    #[arg(long, required = true)]
    pub w: String,
    #[arg(long, value_enum, default_value_t = VariantArg::Thm3)]
    pub variant: VariantArg,
    /// Draw one of the three two-point parabola constructions instead of
    /// the scene surfaces; only valid for samples of length two.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub case: Option<u8>,
    /// Samples per axis; defaults to 101 for two points and 51 for three.
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long, env = "HK_DEFAULT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconArgs {
    #[arg(long, value_enum, default_value_t = SignalArg::Sin)]
    pub signal: SignalArg,
    /// JSON file with fields `x` and `f` (equal-length arrays); required
    /// for `--signal custom`.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Dyadic refinement levels for the built-in signals.
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    #[arg(long, value_enum, default_value_t = OperatorArg::Both)]
    pub operator: OperatorArg,
    #[arg(long, env = "HK_DEFAULT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Seed for the property generators; identical seeds replay the exact
    /// case set.
    #[arg(long, env = "HK_DEFAULT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Random cases per property (fixed-input properties run once).
    #[arg(long, default_value_t = 250)]
    pub cases: usize,
    /// Negative control: corrupt the closed-form gap before the identity
    /// check so the suite must report a failure.
    #[arg(long, hide = true, default_value_t = false)]
    pub inject_bug: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
