//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "conflab",
    version,
    about = "Conformal curvature operators on the half-space: evaluate sigma_k and B_k, \
             certify bubble solutions, and run moving-sphere checks.",
    after_help = "Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 domain or resolution error.\n\
                  CONFLAB_THREADS caps the worker threads used by grid sweeps."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Emit `"wall_ms": null` so identical runs produce byte-identical JSON.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// sigma_0..sigma_m of a symmetric matrix, with Newton-trace checks.
    Sigma(SigmaArgs),
    /// Schouten tensor of g_u at a point (plus boundary data when x_n = 0).
    Schouten(SchoutenArgs),
    /// Umbilic boundary curvature B_k from (A^T, h) or from a field.
    Bk(BkArgs),
    /// Check that g_u lies in Gamma_k^+ at sample points.
    Cone(ConeArgs),
    /// Certify a bubble: sigma_k, A^T, h and constant B_k.
    BubbleCertify(CertifyArgs),
    /// Solve B_k = c0 for the mean curvature h.
    SolveH(SolveHArgs),
    /// Bubble family with B_k = c0, with a round-trip certification.
    SolveFamily(FamilyArgs),
    /// sigma_k and B_k invariance under a Kelvin inversion.
    KelvinCheck(KelvinArgs),
    /// Pull a half-space bubble back to a ball and check it there.
    BallCheck(BallArgs),
    /// Moving-spheres critical radius at a boundary point.
    LambdaBar(LambdaBarArgs),
    /// lambda_bar^(n-2) u = alpha and the Kelvin fixed point at boundary points.
    Lemma41(Lemma41Args),
    /// Printed constraint against direct B_k evaluation (informational).
    ConstraintReport(ConstraintArgs),
    /// Run the full acceptance suite.
    Suite(SuiteArgs),
    /// Write u, sigma_k or boundary B_k on a 2-D slice as CSV.
    EmitGrid(EmitGridArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sigma(_) => "sigma",
            Command::Schouten(_) => "schouten",
            Command::Bk(_) => "bk",
            Command::Cone(_) => "cone",
            Command::BubbleCertify(_) => "bubble-certify",
            Command::SolveH(_) => "solve-h",
            Command::SolveFamily(_) => "solve-family",
            Command::KelvinCheck(_) => "kelvin-check",
            Command::BallCheck(_) => "ball-check",
            Command::LambdaBar(_) => "lambda-bar",
            Command::Lemma41(_) => "lemma41",
            Command::ConstraintReport(_) => "constraint-report",
            Command::Suite(_) => "suite",
            Command::EmitGrid(_) => "emit-grid",
        }
    }
}

/// A field: either an expression or a bubble `(b, center)`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct FieldArgs {
    /// Dimension n.
    #[arg(long)]
    pub n: usize,

    /// Field as an expression in x1..xn, e.g. "exp(0.1*x1) + 1".
    #[arg(long, conflicts_with_all = ["b", "center"], allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,

    /// Bubble parameter b > 0.
    #[arg(long, requires = "center")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,

    /// Bubble center, comma separated (n values).
    #[arg(long, allow_hyphen_values = true, requires = "b")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SigmaArgs {
    /// "cI" for c times the identity, or the upper triangle row by row, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: String,
    /// Matrix size; required for the "cI" form.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SchoutenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    /// Evaluation point, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BkArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Tangential Schouten block: "cI" or upper triangle of size n-1.
    #[arg(long, allow_hyphen_values = true, requires = "h", conflicts_with_all = ["expr", "b", "center", "x"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
    /// Mean curvature.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Field expression (alternative to --at/--h).
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["b", "center"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[arg(long, requires = "center")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "b")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<String>,
    /// Boundary point for the field form.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub k: usize,
    /// Sample points "x;y;..." with comma separated coordinates; random if omitted.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CertifyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub b: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub center: String,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveModeArg {
    /// Hold A^T fixed.
    FixedAt,
    /// Hold M = A^T + h^2/2 I fixed.
    FixedM,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveHArgs {
    #[arg(long, value_enum, default_value = "fixed-at")]
    pub mode: SolveModeArg,
    /// A^T or M: "cI" or upper triangle of size n-1.
    #[arg(long, allow_hyphen_values = true)]
    pub data: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub c0: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub c0: f64,
    /// Width parameter of the member used for the round trip.
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KelvinArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub k: usize,
    /// Inversion center on x_n = 0; origin if omitted.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BallArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub b: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub center: String,
    /// The ball is B_{2d}(0, d).
    #[arg(long, default_value_t = 0.5)]
    pub d: f64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// Grid as JSON {"shells","r_far_factor","angular","seed"}, or @path to a JSON file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LambdaBarArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    /// Boundary point; origin if omitted.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Lemma41Args {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    /// Boundary points "x;y;..."; origin if omitted.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConstraintArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Mean curvatures, comma separated.
    #[arg(long, default_value = "0.5,1,2")]
    pub h: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    U,
    SigmaK,
    BkBoundary,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EmitGridArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Order for sigma-k and bk-boundary.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// The two varying coordinates, 1-based, e.g. "1,2".
    #[arg(long, default_value = "1,2")]
    pub axes: String,
    /// Range "lo,hi" shared by both axes.
    #[arg(long, default_value = "-2,2", allow_hyphen_values = true)]
    pub range: String,
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
    /// Values of the fixed coordinates (full point, comma separated); origin if omitted.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    pub csv: std::path::PathBuf,
}
