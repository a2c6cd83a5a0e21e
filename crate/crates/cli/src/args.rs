//! Command-line surface. Every parameter struct doubles as the `params`
//! object of a JSON config file; flags given on the command line win.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Parser, Debug)]
#[command(name = "skewlab", version, about = "Experiments on cocycles over torus rotations")]
pub struct Cli {
    /// JSON run configuration merged under the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Working precision in bits for rotation vectors and expansions.
    #[arg(long, global = true)]
    pub bits: Option<u32>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for CSV/JSON artifacts; falls back to `OUTPUT_DIR`.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Continued fraction, convergents and the convergent chain.
    Cf(CfArgs),
    /// Ostrowski digits of an integer.
    Ostrowski(OstrowskiArgs),
    /// Inhomogeneous approximation margin `min q ||q theta - x||`.
    Badmargin(BadMarginArgs),
    /// Ergodic sums along an orbit, optional grid sup and L2 growth.
    Sums(SumsArgs),
    /// Fourier coefficients, decay check and the L2 bound chain.
    Fourier(FourierArgs),
    /// Transfer-function solution of a coboundary equation.
    Coboundary(CoboundaryArgs),
    /// Coding partition of the torus, optionally as SVG/JSON.
    Partition(PartitionArgs),
    /// Hypothesis checks on a schedule of partitions.
    Eqfunct(EqfunctArgs),
    /// Gap statistics of a rotation orbit plus shifts.
    Gaps(GapsArgs),
    /// Best simultaneous approximations `||n1 a1 - n2 a2||`.
    Schmidt(SchmidtArgs),
    /// Near returns of ergodic sums to zero.
    Recur(RecurArgs),
    /// Essential-value events on a grid.
    Essval(EssvalArgs),
    /// Weyl averages of the compact extension.
    Weyl(WeylArgs),
    /// Shear conjugation residual.
    Conjugation(ConjugationArgs),
    /// Runs a reproduction suite and reports PASS/FAIL per criterion.
    Reproduce(ReproduceArgs),
    /// Throughput of a computational kernel.
    Bench(BenchArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Cf(_) => "cf",
            Command::Ostrowski(_) => "ostrowski",
            Command::Badmargin(_) => "badmargin",
            Command::Sums(_) => "sums",
            Command::Fourier(_) => "fourier",
            Command::Coboundary(_) => "coboundary",
            Command::Partition(_) => "partition",
            Command::Eqfunct(_) => "eqfunct",
            Command::Gaps(_) => "gaps",
            Command::Schmidt(_) => "schmidt",
            Command::Recur(_) => "recur",
            Command::Essval(_) => "essval",
            Command::Weyl(_) => "weyl",
            Command::Conjugation(_) => "conjugation",
            Command::Reproduce(_) => "reproduce",
            Command::Bench(_) => "bench",
        }
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CfArgs {
    /// Expression such as `(sqrt(5)-1)/2`, `sqrt2`, `e` or `355/113`.
    #[arg(long)]
    pub value: Option<String>,
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OstrowskiArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct BadMarginArgs {
    #[arg(long)]
    pub theta: Option<String>,
    /// Inhomogeneous shift; 0 gives the homogeneous margin.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub q_max: Option<u64>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SumsArgs {
    /// Rotation vector, e.g. `sqrt2-1, sqrt3-1`.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Map name from the registry, e.g. `xy_quarter` or `triangle0`.
    #[arg(long)]
    pub map: Option<String>,
    /// Base point `x1,x2`.
    #[arg(long)]
    pub x: Option<String>,
    /// Comma-separated n values; defaults to 4 per decade up to `n_max`.
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Also report the sup over a `G x G` grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Monte-Carlo points for the L2 growth fit (0 disables it).
    #[arg(long)]
    pub l2_points: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct FourierArgs {
    /// `triangle`, `sawtooth` or `parabola`.
    #[arg(long)]
    pub kind: Option<String>,
    /// Triangle parameters `a,b,c`.
    #[arg(long)]
    pub triangle: Option<String>,
    #[arg(long)]
    pub h_max: Option<i64>,
    /// Drop the mean from a triangle spectrum.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub centered: bool,
    /// Rotation vector for the L2 bound chain.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Exponent in (1, 2) for the chain.
    #[arg(long)]
    pub t: Option<f64>,
    /// Chain evaluated at `N = 2^4 .. 2^log2_n_max`.
    #[arg(long)]
    pub log2_n_max: Option<u32>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CoboundaryArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    /// `parabola` (`x(1-x) - 1/6`) or `sawtooth` (`{x} - 1/2`).
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub h_max: Option<i64>,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub ell: Option<usize>,
    /// Rectangles only, without diagonal lines.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub no_diagonals: bool,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Nominal SVG width in pixels.
    #[arg(long)]
    pub size: Option<u32>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct EqfunctArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    /// Number of denominators of the second coordinate to use.
    #[arg(long)]
    pub count: Option<usize>,
    /// Explicit `ell` list overriding the denominator schedule.
    #[arg(long)]
    pub ells: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct GapsArgs {
    #[arg(long)]
    pub alpha1: Option<String>,
    /// Shifts `beta_j`, comma-separated.
    #[arg(long)]
    pub betas: Option<String>,
    #[arg(long)]
    pub n: Option<u64>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SchmidtArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long)]
    pub per_decade: Option<u32>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RecurArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Comma-separated radii.
    #[arg(long)]
    pub radii: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct EssvalArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub map: Option<String>,
    /// Base set: `all` or `x0,x1,y0,y1; ...`.
    #[arg(long = "box")]
    #[serde(rename = "box")]
    pub base: Option<String>,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    /// Test `|phi_n|` instead of `phi_n`.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub abs: bool,
    /// Comma-separated n values.
    #[arg(long)]
    pub ns: Option<String>,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct WeylArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    /// Scalar map multiplying the fiber vector.
    #[arg(long)]
    pub map: Option<String>,
    /// Fiber translation vector, comma-separated.
    #[arg(long)]
    pub fiber: Option<String>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub h_bound: Option<i64>,
    #[arg(long)]
    pub k_bound: Option<i64>,
    #[arg(long)]
    pub x0: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ConjugationArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub fiber: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ReproduceArgs {
    /// Suite name, or `all`.
    pub suite: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, deny_unknown_fields)]
pub struct BenchArgs {
    /// `ergodic-sum`, `arrangement` or `weyl`.
    pub kernel: Option<String>,
    #[arg(long)]
    pub size: Option<u64>,
}
