use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tailfit_core::{Margins, TailFamily, WeightPreset, ZetaProfile};

#[derive(Debug, Parser)]
#[command(name = "tailfit", version, about = "Rank-based tail dependence estimation")]
pub struct Cli {
    /// Random seed for simulation and optimizer starts.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "TAILFIT_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a sample from one of the simulation models.
    Simulate(SimulateArgs),
    /// Fit a bivariate tail model to two columns of a CSV file.
    Fit(FitArgs),
    /// Fit the spatial model to all columns of a CSV file.
    FitSpatial(FitSpatialArgs),
    /// Run a Monte Carlo study from a TOML config.
    Study(StudyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    M1,
    M2,
    M3,
    Ibr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MarginsArg {
    Uniform,
    Frechet,
}

impl From<MarginsArg> for Margins {
    fn from(m: MarginsArg) -> Self {
        match m {
            MarginsArg::Uniform => Margins::Uniform,
            MarginsArg::Frechet => Margins::Frechet,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// M1 parameter θ ∈ (1/2, 1].
    #[arg(long)]
    pub theta: Option<f64>,
    /// M2 parameters.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// M3 tail indices.
    #[arg(long)]
    pub alpha_r: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha_w: f64,
    /// Spatial variogram parameters.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Locations CSV with columns `id,x,y` (spatial model).
    #[arg(long)]
    pub coords: Option<PathBuf>,
    #[arg(long)]
    pub n: usize,
    /// Add independent Pareto noise with this tail index.
    #[arg(long)]
    pub noise_alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = MarginsArg::Frechet)]
    pub margins: MarginsArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    InvertedHuslerReiss,
    InvertedAsymLogistic,
    RandomScale,
    HuslerReissAd,
    AsymLogisticAd,
}

impl From<FamilyArg> for TailFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::InvertedHuslerReiss => TailFamily::InvertedHuslerReiss,
            FamilyArg::InvertedAsymLogistic => TailFamily::InvertedAsymLogistic,
            FamilyArg::RandomScale => TailFamily::RandomScale,
            FamilyArg::HuslerReissAd => TailFamily::HuslerReissAD,
            FamilyArg::AsymLogisticAd => TailFamily::AsymLogisticAD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZetaArg {
    InnerProduct,
    RatioOfSums,
}

impl From<ZetaArg> for ZetaProfile {
    fn from(z: ZetaArg) -> Self {
        match z {
            ZetaArg::InnerProduct => ZetaProfile::InnerProduct,
            ZetaArg::RatioOfSums => ZetaProfile::RatioOfSums,
        }
    }
}

#[derive(Debug, Args)]
#[group(id = "threshold", required = true, multiple = false)]
pub struct Threshold {
    /// Number of upper order statistics.
    #[arg(long, group = "threshold")]
    pub k: Option<usize>,
    /// Target number of joint exceedances; `k` is chosen to reach it.
    #[arg(long, group = "threshold")]
    pub m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[command(flatten)]
    pub threshold: Threshold,
    /// Columns to pair, by 0-based index or header name.
    #[arg(long, num_args = 2, value_names = ["COL1", "COL2"])]
    pub columns: Option<Vec<String>>,
    #[arg(long, default_value = "g1")]
    pub weights: WeightPreset,
    /// Reference parameter for the weight norms (default: family's own).
    #[arg(long, num_args = 1..=2)]
    pub theta_ref: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = ZetaArg::InnerProduct)]
    pub zeta_profile: ZetaArg,
    /// Report the plug-in covariance of (θ̂, nζ̂/m).
    #[arg(long)]
    pub covariance: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpatialMethodArg {
    Pairwise,
    Ls,
    Joint,
}

#[derive(Debug, Args)]
pub struct FitSpatialArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Locations CSV with columns `id,x,y`, one row per input column.
    #[arg(long)]
    pub coords: PathBuf,
    #[arg(long, value_enum, default_value_t = SpatialMethodArg::Ls)]
    pub method: SpatialMethodArg,
    /// Target number of joint exceedances per pair.
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value = "g1")]
    pub weights: WeightPreset,
    #[arg(long, value_enum, default_value_t = ZetaArg::InnerProduct)]
    pub zeta_profile: ZetaArg,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for `<name>_raw.csv`, `<name>_summary.csv` and, for spatial studies, `<name>_pairs.csv`.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Override the replication count of the config.
    #[arg(long)]
    pub replications: Option<usize>,
}
