//! Flag definitions. Each subcommand's flags double as its config-file keys.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "nhlatt", version, about = "Absorbing-impurity tight-binding chain experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues (and optionally site occupancies) at one impurity strength.
    Spectrum(SpectrumArgs),
    /// One wavepacket scattering run: R, T, A.
    Scatter(ScatterArgs),
    /// R, T, A over a grid of gamma values.
    ScanGamma(ScanGammaArgs),
    /// Absorption maximum gamma* as a function of k.
    ScanK(ScanKArgs),
    /// EP location of the central eigenvalue pair for each impurity site.
    ScanQ(ScanQArgs),
    /// Bound eigenstate and its localization length.
    BoundState(BoundStateArgs),
    /// Exceptional point in a gamma window.
    EpLocate(EpLocateArgs),
    /// EP structure for one or more chain lengths.
    ClassifyEp(ClassifyEpArgs),
    /// Occupancy profiles of selected eigenstates.
    Profiles(ProfilesArgs),
    /// Continuum delta-potential R, T, A over a gamma grid.
    Continuum(ContinuumArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Common {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutFormat,
    /// Seed for inverse-iteration start vectors.
    #[arg(long, default_value_t = nhlatt_core::spectral::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// JSON file whose keys override the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Geometry {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: usize,
    /// Impurity site (1-based); the central site when omitted.
    #[arg(long)]
    pub q: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Wavevector {
    /// Carrier wavevector in radians.
    #[arg(long, conflicts_with = "k_pi")]
    pub k: Option<f64>,
    /// Carrier wavevector as a fraction of pi.
    #[arg(long = "k-pi")]
    pub k_pi: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Packet {
    #[arg(long)]
    pub sigma: f64,
    /// Initial centre site; L/4 when omitted.
    #[arg(long)]
    pub j0: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub k: Wavevector,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: Geometry,
    /// Absorbing strength: impurity -i*gamma.
    #[arg(long, conflicts_with = "v")]
    pub gamma: Option<f64>,
    /// Real impurity potential V.
    #[arg(long = "V")]
    #[serde(rename = "V")]
    pub v: Option<f64>,
    #[arg(long, value_enum, default_value = "dense")]
    pub backend: BackendArg,
    /// Append per-site occupancy columns.
    #[arg(long)]
    pub vectors: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendArg {
    Dense,
    Charpoly,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScatterArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: Geometry,
    #[arg(long)]
    pub gamma: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub packet: Packet,
    /// Fixed observation time instead of the automatic window.
    #[arg(long = "t-obs")]
    pub t_obs: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GammaGrid {
    #[arg(long = "gamma-min", default_value_t = 0.0)]
    pub gamma_min: f64,
    #[arg(long = "gamma-max", default_value_t = 10.0)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScanGammaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: Geometry,
    #[command(flatten)]
    #[serde(flatten)]
    pub packet: Packet,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GammaGrid,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScanKArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: Geometry,
    #[arg(long)]
    pub sigma: f64,
    /// Wavevectors as fractions of pi, comma separated.
    #[arg(long = "k-pi", value_delimiter = ',', num_args = 1.., required = true)]
    pub k_pi: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GammaGrid,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScanQArgs {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: usize,
    /// Impurity sites, comma separated; 1..=L/2 when omitted.
    #[arg(long = "qs", value_delimiter = ',', num_args = 1..)]
    pub qs: Vec<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundStateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: Geometry,
    #[arg(long, conflicts_with = "v")]
    pub gamma: Option<f64>,
    #[arg(long = "V")]
    #[serde(rename = "V")]
    pub v: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricArg {
    MinPair,
    CentralPair,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EpLocateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: Geometry,
    #[arg(long = "gamma-min", default_value_t = 1.5)]
    pub gamma_min: f64,
    #[arg(long = "gamma-max", default_value_t = 2.5)]
    pub gamma_max: f64,
    #[arg(long, value_enum, default_value = "min-pair")]
    pub metric: MetricArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ClassifyEpArgs {
    /// Chain lengths, comma separated.
    #[arg(long = "L", value_delimiter = ',', num_args = 1.., required = true)]
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    /// Impurity site; central for each L when omitted.
    #[arg(long)]
    pub q: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ProfilesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: Geometry,
    #[arg(long)]
    pub gamma: f64,
    /// 0-based positions in the (Re, Im)-ordered spectrum; all when omitted.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub indices: Vec<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ContinuumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub k: Wavevector,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GammaGrid,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 0.5)]
    pub mass: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}
