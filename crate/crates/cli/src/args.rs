//! Command-line surface. Every subcommand's arguments serialize into the
//! output so a result file records how it was produced.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "idc-bench", version, about = "Private query release experiments on graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a G(V, p) graph and write it as an edge list.
    GenGraph(GenGraphArgs),
    /// Write a stream of cut queries, one JSON object per line.
    GenQueries(GenQueriesArgs),
    /// Answer a cut-query stream online with an IDC-backed mechanism.
    ReleaseOnline(OnlineArgs),
    /// Build a synthetic database offline with the iterative construction.
    ReleaseOffline(OfflineArgs),
    /// Randomized-response graph release, optional projection and rounding.
    RrSynth(RrArgs),
    /// Sweep (|V|, density, epsilon) and report errors next to the bound shapes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IdcKind {
    Fk,
    Mw,
    Mm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    Online,
    Ic,
    Rr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistinguisherKind {
    /// Exponential mechanism over a sampled cut class.
    Expmech,
    /// Non-private SVD rank-1 search; the privacy report is refused.
    Svd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    Spectral,
    SpectralNormalized,
    Bruteforce,
    /// Skip projection; report the clipped noisy graph.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamMode {
    Uniform,
    /// Max-gap cuts chased by an exact Frieze-Kannan hypothesis. Reads the
    /// graph exactly, so it is for tests only.
    Adversarial,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Leave the runtime column empty so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphSource {
    /// Edge-list graph file.
    #[arg(long, conflicts_with_all = ["gen_v", "gen_p"])]
    pub graph: Option<PathBuf>,
    /// Generate a G(V, p) graph per trial instead.
    #[arg(long, requires = "gen_p")]
    pub gen_v: Option<usize>,
    #[arg(long, requires = "gen_v")]
    pub gen_p: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Replace every noise draw by 0. The flag exists only in builds with the
    /// `test-hooks` feature; library callers can always set the field.
    #[cfg_attr(feature = "test-hooks", arg(long))]
    #[cfg_attr(not(feature = "test-hooks"), arg(skip))]
    pub zero_noise: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenGraphArgs {
    #[arg(long)]
    pub v: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenQueriesArgs {
    #[arg(long)]
    pub v: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    pub mode: StreamMode,
    /// Graph the adversarial stream is computed against.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Update scale of the hypothesis the adversarial stream chases.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OnlineArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    #[arg(long, value_enum, default_value = "fk")]
    pub idc: IdcKind,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
    /// Target accuracy on the canonical scale.
    #[arg(long, required_unless_present = "alpha_auto", conflicts_with = "alpha_auto")]
    pub alpha: Option<f64>,
    /// Choose alpha so that the threshold sits at the bottom of its window.
    #[arg(long)]
    pub alpha_auto: bool,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    /// Number of queries (uniform random cuts unless --queries is given).
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    /// Query stream file; its length overrides --k.
    #[arg(long)]
    pub queries: Option<PathBuf>,
    #[arg(long, default_value_t = idc_release::online::DEFAULT_SIGMA_CONSTANT)]
    pub sigma_const: f64,
    #[arg(long, default_value_t = idc_release::online::DEFAULT_T_CONSTANT)]
    pub t_const: f64,
    /// Reject configurations whose threshold falls outside its window.
    #[arg(long)]
    pub strict: bool,
    /// Cap on the median mechanism's initial candidate set.
    #[arg(long, default_value_t = idc_release::idc::DEFAULT_CANDIDATE_CAP)]
    pub mm_cap: u64,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OfflineArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    #[arg(long, value_enum, default_value = "fk")]
    pub idc: IdcKind,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
    #[arg(long)]
    pub alpha: f64,
    /// Failure probability used to certify the distinguisher.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_enum, default_value = "expmech")]
    pub distinguisher: DistinguisherKind,
    /// Size of the sampled cut class the exponential mechanism chooses from.
    #[arg(long, default_value_t = 200)]
    pub k: usize,
    /// Failure probability gamma of the exponential mechanism.
    #[arg(long, default_value_t = 1e-3)]
    pub gamma: f64,
    /// Random cuts used to measure the released hypothesis.
    #[arg(long, default_value_t = 1000)]
    pub sample_cuts: usize,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RrArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    #[arg(long)]
    pub eps: f64,
    /// Failure probability for the error-bound column.
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    #[arg(long, value_enum, default_value = "spectral")]
    pub oracle: OracleKind,
    /// Oracle calls allowed to the projection.
    #[arg(long, default_value_t = 200)]
    pub project_budget: usize,
    /// Randomly round the weighted graph to an unweighted one.
    #[arg(long)]
    pub round: bool,
    #[arg(long, default_value_t = 1000)]
    pub sample_cuts: usize,
    /// Write the released graph of trial 0 here.
    #[arg(long)]
    pub write_graph: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "8,12,16")]
    pub vs: Vec<usize>,
    /// Edge densities for G(V, p).
    #[arg(long, value_delimiter = ',', default_value = "0.5", conflicts_with = "edges")]
    pub ps: Vec<f64>,
    /// Exact edge counts instead of densities, which keeps ||D||_2^2 fixed
    /// across |V|.
    #[arg(long, value_delimiter = ',')]
    pub edges: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub epss: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "online,rr")]
    pub mechanism: Vec<Mechanism>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "fk,mw")]
    pub idc: Vec<IdcKind>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_const: f64,
    #[arg(long, default_value_t = idc_release::online::DEFAULT_T_CONSTANT)]
    pub t_const: f64,
    #[arg(long, default_value_t = 1000)]
    pub sample_cuts: usize,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
