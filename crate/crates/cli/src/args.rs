use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hqr_core::constructions::CensusFilter;
use hqr_core::measures::OctahedronConvention;
use hqr_core::partitions::OrderedPartition;
use hqr_core::RationalDensity;

#[derive(Debug, Parser)]
#[command(name = "hqr", version, about = "Quasirandomness measures for k-uniform hypergraphs")]
pub struct Cli {
    /// Worker threads for parallel kernels.
    #[arg(long, global = true, env = "HQR_WORKERS")]
    pub workers: Option<usize>,

    #[command(flatten)]
    pub output: OutputArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Write the JSON report here; a CSV copy goes next to it.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,

    /// Print the JSON report on stdout instead of the summary lines.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Materialize a construction and optionally its failure witness.
    Sample(SampleArgs),
    /// Evaluate one measure on a hypergraph file.
    Measure(MeasureArgs),
    /// Reproduce a named separation end to end.
    Separate(SeparateArgs),
    /// Build the property implication poset.
    Poset(PosetArgs),
    /// Run the exact identity suites.
    Verify(VerifyArgs),
    /// Octahedron parity census of a construction.
    Census(CensusArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    A,
    B,
    D,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Collapsed,
    Indexed,
}

impl From<Convention> for OctahedronConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Collapsed => OctahedronConvention::Collapsed,
            Convention::Indexed => OctahedronConvention::Indexed,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ConstructionArgs {
    #[arg(long, value_enum)]
    pub construction: Kind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Color arity of A.
    #[arg(long, default_value_t = 2)]
    pub l: usize,
    /// Ordered block sizes of B; defaults to `k-1,1`.
    #[arg(long)]
    pub pi: Option<OrderedPartition>,
    #[arg(long, default_value = "1/2")]
    pub p: RationalDensity,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub construction: ConstructionArgs,
    /// Hypergraph output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Witness output: the zero-color graph for A, `PATH.i` families for B.
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Disc,
    Expand,
    Cd,
    Dev,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    #[default]
    Exact,
    Sampled,
}

#[derive(Debug, Args, Serialize)]
pub struct MeasureArgs {
    #[arg(value_enum)]
    pub measure: MeasureKind,
    /// Hypergraph file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "1/2")]
    pub p: RationalDensity,
    /// Family files for `expand`, in order.
    #[arg(long = "family")]
    pub families: Vec<PathBuf>,
    /// The l-graph for `cd`.
    #[arg(long)]
    pub g: Option<PathBuf>,
    /// Threshold for `cd`; defaults to C(k, l), the clique case.
    #[arg(long)]
    pub s: Option<usize>,
    /// Require G to span V(H) for `cd`.
    #[arg(long)]
    pub spanning: bool,
    /// Level for `dev`.
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub convention: Convention,
    #[arg(long, value_enum, default_value_t)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest exact enumeration allowed.
    #[arg(long)]
    pub exact_threshold: Option<u128>,
    /// Fail unless the normalized defect is at most this.
    #[arg(long)]
    pub max: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SeparateArgs {
    /// Registry name; `--list` shows all.
    #[arg(long, required_unless_present = "list")]
    pub lemma: Option<String>,
    #[arg(long)]
    pub list: bool,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub pi: Option<OrderedPartition>,
    #[arg(long)]
    pub p: Option<RationalDensity>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run seeds `seed..seed+seeds`; results are merged in seed order.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Sample count for sampled steps.
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct PosetArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long = "poset-json")]
    pub poset_json: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Partite,
    Cdells,
    Appendix,
    All,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Largest vertex count drawn.
    #[arg(long, default_value_t = 7)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Octahedron convention for the appendix suite.
    #[arg(long, value_enum, default_value_t = Convention::Indexed)]
    pub convention: Convention,
}

#[derive(Debug, Args, Serialize)]
pub struct CensusArgs {
    #[command(flatten)]
    pub construction: ConstructionArgs,
    /// Defaults to the filter matching the construction.
    #[arg(long)]
    pub filter: Option<CensusFilter>,
    /// Defaults to `l+1` for A and 2 otherwise.
    #[arg(long)]
    pub level: Option<usize>,
    /// Sample this many filtered specs instead of enumerating all.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
}
