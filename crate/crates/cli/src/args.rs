use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "radsearch", version, about = "Exhaustive search for the best bounded-length conjunctive rules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find the best rules for a score.
    Search(SearchCmd),
    /// Learn a decision list, regression list or additive rule model.
    Learn(LearnCmd),
    /// Measure rowtree compressibility over random attribute subsets.
    Lambda(LambdaCmd),
    /// Time several searchers on the same task and cross-check their answers.
    Bench(BenchCmd),
    /// Write a synthetic dataset as CSV.
    Generate(GenerateCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SyntheticKind {
    /// Each attribute copies the previous one with probability 1 - λ.
    Correlated,
    /// Independent binary attributes, 1 with probability λ.
    Iid,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long, conflicts_with = "synthetic")]
    pub input: Option<PathBuf>,
    /// Column roles, e.g. "A,B,C cat; y num; age bin-ef:4" (`*` for the rest).
    #[arg(long, requires = "input")]
    pub schema: Option<String>,
    /// Generate data instead of reading it: R,M,λ,seed.
    #[arg(long, value_name = "R,M,LAMBDA,SEED")]
    pub synthetic: Option<String>,
    #[arg(long, value_enum, default_value = "correlated", requires = "synthetic")]
    pub synthetic_kind: SyntheticKind,
    /// Arity of synthetic attributes.
    #[arg(long, default_value_t = 2, requires = "synthetic")]
    pub synthetic_arity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Tsv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Rad,
    Nsn,
    Naive,
    Hill,
}

#[derive(Debug, Clone, Args)]
pub struct RuleArgs {
    /// Maximum rule length.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Minimum matching rows: an integer, or R/N for ceil(rows / N).
    #[arg(long, default_value = "1")]
    pub support: String,
    /// Numeric target for mean, var, impact and bgss.
    #[arg(long)]
    pub target: Option<String>,
    /// Categorical output attribute for ent and strength.
    #[arg(long)]
    pub output_attr: Option<String>,
    #[arg(long, value_enum, default_value = "rad")]
    pub algo: AlgoArg,
    /// Skip tables whose optimistic bound cannot reach the kept rules.
    #[arg(long)]
    pub prune: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Abort when cached statistics exceed this many MiB.
    #[arg(long)]
    pub memory_cap_mb: Option<usize>,
    /// Run the naive searcher even when its estimated cost is large.
    #[arg(long)]
    pub yes: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SearchCmd {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub rule: RuleArgs,
    /// mean, ent, var, strength, impact or bgss.
    #[arg(long, default_value = "mean")]
    pub score: String,
    /// Number of rules to report.
    #[arg(long, default_value_t = 1)]
    pub top: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Dlist,
    Reglist,
    Radreg,
}

#[derive(Debug, Clone, Args)]
pub struct LearnCmd {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub rule: RuleArgs,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Number of terms for radreg.
    #[arg(long, default_value_t = 5)]
    pub max_terms: usize,
    /// Also cross-validate with this many folds.
    #[arg(long)]
    pub folds: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LambdaCmd {
    #[command(flatten)]
    pub data: DataArgs,
    /// Rowtree depth to probe.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Number of random attribute subsets.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchCmd {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub rule: RuleArgs,
    #[arg(long, default_value = "mean")]
    pub score: String,
    /// Comma-separated searchers to compare.
    #[arg(long, default_value = "rad,nsn")]
    pub algos: String,
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateCmd {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub attributes: usize,
    #[arg(long, default_value_t = 2)]
    pub arity: usize,
    /// Copy-break probability (correlated) or 1-probability (iid).
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value = "correlated")]
    pub kind: SyntheticKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path (standard output if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}
