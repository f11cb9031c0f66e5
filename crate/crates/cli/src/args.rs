//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spinsync_core::budget::Budgets;

#[derive(Debug, Parser)]
#[command(
    name = "spinsync",
    version,
    about = "Exact toolkit for spin synchronization models on graphs:\n\
             chi-squared/KL informations, series-parallel structure,\n\
             information-percolation bounds, counterexamples, fuzzing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact I2 and IKL of a vertex pair, with the sandwich verdict
    Info(InfoArgs),
    /// Bound report: path-sum, symmetric percolation, SDPI percolation
    Bounds(BoundsArgs),
    /// Series-parallel recognition, decomposition tree, path listing
    Sp(SpArgs),
    /// Built-in experiments and counterexamples
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Randomized search for conjecture counterexamples
    Fuzz(FuzzArgs),
    /// Model-file builders
    #[command(subcommand)]
    Make(MakeCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Write to a file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BudgetFlags {
    /// Cap on enumeration states (group^|V| * product of alphabet sizes)
    #[arg(long, default_value_t = 1u128 << 26)]
    pub budget_states: u128,
    /// Cap on enumerated self-avoiding paths
    #[arg(long, default_value_t = 1_000_000)]
    pub budget_paths: u64,
    /// Cap on |E| for exact subset percolation
    #[arg(long, default_value_t = 24)]
    pub budget_subset_edges: u32,
}

impl BudgetFlags {
    pub fn to_budgets(&self) -> Budgets {
        Budgets {
            max_states: self.budget_states,
            max_paths: self.budget_paths,
            max_subset_edges: self.budget_subset_edges,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InfoMode {
    /// Full enumeration over observation outcomes
    Exact,
    /// Collapse the series-parallel decomposition to one channel first
    Collapsed,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    /// Model file
    #[arg(long)]
    pub model: PathBuf,
    /// First query vertex
    #[arg(long)]
    pub u: String,
    /// Second query vertex
    #[arg(long)]
    pub v: String,
    /// Observed edge ids, comma-separated (default: all edges)
    #[arg(long, value_delimiter = ',')]
    pub observed: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: InfoMode,
    #[command(flatten)]
    pub budgets: BudgetFlags,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Model file
    #[arg(long)]
    pub model: PathBuf,
    /// Query vertex u
    #[arg(long)]
    pub u: String,
    /// Single target vertex (alternative to --W)
    #[arg(long, conflicts_with = "w")]
    pub v: Option<String>,
    /// Target vertex set, comma-separated
    #[arg(long = "W", value_delimiter = ',')]
    pub w: Option<Vec<String>>,
    /// Monte Carlo trials, used only when the graph exceeds exact budgets
    #[arg(long)]
    pub trials: Option<u64>,
    /// Seed for any stochastic path
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo
    #[arg(long, default_value_t = 1)]
    pub jobs: u64,
    #[command(flatten)]
    pub budgets: BudgetFlags,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct SpArgs {
    /// Model file
    #[arg(long)]
    pub model: PathBuf,
    /// Source terminal (default: the model's first terminal)
    #[arg(long)]
    pub u: Option<String>,
    /// Sink terminal (default: the model's second terminal)
    #[arg(long)]
    pub v: Option<String>,
    /// Also list all self-avoiding u-v paths
    #[arg(long)]
    pub paths: bool,
    #[command(flatten)]
    pub budgets: BudgetFlags,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCmd {
    /// Asymmetric Bernoulli tied-tree: chi-squared vs SDPI bound columns
    TiedTree(TiedTreeArgs),
    /// Broadcast equivalence and leaf subadditivity on a regular tree
    Bot(BotArgs),
    /// The non-uniform-spin and Z/4Z spoon counterexamples
    Counterexamples(CounterexampleArgs),
    /// BSC interpolation growth profile of one edge
    Interpolation(InterpolationArgs),
}

#[derive(Debug, Args)]
pub struct TiedTreeArgs {
    /// Numerator rate a of Ber(a/n)
    #[arg(long)]
    pub a: String,
    /// Numerator rate b of Ber(b/n)
    #[arg(long)]
    pub b: String,
    /// Values of n, comma-separated
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u64>,
    /// Depths, as a comma list (1,2,3) or range (1..4, inclusive)
    #[arg(long)]
    pub depth: String,
    /// Branching factor; omitted means d = n
    #[arg(long)]
    pub d: Option<u64>,
    /// analytic: bounds only; collapsed/exact: also compute I2
    #[arg(long, value_enum, default_value = "analytic")]
    pub mode: TiedTreeModeArg,
    #[command(flatten)]
    pub budgets: BudgetFlags,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TiedTreeModeArg {
    Analytic,
    Collapsed,
    Exact,
}

#[derive(Debug, Args)]
pub struct BotArgs {
    /// Tree depth
    #[arg(long)]
    pub depth: u32,
    /// Children per internal vertex
    #[arg(long)]
    pub branching: u64,
    /// Flip probability, e.g. 1/5
    #[arg(long)]
    pub epsilon: String,
    #[command(flatten)]
    pub budgets: BudgetFlags,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    /// Vertex bias delta of the non-uniform instance
    #[arg(long, default_value = "1/5")]
    pub delta: String,
    /// Edge flip probability of the non-uniform instance
    #[arg(long, default_value = "1/5")]
    pub epsilon: String,
    #[command(flatten)]
    pub budgets: BudgetFlags,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct InterpolationArgs {
    /// Model file (all channels must be BSCs; terminals required)
    #[arg(long)]
    pub model: PathBuf,
    /// The edge whose bias is interpolated
    #[arg(long)]
    pub edge: String,
    /// Number of grid points on [0,1]
    #[arg(long, default_value_t = 11)]
    pub grid: usize,
    #[command(flatten)]
    pub budgets: BudgetFlags,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FuzzKind {
    /// Path subadditivity on arbitrary graphs
    SpGeneral,
    /// Setwise subadditivity over target vertices
    Setwise,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    #[arg(long, value_enum, required_unless_present = "replay")]
    pub kind: Option<FuzzKind>,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Seed; required for fuzzing (stochastic subcommand)
    #[arg(long, required_unless_present = "replay")]
    pub seed: Option<u64>,
    /// Worker threads; findings merge deterministically by trial index
    #[arg(long, default_value_t = 1)]
    pub jobs: u64,
    /// Re-verify a findings file bit-exactly instead of fuzzing
    #[arg(long)]
    pub replay: Option<PathBuf>,
    #[command(flatten)]
    pub budgets: BudgetFlags,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Subcommand)]
pub enum MakeCmd {
    /// Tree model with BSC(epsilon) edges
    BscTree(MakeBscTreeArgs),
    /// Tied tree: leaves joined to a new terminal by noiseless edges
    TiedTree(MakeTiedTreeArgs),
    /// Single asymmetric Bernoulli edge
    BernoulliPair(MakeBernoulliArgs),
}

#[derive(Debug, Args)]
pub struct MakeBscTreeArgs {
    #[arg(long)]
    pub depth: u32,
    #[arg(long)]
    pub branching: u64,
    /// Flip probability, e.g. 1/10
    #[arg(long)]
    pub epsilon: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MakeTiedTreeArgs {
    #[arg(long)]
    pub depth: u32,
    #[arg(long)]
    pub branching: u64,
    /// BSC flip probability for tree edges (alternative to --a/--b/--n)
    #[arg(long, conflicts_with_all = ["a", "b", "n"])]
    pub epsilon: Option<String>,
    /// Bernoulli rate numerator a
    #[arg(long, requires = "b", requires = "n")]
    pub a: Option<String>,
    /// Bernoulli rate numerator b
    #[arg(long, requires = "a", requires = "n")]
    pub b: Option<String>,
    /// Bernoulli rate denominator n
    #[arg(long, requires = "a", requires = "b")]
    pub n: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MakeBernoulliArgs {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses depth specs: "3", "1,2,4" or "1..4" (inclusive).
pub fn parse_depth_list(s: &str) -> Result<Vec<u32>, String> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|_| format!("bad depth range `{s}`"))?;
        let hi: u32 = hi.trim().parse().map_err(|_| format!("bad depth range `{s}`"))?;
        if lo > hi {
            return Err(format!("empty depth range `{s}`"));
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| format!("bad depth `{part}`"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_specs() {
        assert_eq!(parse_depth_list("3").unwrap(), vec![3]);
        assert_eq!(parse_depth_list("1,2,4").unwrap(), vec![1, 2, 4]);
        assert_eq!(parse_depth_list("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert!(parse_depth_list("4..1").is_err());
        assert!(parse_depth_list("x").is_err());
    }

    #[test]
    fn cli_parses_representative_lines() {
        use clap::Parser;
        Cli::try_parse_from([
            "spinsync", "info", "--model", "m.json", "--u", "a", "--v", "b",
        ])
        .unwrap();
        Cli::try_parse_from([
            "spinsync", "bounds", "--model", "m.json", "--u", "a", "--W", "b,c",
            "--seed", "7", "--trials", "1000",
        ])
        .unwrap();
        Cli::try_parse_from([
            "spinsync", "experiment", "tied-tree", "--a", "3", "--b", "1",
            "--n", "50,100", "--depth", "1..4", "--d", "2",
        ])
        .unwrap();
        Cli::try_parse_from([
            "spinsync", "fuzz", "--kind", "sp-general", "--trials", "10", "--seed", "1",
        ])
        .unwrap();
        // seed required unless replaying
        assert!(Cli::try_parse_from(["spinsync", "fuzz", "--kind", "setwise"]).is_err());
        Cli::try_parse_from(["spinsync", "fuzz", "--replay", "f.json"]).unwrap();
    }
}
