use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "hypermatch", about = "Monochromatic matchings, shadows, sparse regularity and transference experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate hypergraphs and set families.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Build edge colourings.
    #[command(subcommand)]
    Colour(ColourCmd),
    /// Maximum, maximum monochromatic or perfect matching of a hypergraph.
    Match(MatchArgs),
    /// Check the guaranteed monochromatic matching size over colourings of the complete r-graph.
    AflVerify(AflArgs),
    /// Decide q-colourability of a Kneser hypergraph.
    Kneser(KneserArgs),
    /// Check the shadow bound on one family or sweep every small family.
    ShadowVerify(ShadowArgs),
    /// Apply one (i, j)-shift, or shift to a fixpoint.
    Shift(ShiftArgs),
    /// Search s members of a family whose union is nearly disjoint.
    Cover(CoverArgs),
    /// Monochromatic matching of a nearly complete coloured hypergraph.
    Defect(DefectArgs),
    /// Refine a partition until the colour classes look regular.
    Regularize(RegularizeArgs),
    /// Regularize, match the cluster hypergraph and lift back.
    Transfer(TransferArgs),
    /// Two-exposure perfect matching experiment.
    Discrepancy(DiscrepancyArgs),
    /// Run a JSON list of parameter maps over seed ranges into one CSV.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Colour(_) => "colour",
            Command::Match(_) => "match",
            Command::AflVerify(_) => "afl-verify",
            Command::Kneser(_) => "kneser",
            Command::ShadowVerify(_) => "shadow-verify",
            Command::Shift(_) => "shift",
            Command::Cover(_) => "cover",
            Command::Defect(_) => "defect",
            Command::Regularize(_) => "regularize",
            Command::Transfer(_) => "transfer",
            Command::Discrepancy(_) => "discrepancy",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GenCmd {
    /// The complete r-graph on n vertices.
    Complete(CompleteArgs),
    /// The binomial random r-graph.
    Gnp(GnpArgs),
    /// The Kneser hypergraph on r-subsets of [n].
    Kneser(KneserGenArgs),
    /// Delete random edges from a hypergraph.
    Delete(DeleteArgs),
    /// A random k-uniform family of given density.
    Family(FamilyArgs),
    /// All k-sets meeting [t].
    Star(EmcArgs),
    /// All k-sets inside [k t + k - 1].
    Clique(EmcArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CompleteArgs {
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long)]
    pub r: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct GnpArgs {
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long)]
    pub r: usize,
    #[arg(short, long)]
    pub p: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct KneserGenArgs {
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long)]
    pub r: usize,
    #[arg(short, long)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DeleteArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Number of edges to delete.
    #[arg(long, conflicts_with = "fraction")]
    pub count: Option<usize>,
    /// Fraction of edges to delete, rounded to the nearest count.
    #[arg(long)]
    pub fraction: Option<f64>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct FamilyArgs {
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long)]
    pub k: usize,
    /// Target fraction of all k-sets.
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 1 << 20)]
    pub cap: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EmcArgs {
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long)]
    pub k: usize,
    #[arg(short, long)]
    pub t: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColourCmd {
    /// The block-weight extremal colouring.
    Extremal(ExtremalArgs),
    /// Independent uniform colours per edge.
    Random(RandomColourArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ExtremalArgs {
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long)]
    pub r: usize,
    #[arg(short, long)]
    pub q: usize,
    /// Comma-separated weights x_1..x_q; defaults to (1, .., 1, r).
    #[arg(long)]
    pub weights: Option<String>,
    /// Colour the edges of this hypergraph instead of the complete one.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct RandomColourArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(short, long)]
    pub q: u32,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MatchArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Restrict to the best single colour class.
    #[arg(long, conflicts_with = "perfect")]
    pub colouring: Option<PathBuf>,
    /// Look for a perfect matching instead.
    #[arg(long)]
    pub perfect: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AflArgs {
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long)]
    pub r: usize,
    #[arg(short, long)]
    pub q: usize,
    /// Check this many random colourings instead of all of them.
    #[arg(long, requires = "seed")]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1 << 24)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct KneserArgs {
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long)]
    pub r: usize,
    #[arg(short, long)]
    pub k: usize,
    #[arg(short, long)]
    pub q: usize,
    /// Search-node budget.
    #[arg(long, default_value_t = 1 << 32)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ShadowArgs {
    /// Family JSON for a single check.
    #[arg(long, requires_all = ["s", "b"], conflicts_with = "sweep")]
    pub family: Option<PathBuf>,
    #[arg(short, long)]
    pub s: Option<usize>,
    #[arg(short, long)]
    pub b: Option<usize>,
    /// Sweep every family of k-subsets of [n] with 1..=maxsize members: n=.. k=.. maxsize=..
    #[arg(long, num_args = 1..)]
    pub sweep: Vec<String>,
    #[arg(long, default_value = "2,3")]
    pub s_values: String,
    #[arg(long, default_value = "1,2,3")]
    pub b_values: String,
    /// Skip the shifted copy of every family.
    #[arg(long)]
    pub no_shifted: bool,
    /// Only write rows whose check fails.
    #[arg(long)]
    pub failures_only: bool,
    #[arg(long, default_value_t = 1 << 26)]
    pub budget: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Report JSON for a single check, CSV for a sweep (default shadow-sweep.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ShiftArgs {
    #[arg(long)]
    pub family: PathBuf,
    /// 1-based target element; both i and j or neither.
    #[arg(short, long, requires = "j")]
    pub i: Option<u32>,
    #[arg(short, long, requires = "i")]
    pub j: Option<u32>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CoverArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(short, long)]
    pub s: usize,
    /// Overlap budget C: the union must reach (k - C) s.
    #[arg(short, long)]
    pub c: usize,
    #[arg(long, default_value_t = 1 << 24)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DefectOpts {
    /// Clique-subset size.
    #[arg(short, long, default_value_t = 4)]
    pub k: usize,
    /// Slack μ, decimal or a/b.
    #[arg(long)]
    pub mu: String,
    /// Clique family size to sample when enumeration is too large.
    #[arg(long, default_value_t = hypermatch::pipelines::DEFAULT_FAMILY_SIZE)]
    pub family_count: usize,
    #[arg(long, conflicts_with = "sampled")]
    pub exhaustive: bool,
    #[arg(long)]
    pub sampled: bool,
    /// Cover overlap budget C; defaults to ⌈kμ²/4⌉.
    #[arg(long)]
    pub overlap: Option<usize>,
    #[arg(long, default_value_t = 1 << 20)]
    pub family_budget: u64,
    #[arg(long, default_value_t = 1 << 22)]
    pub cover_budget: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct DefectArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub colouring: PathBuf,
    #[command(flatten)]
    pub defect: DefectOpts,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Matching JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RegularityOpts {
    /// Regularity parameter ε, decimal or a/b.
    #[arg(long)]
    pub eps: String,
    /// Density scale p, decimal or a/b.
    #[arg(short, long)]
    pub p: String,
    /// Upper-uniformity constant D.
    #[arg(long, default_value = "2")]
    pub d: String,
    /// Block-size floor fraction η.
    #[arg(long, default_value = "1/100")]
    pub eta: String,
    #[arg(long, default_value_t = 4)]
    pub t0: usize,
    #[arg(long, default_value_t = 64)]
    pub t_cap: usize,
    /// practical or faithful.
    #[arg(long, default_value = "practical")]
    pub mode: String,
    /// exhaustive, randomized:SAMPLES or guided:SAMPLES.
    #[arg(long, default_value = "randomized:16")]
    pub witness: String,
    #[arg(long, default_value_t = 1 << 22)]
    pub budget: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct RegularizeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Without a colouring the whole hypergraph is one class.
    #[arg(long)]
    pub colouring: Option<PathBuf>,
    #[command(flatten)]
    pub regularity: RegularityOpts,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Partition JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Round log CSV.
    #[arg(long)]
    pub rounds_out: Option<PathBuf>,
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TransferArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub colouring: PathBuf,
    #[command(flatten)]
    pub regularity: RegularityOpts,
    #[command(flatten)]
    pub defect: DefectOpts,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiscrepancyArgs {
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long)]
    pub r: usize,
    #[arg(short, long, default_value_t = 2)]
    pub q: usize,
    /// Extremal weights x_1..x_q for the fixed colouring; defaults to (1, .., 1, r).
    #[arg(long, conflicts_with = "colouring")]
    pub weights: Option<String>,
    /// Colouring of every r-subset of [n] in colex order.
    #[arg(long)]
    pub colouring: Option<PathBuf>,
    #[arg(long)]
    pub p1: f64,
    #[arg(long)]
    pub p2: f64,
    #[arg(long)]
    pub mu: String,
    #[arg(long)]
    pub seed: u64,
    /// Report JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Runs executed at once.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}
