use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "dst", version, about = "Dual-system choice models: identification, axiom checks, estimation and list design")]
pub struct Cli {
    /// Exact rational arithmetic where supported (also DST_EXACT=1).
    #[arg(long, global = true)]
    pub exact: bool,
    /// JSON file with tolerances and run options.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Recover the order, System-2 weight and salience weights.
    Identify(DataArgs),
    /// Test the characterizing conditions.
    Axioms(DataArgs),
    /// Maximum-likelihood fit.
    Fit(FitArgs),
    /// Swaps rationality index.
    Swaps(SwapsArgs),
    /// Selectivity-based rationality index.
    RationalityIndex(DataArgs),
    /// Random product availability with an outside option.
    Dstpa {
        #[command(subcommand)]
        command: DstpaCommand,
    },
    /// Menu-dependent System-2 weights.
    Ddst {
        #[command(subcommand)]
        command: DdstCommand,
    },
    /// Heterogeneous populations.
    Hdst {
        #[command(subcommand)]
        command: HdstCommand,
    },
    /// Effort-based derivation of the System-2 weight.
    Microfoundation {
        #[command(subcommand)]
        command: MicroCommand,
    },
    /// Optimal ordering of products on a list.
    ListDesign(ListArgs),
    /// Draw choices from a model.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Choice data (.csv with a menus sidecar, or .json).
    #[arg(long)]
    pub data: PathBuf,
    /// Menus sidecar for CSV data; defaults to menus.csv next to the data.
    #[arg(long)]
    pub menus: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Dst,
    DstSearch,
    Luce,
    Logit,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "dst")]
    pub model: ModelArg,
    /// Preference order, best first, as comma-separated ids.
    #[arg(long)]
    pub order: Option<String>,
    /// Attribute table `alternative,attr1,...` for a linear logit.
    #[arg(long)]
    pub covariates: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SwapsArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// JSON object of menu weights keyed by menu id; uniform by default.
    #[arg(long)]
    pub sigma: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum DstpaCommand {
    /// Recover the availability distribution and model parameters.
    Identify(DataArgs),
    /// Test the outside-option conditions and independence of availability.
    Check(DataArgs),
}

#[derive(Subcommand, Debug)]
pub enum DdstCommand {
    /// Build a representation of three-option data that violates IIA.
    Construct {
        #[command(flatten)]
        data: DataArgs,
        /// Use this order instead of the first admissible one.
        #[arg(long)]
        order: Option<String>,
        /// Weight on the full menu; the interval midpoint by default.
        #[arg(long)]
        alpha_full: Option<String>,
    },
    /// Identify from within-menu rankings, or from a known best option.
    Identify {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        best: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum HdstCommand {
    /// Choice probabilities of a mixture on every menu.
    Simulate {
        /// Mixture parameters (JSON).
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 2)]
        min_size: usize,
        #[arg(long)]
        max_size: Option<usize>,
        /// Also write the data document here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Block-Marschak check of membership in the random utility polytope.
    RumCheck(DataArgs),
    /// Approximate a random utility model by a mixture.
    Approximate {
        /// Orders with shares (JSON).
        #[arg(long)]
        rum: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 30.0)]
        lambda: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum MicroCommand {
    /// Solve the effort problem and compare with the model.
    Verify {
        /// Weights as `id=value` pairs, comma-separated.
        #[arg(long)]
        weights: String,
        /// Best option of the menu.
        #[arg(long)]
        best: String,
        /// Required improvement in the best option's probability.
        #[arg(long)]
        improvement: String,
        /// Menu members; every option by default.
        #[arg(long)]
        menu: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exhaustive,
    Lp,
}

#[derive(Args, Debug)]
pub struct ListArgs {
    /// List problem (JSON).
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub method: Method,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MenuSet {
    Pairs,
    Triples,
    PairsTriples,
    All,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Model parameters (JSON).
    #[arg(long)]
    pub model: PathBuf,
    /// Number of choices to draw.
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value = "all")]
    pub menus: MenuSet,
    /// Also write the counts as a data document.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
