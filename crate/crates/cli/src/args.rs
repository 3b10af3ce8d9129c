use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hyperembed::Method;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "hyperembed",
    version,
    about = "Hyperbolic embedding of growing networks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Random seed (generation, routing pair sampling, random baselines).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory receiving all outputs.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// TOML file with defaults; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow a synthetic network and write its edge list and true coordinates.
    Generate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        args: GenerateArgs,
    },
    /// Infer coordinates for an edge list.
    Embed {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        args: EmbedArgs,
    },
    /// Score an embedding: log-loss, connection probability, greedy routing.
    Eval {
        #[command(flatten)]
        args: EvalArgs,
    },
    /// Future-link prediction against PA and CN baselines.
    Predict {
        #[command(flatten)]
        args: PredictArgs,
    },
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Internal-link rate; embed estimates it as (average degree - 2m)/2 when omitted.
    #[arg(long = "L")]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Temperature, in (0, 1).
    #[arg(long = "T")]
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateArgs {
    /// Number of nodes.
    #[arg(long = "t")]
    #[serde(rename = "t", skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedArgs {
    /// Edge list to embed.
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Node list (one label per line) adding isolated nodes absent from the edges.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// Windowed search for low-degree nodes.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fast: Option<bool>,
    /// Window constant: the fast search covers +-C/i around the initial estimate.
    #[arg(long = "C")]
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub window_c: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_speedup: Option<usize>,
    /// Run correction steps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrections: Option<bool>,
    /// Degree thresholds triggering correction steps, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correction_degrees: Option<Vec<usize>>,
    /// Sweeps per correction step; defaults to the rounded average degree.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correction_repeats: Option<usize>,
    /// Angle of the first node.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta1: Option<f64>,
    /// Quadrature points of the common-neighbor integrals.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<PathBuf>,
    /// Node list (one label per line) adding isolated nodes absent from the edges.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<PathBuf>,
    /// True coordinates written by `generate`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<PathBuf>,
    /// Source/destination pairs for greedy routing.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gr_pairs: Option<usize>,
    /// Draw routing pairs from the largest connected component only.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gr_giant: Option<bool>,
    /// Distance bin width of the connection-probability histogram.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
    /// Angle redraws averaged into the random log-loss baseline.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ll_trials: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictArgs {
    /// Edge list of the embedded snapshot.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<PathBuf>,
    /// Node list (one label per line) adding isolated nodes of the base snapshot.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<PathBuf>,
    /// Edge list of the later snapshot.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub future: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<PathBuf>,
    /// `label group-name` lines; adds angular centers of mass per group.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
    /// Degree bound of the low-degree slice; defaults to the base average degree.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub low_degree: Option<f64>,
}
