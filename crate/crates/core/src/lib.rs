//! Hyperbolic embedding of growing networks: synthetic generation,
//! maximum-likelihood coordinate inference, and evaluation.

pub mod embed;
pub mod evaluate;
pub mod generate;
pub mod geometry;
pub mod graph;
pub mod likelihood;
pub mod prediction;
pub mod textio;

pub use embed::{embed, EmbedConfig, EmbedError, EmbedLog, Embedder, Embedding, Method, NodeCoord};
pub use evaluate::{
    align_angles, empirical_connection_probability, gr_stats, gr_stats_among, greedy_route,
    log_loss, log_loss_embedding, log_loss_random_baseline, EvalReport, GrStats, HistBin,
    RouteOutcome,
};
pub use generate::{
    frozen_growth_replicate, generate, read_truth, write_truth, GenError, SyntheticNetwork,
};
pub use geometry::{GrowthGeometry, ModelParams, ParamError, PolarCoord};
pub use graph::{
    load_edge_list, parse_edge_list, parse_node_list, rank_by_degree, Graph, GraphError,
    GrowthSchedule, LoadReport,
};
pub use likelihood::{AngleGrid, CnEngine, LikelihoodProfile, Quadrature};
pub use prediction::{
    auc, predict, LabeledPairs, Orientation, PredictError, PredictionReport, ScoreMethod, Subset,
};
