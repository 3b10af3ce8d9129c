//! Likelihood kernels used to place nodes on the circle.

pub mod cn;
pub mod grid;
pub mod link;
mod simd;

pub use cn::{
    cn_loglik, cn_moments, cn_pair_prob, normal_log_term, CnEngine, CnError, CommonNeighborStats,
    Quadrature, SIGMA_MIN,
};
pub use grid::{argmax, maximize_profile, AngleGrid, LikelihoodProfile};
pub use link::{
    correction_loglik, correction_terms, init_loglik, init_terms, link_loglik, link_terms, Partner,
    RankAngles, TermSet,
};
