//! Bernoulli log-likelihoods of observed links and non-links.

use rayon::prelude::*;
use wide::f64x4;

use super::grid::{AngleGrid, LikelihoodProfile};
use super::simd::{exp_nonpos, ln_pos};
use crate::geometry::{bernoulli_log_term, GrowthGeometry, PairShape, LOG_FLOOR};
use crate::graph::RankedAdjacency;

/// One partner of the node whose angle is being scored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partner {
    pub theta: f64,
    pub shape: PairShape,
    pub linked: bool,
}

/// Partners laid out for four-wide evaluation.
///
/// The angle difference enters only through `sin((theta - theta_j) / 2)`,
/// which is expanded with per-partner half-angle tables so that scoring a
/// candidate costs no trigonometry per partner.
#[derive(Debug, Clone, Default)]
pub struct TermSet {
    half_sin: Vec<f64>,
    half_cos: Vec<f64>,
    cosh_dr: Vec<f64>,
    sinh_prod2: Vec<f64>,
    cutoff: Vec<f64>,
    sign: Vec<f64>,
    weight: Vec<f64>,
    partners: Vec<Partner>,
    inv_two_t: f64,
}

impl TermSet {
    pub fn new(partners: Vec<Partner>, inv_two_t: f64) -> Self {
        let padded = partners.len().div_ceil(4) * 4;
        let mut s = Self {
            half_sin: Vec::with_capacity(padded),
            half_cos: Vec::with_capacity(padded),
            cosh_dr: Vec::with_capacity(padded),
            sinh_prod2: Vec::with_capacity(padded),
            cutoff: Vec::with_capacity(padded),
            sign: Vec::with_capacity(padded),
            weight: Vec::with_capacity(padded),
            partners: Vec::new(),
            inv_two_t,
        };
        for p in &partners {
            let (hs, hc) = (0.5 * p.theta).sin_cos();
            s.half_sin.push(hs);
            s.half_cos.push(hc);
            s.cosh_dr.push(p.shape.cosh_dr);
            s.sinh_prod2.push(p.shape.sinh_prod2);
            s.cutoff.push(p.shape.cutoff);
            s.sign.push(if p.linked { 1.0 } else { -1.0 });
            s.weight.push(1.0);
        }
        for _ in partners.len()..padded {
            s.half_sin.push(0.0);
            s.half_cos.push(1.0);
            s.cosh_dr.push(1.0);
            s.sinh_prod2.push(0.0);
            s.cutoff.push(0.0);
            s.sign.push(1.0);
            s.weight.push(0.0);
        }
        s.partners = partners;
        s
    }

    pub fn len(&self) -> usize {
        self.partners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partners.is_empty()
    }

    pub fn partners(&self) -> &[Partner] {
        &self.partners
    }

    /// Log-likelihood at angle `theta`.
    pub fn eval(&self, theta: f64) -> f64 {
        let (hs, hc) = (0.5 * theta).sin_cos();
        let hs = f64x4::splat(hs);
        let hc = f64x4::splat(hc);
        let one = f64x4::ONE;
        let zero = f64x4::ZERO;
        let cap = f64x4::splat(-LOG_FLOOR);
        let inv = f64x4::splat(self.inv_two_t);
        // softplus(v) = max(v, 0) + ln(1 + e^-|v|); the log parts are summed
        // as the log of a running product, each factor lying in [1, 2]
        let mut linear = zero;
        let mut logs = zero;
        let mut prod = one;
        for (n, q) in (0..self.weight.len()).step_by(4).enumerate() {
            let ld = |v: &[f64]| f64x4::from(<[f64; 4]>::try_from(&v[q..q + 4]).unwrap());
            let s = hs * ld(&self.half_cos) - hc * ld(&self.half_sin);
            let z = (ld(&self.cosh_dr) + ld(&self.sinh_prod2) * s * s).max(one);
            let w = ln_pos(z + ((z - one) * (z + one)).sqrt());
            let v = (w - ld(&self.cutoff)) * inv * ld(&self.sign);
            let weight = ld(&self.weight);
            linear += v.max(zero).min(cap) * weight;
            prod *= exp_nonpos(-v.abs()).mul_add(weight, one);
            if n % 512 == 511 {
                logs += ln_pos(prod);
                prod = one;
            }
        }
        -(linear + logs + ln_pos(prod)).reduce_add()
    }

    /// Term-by-term scalar evaluation, used as a reference.
    pub fn eval_scalar(&self, theta: f64) -> f64 {
        self.partners
            .iter()
            .map(|p| {
                bernoulli_log_term(
                    p.shape.logistic_arg(theta - p.theta, self.inv_two_t),
                    p.linked,
                )
            })
            .sum()
    }

    /// Scores every grid angle.
    pub fn profile(&self, grid: &AngleGrid) -> LikelihoodProfile {
        let thetas = grid.angles();
        let loglik = thetas
            .par_iter()
            .with_min_len(16)
            .map(|&t| self.eval(t))
            .collect();
        LikelihoodProfile::from_scores(thetas, loglik)
    }

    /// Scores the grid angles with the given ascending indices.
    pub fn profile_at(&self, grid: &AngleGrid, indices: &[usize]) -> LikelihoodProfile {
        let thetas: Vec<f64> = indices.iter().map(|&n| grid.angle(n)).collect();
        let loglik = thetas
            .par_iter()
            .with_min_len(16)
            .map(|&t| self.eval(t))
            .collect();
        LikelihoodProfile::from_scores(thetas, loglik)
    }
}

/// Angles by rank (slot 0 unused); entries for unplaced ranks are ignored.
pub type RankAngles = [f64];

/// Terms of node `i` against every older node, at time `i`.
pub fn link_terms(
    i: usize,
    angles: &RankAngles,
    adj: &RankedAdjacency,
    geom: &GrowthGeometry,
) -> TermSet {
    let older = adj.older_neighbors(i);
    let mut next = 0;
    let partners = (1..i)
        .map(|j| {
            let linked = next < older.len() && older[next] == j;
            if linked {
                next += 1;
            }
            Partner {
                theta: angles[j],
                shape: geom.pair_shape_at(j, i),
                linked,
            }
        })
        .collect();
    TermSet::new(partners, geom.inv_two_t())
}

/// Terms of node `j` against every other node `l <= i`, each pair taken at
/// the time the younger node appeared.
pub fn correction_terms(
    j: usize,
    i: usize,
    angles: &RankAngles,
    adj: &RankedAdjacency,
    geom: &GrowthGeometry,
) -> TermSet {
    let partners = (1..=i)
        .filter(|&l| l != j)
        .map(|l| Partner {
            theta: angles[l],
            shape: geom.pair_shape(j, l),
            linked: adj.linked(j, l),
        })
        .collect();
    TermSet::new(partners, geom.inv_two_t())
}

/// Terms of node `i` against its older neighbors only, or `None` if it has
/// none to anchor on.
pub fn init_terms(
    i: usize,
    angles: &RankAngles,
    adj: &RankedAdjacency,
    geom: &GrowthGeometry,
) -> Option<TermSet> {
    let older = adj.older_neighbors(i);
    if older.is_empty() {
        return None;
    }
    let partners = older
        .iter()
        .map(|&j| Partner {
            theta: angles[j],
            shape: geom.pair_shape_at(j, i),
            linked: true,
        })
        .collect();
    Some(TermSet::new(partners, geom.inv_two_t()))
}

pub fn link_loglik(
    i: usize,
    theta: f64,
    angles: &RankAngles,
    adj: &RankedAdjacency,
    geom: &GrowthGeometry,
) -> f64 {
    link_terms(i, angles, adj, geom).eval(theta)
}

pub fn correction_loglik(
    j: usize,
    theta: f64,
    i: usize,
    angles: &RankAngles,
    adj: &RankedAdjacency,
    geom: &GrowthGeometry,
) -> f64 {
    correction_terms(j, i, angles, adj, geom).eval(theta)
}

/// Neighbor-only log-likelihood; `None` when `i` has no older neighbor.
pub fn init_loglik(
    i: usize,
    theta: f64,
    angles: &RankAngles,
    adj: &RankedAdjacency,
    geom: &GrowthGeometry,
) -> Option<f64> {
    init_terms(i, angles, adj, geom).map(|t| t.eval(theta))
}
