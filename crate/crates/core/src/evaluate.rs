//! Embedding quality metrics.
//!
//! Coordinates are passed as slices aligned with the node indices of the
//! graph, holding final-time radii.

use std::collections::HashSet;
use std::f64::consts::TAU;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::embed::{EmbedError, Embedding};
use crate::geometry::{
    angular_distance, bernoulli_log_term, cutoff_radius, normalize_angle, reduced_distance,
    ModelParams, ParamError, PolarCoord,
};
use crate::graph::Graph;
use crate::textio::fmt_float;

/// Bins with fewer pairs than this are flagged as low confidence.
pub const MIN_CONFIDENT_PAIRS: usize = 50;

#[inline]
fn reduced_pair_distance(a: PolarCoord, b: PolarCoord, zeta: f64) -> f64 {
    reduced_distance(zeta * a.r, zeta * b.r, angular_distance(a.theta, b.theta))
}

/// Negative global log-likelihood of the graph at final-time coordinates,
/// with the cutoff of the last-born node.
pub fn log_loss(g: &Graph, coords: &[PolarCoord], p: &ModelParams) -> Result<f64, ParamError> {
    p.validate()?;
    let reduced_cutoff = p.zeta * cutoff_radius(p.size, p)?;
    let inv_two_t = 0.5 / p.temperature;
    let n = g.node_count();
    let total: f64 = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut s = 0.0;
            for v in u + 1..n {
                let x = reduced_pair_distance(coords[u], coords[v], p.zeta);
                s += bernoulli_log_term((x - reduced_cutoff) * inv_two_t, g.has_edge(u, v));
            }
            s
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok(-total)
}

/// [`log_loss`] for an embedding, which must cover every node of `g`.
pub fn log_loss_embedding(g: &Graph, e: &Embedding) -> Result<f64, EmbedError> {
    let coords = e.coords_for(g)?;
    Ok(log_loss(g, &coords, &e.params)?)
}

/// Mean log-loss over `trials` uniform redraws of every angle, radii fixed.
pub fn log_loss_random_baseline(
    g: &Graph,
    coords: &[PolarCoord],
    p: &ModelParams,
    trials: usize,
    seed: u64,
) -> Result<f64, ParamError> {
    let trials = trials.max(1);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    for _ in 0..trials {
        let shuffled: Vec<PolarCoord> = coords
            .iter()
            .map(|c| PolarCoord {
                r: c.r,
                theta: normalize_angle(rng.random::<f64>() * TAU),
            })
            .collect();
        sum += log_loss(g, &shuffled, p)?;
    }
    Ok(sum / trials as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistBin {
    pub x_lo: f64,
    pub x_hi: f64,
    pub pairs: usize,
    pub connected: usize,
}

impl HistBin {
    pub fn ratio(&self) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            self.connected as f64 / self.pairs as f64
        }
    }

    pub fn low_confidence(&self) -> bool {
        self.pairs < MIN_CONFIDENT_PAIRS
    }
}

/// Fraction of connected pairs per hyperbolic-distance bin.
pub fn empirical_connection_probability(
    g: &Graph,
    coords: &[PolarCoord],
    zeta: f64,
    bin_width: f64,
) -> Vec<HistBin> {
    assert!(bin_width > 0.0, "bin width must be positive");
    let n = g.node_count();
    let mut pairs: Vec<usize> = Vec::new();
    let mut connected: Vec<usize> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let x = reduced_pair_distance(coords[u], coords[v], zeta) / zeta;
            let b = (x / bin_width) as usize;
            if b >= pairs.len() {
                pairs.resize(b + 1, 0);
                connected.resize(b + 1, 0);
            }
            pairs[b] += 1;
            if g.has_edge(u, v) {
                connected[b] += 1;
            }
        }
    }
    bins_from_counts(&pairs, &connected, bin_width)
}

pub(crate) fn bins_from_counts(
    pairs: &[usize],
    connected: &[usize],
    bin_width: f64,
) -> Vec<HistBin> {
    pairs
        .iter()
        .zip(connected)
        .enumerate()
        .map(|(b, (&pairs, &connected))| HistBin {
            x_lo: b as f64 * bin_width,
            x_hi: (b + 1) as f64 * bin_width,
            pairs,
            connected,
        })
        .collect()
}

pub fn write_histogram_csv<W: Write>(bins: &[HistBin], mut out: W) -> io::Result<()> {
    writeln!(out, "x_lo,x_hi,pairs,connected,ratio")?;
    for b in bins {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(b.x_lo),
            fmt_float(b.x_hi),
            b.pairs,
            b.connected,
            fmt_float(b.ratio())
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteOutcome {
    pub success: bool,
    pub hops: usize,
    pub path: Vec<usize>,
}

/// Greedy forwarding to the neighbor closest to `dest`. The packet is
/// dropped when it would return to the node it just left or after more hops
/// than there are nodes.
pub fn greedy_route(
    g: &Graph,
    coords: &[PolarCoord],
    zeta: f64,
    source: usize,
    dest: usize,
) -> RouteOutcome {
    let target = coords[dest];
    let mut path = vec![source];
    let mut prev = usize::MAX;
    let mut cur = source;
    while cur != dest {
        if path.len() > g.node_count() {
            return RouteOutcome {
                success: false,
                hops: path.len() - 1,
                path,
            };
        }
        let mut best: Option<(f64, usize)> = None;
        for &v in g.neighbors(cur) {
            let d = reduced_pair_distance(coords[v], target, zeta);
            let better = match best {
                None => true,
                Some((bd, bv)) => d < bd || (d == bd && g.label(v) < g.label(bv)),
            };
            if better {
                best = Some((d, v));
            }
        }
        let Some((_, next)) = best else {
            return RouteOutcome {
                success: false,
                hops: path.len() - 1,
                path,
            };
        };
        if next == prev {
            return RouteOutcome {
                success: false,
                hops: path.len() - 1,
                path,
            };
        }
        prev = cur;
        cur = next;
        path.push(cur);
    }
    RouteOutcome {
        success: true,
        hops: path.len() - 1,
        path,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrStats {
    pub success_ratio: f64,
    /// Mean hop count of successful routes; NaN if none succeeded.
    pub mean_hops: f64,
    pub pairs: usize,
}

/// Ordered source/destination pairs: all of them when `num_pairs` covers
/// every pair, otherwise a seeded uniform sample of distinct pairs.
pub fn sample_pairs(n: usize, num_pairs: usize, seed: u64) -> Vec<(usize, usize)> {
    let total = n.saturating_mul(n.saturating_sub(1));
    if num_pairs >= total {
        return (0..n)
            .flat_map(|s| (0..n).filter(move |&d| d != s).map(move |d| (s, d)))
            .collect();
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(num_pairs);
    let mut out = Vec::with_capacity(num_pairs);
    while out.len() < num_pairs {
        let s = rng.random_range(0..n);
        let d = rng.random_range(0..n);
        if s != d && seen.insert((s, d)) {
            out.push((s, d));
        }
    }
    out
}

pub fn gr_stats(
    g: &Graph,
    coords: &[PolarCoord],
    zeta: f64,
    num_pairs: usize,
    seed: u64,
) -> GrStats {
    let all: Vec<usize> = (0..g.node_count()).collect();
    gr_stats_among(g, coords, zeta, &all, num_pairs, seed)
}

/// Greedy-routing statistics over pairs drawn from `nodes` only, e.g. the
/// largest connected component.
pub fn gr_stats_among(
    g: &Graph,
    coords: &[PolarCoord],
    zeta: f64,
    nodes: &[usize],
    num_pairs: usize,
    seed: u64,
) -> GrStats {
    let pairs = sample_pairs(nodes.len(), num_pairs.max(1), seed);
    let outcomes: Vec<(bool, usize)> = pairs
        .par_iter()
        .map(|&(s, d)| {
            let (s, d) = (nodes[s], nodes[d]);
            let o = greedy_route(g, coords, zeta, s, d);
            (o.success, o.hops)
        })
        .collect();
    let ok: Vec<usize> = outcomes.iter().filter(|o| o.0).map(|o| o.1).collect();
    GrStats {
        success_ratio: ok.len() as f64 / pairs.len().max(1) as f64,
        mean_hops: if ok.is_empty() {
            f64::NAN
        } else {
            ok.iter().sum::<usize>() as f64 / ok.len() as f64
        },
        pairs: pairs.len(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    /// Rotation added to the (possibly reflected) inferred angles.
    pub delta: f64,
    pub reflected: bool,
    /// Per-node circular error after alignment, in `[0, pi]`.
    pub errors: Vec<f64>,
}

impl Alignment {
    pub fn mean_error(&self) -> f64 {
        self.errors.iter().sum::<f64>() / self.errors.len().max(1) as f64
    }

    pub fn summary(&self) -> AngleErrorSummary {
        AngleErrorSummary {
            mean: self.mean_error(),
            median: quantile(&self.errors, 0.5),
            q25: quantile(&self.errors, 0.25),
            q75: quantile(&self.errors, 0.75),
            q90: quantile(&self.errors, 0.9),
            delta: self.delta,
            reflected: self.reflected,
        }
    }
}

/// Linear-interpolation quantile; NaN for an empty slice.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Best rotation (and optional reflection) mapping `inferred` onto `truth`.
pub fn align_angles(inferred: &[f64], truth: &[f64]) -> Alignment {
    assert_eq!(inferred.len(), truth.len(), "angle sets differ in size");
    let orient = |reflected: bool| {
        let phi: Vec<f64> = inferred
            .iter()
            .map(|&a| if reflected { normalize_angle(-a) } else { a })
            .collect();
        let (s, c) = phi.iter().zip(truth).fold((0.0, 0.0), |(s, c), (&p, &t)| {
            (s + (t - p).sin(), c + (t - p).cos())
        });
        let delta = normalize_angle(s.atan2(c));
        let errors: Vec<f64> = phi
            .iter()
            .zip(truth)
            .map(|(&p, &t)| angular_distance(normalize_angle(p + delta), normalize_angle(t)))
            .collect();
        Alignment {
            delta,
            reflected,
            errors,
        }
    };
    let id = orient(false);
    let re = orient(true);
    if re.mean_error() < id.mean_error() {
        re
    } else {
        id
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleErrorSummary {
    pub mean: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub q90: f64,
    pub delta: f64,
    pub reflected: bool,
}

/// Discrete power-law exponent by maximum likelihood over degrees `>= k_min`,
/// using the continuous approximation with a half-unit shift.
pub fn power_law_exponent(degrees: &[usize], k_min: usize) -> f64 {
    let shift = k_min as f64 - 0.5;
    let tail: Vec<f64> = degrees
        .iter()
        .filter(|&&k| k >= k_min)
        .map(|&k| (k as f64 / shift).ln())
        .collect();
    1.0 + tail.len() as f64 / tail.iter().sum::<f64>()
}

/// Final-time coordinates from birth coordinates `truth[r - 1]`, aligned
/// with the nodes of `g`, whose labels must be the ranks.
pub fn truth_coords_for(
    g: &Graph,
    truth: &[PolarCoord],
    p: &ModelParams,
) -> Result<Vec<PolarCoord>, EmbedError> {
    let t = truth.len();
    let r_t = 2.0 / p.zeta * (t as f64).ln();
    g.labels()
        .iter()
        .map(|l| {
            let rank: usize = l.parse().map_err(|_| EmbedError::MissingNode(l.clone()))?;
            let c = truth
                .get(rank.wrapping_sub(1))
                .ok_or_else(|| EmbedError::MissingNode(l.clone()))?;
            Ok(PolarCoord {
                r: p.beta * c.r + (1.0 - p.beta) * r_t,
                theta: c.theta,
            })
        })
        .collect()
}

/// Everything the evaluation command reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub ll_inf: f64,
    pub ll_rand: f64,
    pub ll_real: Option<f64>,
    pub r_ll_log: f64,
    pub hist: Vec<HistBin>,
    pub gr: GrStats,
    pub angle_err: Option<AngleErrorSummary>,
}

impl EvalReport {
    /// Flat `key = value` text; histograms go to a separate CSV.
    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "ll_inf = {}", fmt_float(self.ll_inf))?;
        writeln!(out, "ll_rand = {}", fmt_float(self.ll_rand))?;
        match self.ll_real {
            Some(v) => writeln!(out, "ll_real = {}", fmt_float(v))?,
            None => writeln!(out, "ll_real = none")?,
        }
        writeln!(out, "r_ll_log = {}", fmt_float(self.r_ll_log))?;
        writeln!(
            out,
            "gr_success_ratio = {}",
            fmt_float(self.gr.success_ratio)
        )?;
        writeln!(out, "gr_mean_hops = {}", fmt_float(self.gr.mean_hops))?;
        writeln!(out, "gr_pairs = {}", self.gr.pairs)?;
        writeln!(out, "hist_bins = {}", self.hist.len())?;
        writeln!(
            out,
            "hist_low_confidence_bins = {}",
            self.hist.iter().filter(|b| b.low_confidence()).count()
        )?;
        if let Some(a) = &self.angle_err {
            writeln!(out, "angle_err_mean = {}", fmt_float(a.mean))?;
            writeln!(out, "angle_err_q25 = {}", fmt_float(a.q25))?;
            writeln!(out, "angle_err_median = {}", fmt_float(a.median))?;
            writeln!(out, "angle_err_q75 = {}", fmt_float(a.q75))?;
            writeln!(out, "angle_err_q90 = {}", fmt_float(a.q90))?;
            writeln!(out, "angle_align_delta = {}", fmt_float(a.delta))?;
            writeln!(out, "angle_align_reflected = {}", a.reflected)?;
        }
        Ok(())
    }
}
