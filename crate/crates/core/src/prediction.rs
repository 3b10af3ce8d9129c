//! Future-link prediction from a base snapshot and its embedding.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::embed::{EmbedError, Embedding};
use crate::evaluate::{bins_from_counts, HistBin};
use crate::geometry::{angular_distance, reduced_distance, PolarCoord};
use crate::graph::Graph;
use crate::textio::fmt_float;

/// Angular bin width of the center-of-mass estimate (3.6 degrees).
pub const COM_BIN_WIDTH: f64 = TAU / 100.0;

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("AUC needs at least one positive and one negative (got {positives} and {negatives})")]
    EmptyClass { positives: usize, negatives: usize },
    #[error("empty group")]
    EmptyGroup,
    #[error("{0} scores require coordinates")]
    MissingCoordinates(ScoreMethod),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("group file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    LowerIsBetter,
    HigherIsBetter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreMethod {
    Hyperbolic,
    Pa,
    Cn,
}

impl ScoreMethod {
    pub const ALL: [ScoreMethod; 3] = [ScoreMethod::Hyperbolic, ScoreMethod::Pa, ScoreMethod::Cn];

    pub fn orientation(self) -> Orientation {
        match self {
            ScoreMethod::Hyperbolic => Orientation::LowerIsBetter,
            ScoreMethod::Pa | ScoreMethod::Cn => Orientation::HigherIsBetter,
        }
    }
}

impl fmt::Display for ScoreMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            ScoreMethod::Hyperbolic => "hyperbolic",
            ScoreMethod::Pa => "pa",
            ScoreMethod::Cn => "cn",
        })
    }
}

impl FromStr for ScoreMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hyperbolic" => Ok(ScoreMethod::Hyperbolic),
            "pa" => Ok(ScoreMethod::Pa),
            "cn" => Ok(ScoreMethod::Cn),
            other => Err(format!("unknown score method `{other}`")),
        }
    }
}

/// Base-disconnected pairs split by whether they link in the future snapshot.
/// Pairs are node indices of the base graph, `u < v`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledPairs {
    pub positives: Vec<(usize, usize)>,
    pub negatives: Vec<(usize, usize)>,
    pub base_id: String,
    pub future_id: String,
    /// Base nodes absent from the future snapshot; their pairs are dropped.
    pub missing_base_nodes: usize,
    /// Future links touching nodes the base snapshot does not have.
    pub new_node_links: usize,
}

impl LabeledPairs {
    /// Aligns the snapshots by label.
    pub fn from_snapshots(base: &Graph, future: &Graph, base_id: &str, future_id: &str) -> Self {
        let n = base.node_count();
        let to_future: Vec<Option<usize>> =
            (0..n).map(|u| future.node_index(base.label(u))).collect();
        let new_node_links = future
            .edges()
            .filter(|&(a, b)| {
                base.node_index(future.label(a)).is_none()
                    || base.node_index(future.label(b)).is_none()
            })
            .count();
        let per_node: Vec<(Vec<(usize, usize)>, Vec<(usize, usize)>)> = (0..n)
            .into_par_iter()
            .map(|u| {
                let mut pos = Vec::new();
                let mut neg = Vec::new();
                let Some(fu) = to_future[u] else {
                    return (pos, neg);
                };
                for v in u + 1..n {
                    let Some(fv) = to_future[v] else { continue };
                    if base.has_edge(u, v) {
                        continue;
                    }
                    if future.has_edge(fu, fv) {
                        pos.push((u, v));
                    } else {
                        neg.push((u, v));
                    }
                }
                (pos, neg)
            })
            .collect();
        let mut out = LabeledPairs {
            base_id: base_id.to_string(),
            future_id: future_id.to_string(),
            missing_base_nodes: to_future.iter().filter(|f| f.is_none()).count(),
            new_node_links,
            ..Default::default()
        };
        for (p, q) in per_node {
            out.positives.extend(p);
            out.negatives.extend(q);
        }
        out
    }

    /// Keeps the pairs accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(usize, usize) -> bool + Sync) -> Self {
        let pick = |pairs: &[(usize, usize)]| {
            pairs
                .par_iter()
                .copied()
                .filter(|&(u, v)| keep(u, v))
                .collect()
        };
        LabeledPairs {
            positives: pick(&self.positives),
            negatives: pick(&self.negatives),
            base_id: self.base_id.clone(),
            future_id: self.future_id.clone(),
            missing_base_nodes: self.missing_base_nodes,
            new_node_links: self.new_node_links,
        }
    }
}

/// Scores pairs of base-graph nodes. Hyperbolic scores need final-time
/// coordinates aligned with `g`.
pub fn score_pairs(
    pairs: &[(usize, usize)],
    method: ScoreMethod,
    g: &Graph,
    coords: Option<(&[PolarCoord], f64)>,
) -> Result<Vec<f64>, PredictError> {
    Ok(match method {
        ScoreMethod::Hyperbolic => {
            let (c, zeta) = coords.ok_or(PredictError::MissingCoordinates(method))?;
            pairs
                .par_iter()
                .map(|&(u, v)| {
                    reduced_distance(
                        zeta * c[u].r,
                        zeta * c[v].r,
                        angular_distance(c[u].theta, c[v].theta),
                    ) / zeta
                })
                .collect()
        }
        ScoreMethod::Pa => pairs
            .par_iter()
            .map(|&(u, v)| (g.degree(u) * g.degree(v)) as f64)
            .collect(),
        ScoreMethod::Cn => pairs
            .par_iter()
            .map(|&(u, v)| g.common_neighbors(u, v) as f64)
            .collect(),
    })
}

/// Exact Mann-Whitney AUC: the fraction of (positive, negative) pairs in
/// which the positive scores better, ties counting one half.
pub fn auc(
    positives: &[f64],
    negatives: &[f64],
    orientation: Orientation,
) -> Result<f64, PredictError> {
    if positives.is_empty() || negatives.is_empty() {
        return Err(PredictError::EmptyClass {
            positives: positives.len(),
            negatives: negatives.len(),
        });
    }
    let sign = match orientation {
        Orientation::HigherIsBetter => 1.0,
        Orientation::LowerIsBetter => -1.0,
    };
    let mut all: Vec<(f64, bool)> = positives
        .iter()
        .map(|&s| (sign * s, true))
        .chain(negatives.iter().map(|&s| (sign * s, false)))
        .collect();
    all.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    // Twice the U statistic, accumulated in integers so ties stay exact.
    let mut twice_u: u128 = 0;
    let mut neg_below: u128 = 0;
    let mut k = 0;
    while k < all.len() {
        let mut end = k;
        let (mut p, mut q) = (0u128, 0u128);
        while end < all.len() && (end == k || all[end].0 == all[k].0) {
            if all[end].1 {
                p += 1;
            } else {
                q += 1;
            }
            end += 1;
        }
        twice_u += p * (2 * neg_below + q);
        neg_below += q;
        k = end;
    }
    Ok(twice_u as f64 / (2.0 * positives.len() as f64 * negatives.len() as f64))
}

/// AUC of `method` on a labeled pair set.
pub fn auc_for(
    labeled: &LabeledPairs,
    method: ScoreMethod,
    g: &Graph,
    coords: Option<(&[PolarCoord], f64)>,
) -> Result<f64, PredictError> {
    if labeled.positives.is_empty() || labeled.negatives.is_empty() {
        return Err(PredictError::EmptyClass {
            positives: labeled.positives.len(),
            negatives: labeled.negatives.len(),
        });
    }
    let pos = score_pairs(&labeled.positives, method, g, coords)?;
    let neg = score_pairs(&labeled.negatives, method, g, coords)?;
    auc(&pos, &neg, method.orientation())
}

/// Fraction of base-disconnected pairs that link in the future, per
/// hyperbolic-distance bin.
pub fn future_link_curve(
    labeled: &LabeledPairs,
    coords: &[PolarCoord],
    zeta: f64,
    bin_width: f64,
) -> Vec<HistBin> {
    assert!(bin_width > 0.0, "bin width must be positive");
    let mut pairs: Vec<usize> = Vec::new();
    let mut connected: Vec<usize> = Vec::new();
    let mut add = |list: &[(usize, usize)], linked: bool| {
        for &(u, v) in list {
            let x = reduced_distance(
                zeta * coords[u].r,
                zeta * coords[v].r,
                angular_distance(coords[u].theta, coords[v].theta),
            ) / zeta;
            let b = (x / bin_width) as usize;
            if b >= pairs.len() {
                pairs.resize(b + 1, 0);
                connected.resize(b + 1, 0);
            }
            pairs[b] += 1;
            connected[b] += usize::from(linked);
        }
    };
    add(&labeled.positives, true);
    add(&labeled.negatives, false);
    bins_from_counts(&pairs, &connected, bin_width)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterOfMass {
    pub theta: f64,
    /// The group's smallest covering arc crosses angle 0, where the linear
    /// mean is not meaningful.
    pub straddles_wrap: bool,
}

/// Linear mean of the bin centers of the members' angles.
pub fn center_of_mass(angles: &[f64], bin_width: f64) -> Result<CenterOfMass, PredictError> {
    if angles.is_empty() {
        return Err(PredictError::EmptyGroup);
    }
    let center = |a: f64| ((a.rem_euclid(TAU) / bin_width).floor() + 0.5) * bin_width;
    let theta = angles.iter().map(|&a| center(a)).sum::<f64>() / angles.len() as f64;
    let mut sorted: Vec<f64> = angles.iter().map(|a| a.rem_euclid(TAU)).collect();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let wrap_gap = sorted[0] + TAU - sorted[sorted.len() - 1];
    let widest_inner = sorted.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    Ok(CenterOfMass {
        theta,
        straddles_wrap: widest_inner > wrap_gap,
    })
}

/// Reads `label group-name` lines into groups of labels.
pub fn read_groups<R: BufRead>(reader: R) -> Result<BTreeMap<String, Vec<String>>, PredictError> {
    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(label), Some(group), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(PredictError::Parse {
                line: n + 1,
                message: "expected `label group-name`".into(),
            });
        };
        groups
            .entry(group.to_string())
            .or_default()
            .push(label.to_string());
    }
    Ok(groups)
}

/// Center of mass of every group. Labels missing from the embedding are
/// skipped; groups left empty are omitted.
pub fn group_centers(
    e: &Embedding,
    groups: &BTreeMap<String, Vec<String>>,
) -> Vec<(String, usize, CenterOfMass)> {
    let by_label: BTreeMap<&str, f64> = e
        .nodes
        .iter()
        .map(|n| (n.label.as_str(), n.theta))
        .collect();
    groups
        .iter()
        .filter_map(|(name, labels)| {
            let angles: Vec<f64> = labels
                .iter()
                .filter_map(|l| by_label.get(l.as_str()).copied())
                .collect();
            center_of_mass(&angles, COM_BIN_WIDTH)
                .ok()
                .map(|c| (name.clone(), angles.len(), c))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subset {
    All,
    ZeroCommonNeighbors,
    LowDegree,
}

impl Subset {
    pub const ALL: [Subset; 3] = [Subset::All, Subset::ZeroCommonNeighbors, Subset::LowDegree];
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Subset::All => "all",
            Subset::ZeroCommonNeighbors => "zero_cn",
            Subset::LowDegree => "low_degree",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AucRow {
    pub method: ScoreMethod,
    pub subset: Subset,
    pub positives: usize,
    pub negatives: usize,
    /// `None` when a class is empty.
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub rows: Vec<AucRow>,
    pub curve: Vec<HistBin>,
    pub low_degree_threshold: f64,
    pub missing_base_nodes: usize,
    pub new_node_links: usize,
}

impl PredictionReport {
    pub fn get(&self, method: ScoreMethod, subset: Subset) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.subset == subset)
            .and_then(|r| r.auc)
    }

    /// `method,subset,positives,negatives,auc` rows; empty classes print
    /// `undefined`.
    pub fn write_auc_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "method,subset,positives,negatives,auc")?;
        for r in &self.rows {
            let auc = r.auc.map_or_else(|| "undefined".to_string(), fmt_float);
            writeln!(
                out,
                "{},{},{},{},{}",
                r.method, r.subset, r.positives, r.negatives, auc
            )?;
        }
        Ok(())
    }
}

/// All three methods on the all-pairs, zero-common-neighbor and low-degree
/// slices. Degrees and common neighbors come from the base snapshot; the
/// low-degree slice keeps pairs whose degrees are both below
/// `low_degree_threshold` (the base average degree when `None`).
pub fn predict(
    base: &Graph,
    future: &Graph,
    e: &Embedding,
    low_degree_threshold: Option<f64>,
    bin_width: f64,
) -> Result<PredictionReport, PredictError> {
    let coords = e.coords_for(base)?;
    let zeta = e.params.zeta;
    let labeled = LabeledPairs::from_snapshots(base, future, "base", "future");
    let kbar = low_degree_threshold.unwrap_or_else(|| base.average_degree());
    let slices = [
        (Subset::All, labeled.clone()),
        (
            Subset::ZeroCommonNeighbors,
            labeled.filter(|u, v| base.common_neighbors(u, v) == 0),
        ),
        (
            Subset::LowDegree,
            labeled.filter(|u, v| (base.degree(u) as f64) < kbar && (base.degree(v) as f64) < kbar),
        ),
    ];
    let mut rows = Vec::new();
    for (subset, pairs) in &slices {
        for method in ScoreMethod::ALL {
            let auc = match auc_for(pairs, method, base, Some((&coords, zeta))) {
                Ok(a) => Some(a),
                Err(PredictError::EmptyClass { .. }) => None,
                Err(e) => return Err(e),
            };
            rows.push(AucRow {
                method,
                subset: *subset,
                positives: pairs.positives.len(),
                negatives: pairs.negatives.len(),
                auc,
            });
        }
    }
    Ok(PredictionReport {
        rows,
        curve: future_link_curve(&labeled, &coords, zeta, bin_width),
        low_degree_threshold: kbar,
        missing_base_nodes: labeled.missing_base_nodes,
        new_node_links: labeled.new_node_links,
    })
}
