//! Synthetic networks grown in the hyperbolic plane.
//!
//! Random numbers are consumed in a fixed order: node `i` draws its angle when
//! it is born, then one uniform per older node `j = 1..i-1` decides the pair.
//! A seed therefore pins the whole network, and two runs with the same seed
//! but different final sizes share angles and coin flips.

use std::f64::consts::TAU;
use std::io::{self, BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::geometry::{GrowthGeometry, ModelParams, ParamError, PolarCoord};
use crate::graph::Graph;
use crate::textio::fmt_float;

#[derive(Debug, Error)]
pub enum GenError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("network size must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("expected {expected} coordinates, got {got}")]
    Coordinates { expected: usize, got: usize },
    #[error("truth file line {line}: {message}")]
    Truth { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A generated network together with the coordinates it was grown from.
#[derive(Debug, Clone)]
pub struct SyntheticNetwork {
    /// Node `v` has label `v + 1`, its birth rank.
    pub graph: Graph,
    /// `truth[r - 1]` holds the birth radius and angle of rank `r`.
    pub truth: Vec<PolarCoord>,
    pub params: ModelParams,
    pub seed: u64,
}

impl SyntheticNetwork {
    /// Angles indexed by rank, slot 0 unused.
    pub fn angles_by_rank(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.truth.iter().map(|c| c.theta))
            .collect()
    }

    pub fn write_truth<W: Write>(&self, out: W) -> io::Result<()> {
        write_truth(&self.truth, out)
    }
}

fn rng_for(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn draw_angle(rng: &mut ChaCha20Rng) -> f64 {
    let a = rng.random::<f64>() * TAU;
    if a >= TAU {
        0.0
    } else {
        a
    }
}

pub fn generate(p: &ModelParams, seed: u64) -> Result<SyntheticNetwork, GenError> {
    if p.size < 2 {
        return Err(GenError::TooSmall(p.size));
    }
    let geom = GrowthGeometry::new(p)?;
    let mut rng = rng_for(seed);
    let t = p.size;
    let mut angles = vec![0.0; t + 1];
    let mut edges = Vec::new();
    for i in 1..=t {
        angles[i] = draw_angle(&mut rng);
        grow_node(&geom, &angles, i, &mut rng, &mut edges);
    }
    let (graph, _) = Graph::from_index_edges(t, &edges);
    let truth = (1..=t)
        .map(|r| PolarCoord {
            r: geom.rho(r) / p.zeta,
            theta: angles[r],
        })
        .collect();
    Ok(SyntheticNetwork {
        graph,
        truth,
        params: *p,
        seed,
    })
}

/// Grows one network with every angle fixed in advance; only the pair coins
/// are random. `angles[r - 1]` is the angle of rank `r`.
pub fn frozen_growth_replicate(
    angles: &[f64],
    p: &ModelParams,
    seed: u64,
) -> Result<Graph, GenError> {
    if angles.len() != p.size {
        return Err(GenError::Coordinates {
            expected: p.size,
            got: angles.len(),
        });
    }
    let geom = GrowthGeometry::new(p)?;
    let mut by_rank = Vec::with_capacity(p.size + 1);
    by_rank.push(0.0);
    by_rank.extend_from_slice(angles);
    let mut rng = rng_for(seed);
    let mut edges = Vec::new();
    for i in 1..=p.size {
        grow_node(&geom, &by_rank, i, &mut rng, &mut edges);
    }
    Ok(Graph::from_index_edges(p.size, &edges).0)
}

fn grow_node(
    geom: &GrowthGeometry,
    angles: &[f64],
    i: usize,
    rng: &mut ChaCha20Rng,
    edges: &mut Vec<(usize, usize)>,
) {
    let inv_two_t = geom.inv_two_t();
    for j in 1..i {
        let shape = geom.pair_shape_at(j, i);
        let prob = shape.probability(angles[i] - angles[j], inv_two_t);
        if rng.random::<f64>() < prob {
            edges.push((i - 1, j - 1));
        }
    }
}

/// Writes `# rank r theta` followed by one line per rank.
pub fn write_truth<W: Write>(truth: &[PolarCoord], mut out: W) -> io::Result<()> {
    writeln!(out, "# rank r theta")?;
    for (k, c) in truth.iter().enumerate() {
        writeln!(out, "{} {} {}", k + 1, fmt_float(c.r), fmt_float(c.theta))?;
    }
    Ok(())
}

/// Reads a truth sidecar; ranks must run 1..=n in order.
pub fn read_truth<R: BufRead>(reader: R) -> Result<Vec<PolarCoord>, GenError> {
    let mut truth = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: &str| GenError::Truth {
            line: n + 1,
            message: message.to_string(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad("expected three fields"));
        }
        let rank: usize = fields[0].parse().map_err(|_| bad("bad rank"))?;
        if rank != truth.len() + 1 {
            return Err(bad("ranks must be consecutive from 1"));
        }
        let r: f64 = fields[1].parse().map_err(|_| bad("bad radius"))?;
        let theta: f64 = fields[2].parse().map_err(|_| bad("bad angle"))?;
        truth.push(PolarCoord { r, theta });
    }
    Ok(truth)
}
