//! Sequential maximum-likelihood placement of nodes on the circle.
//!
//! Nodes are placed in birth-rank order. Each new node gets the grid angle
//! that maximizes its local likelihood given the nodes already placed;
//! optional correction sweeps then revisit every placed node.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{normalize_angle, GrowthGeometry, ModelParams, ParamError, PolarCoord};
use crate::graph::{rank_by_degree, Graph, GraphError, GrowthSchedule, RankedAdjacency};
use crate::likelihood::{
    cn_loglik, correction_terms, init_terms, link_terms, maximize_profile, AngleGrid, CnEngine,
    CnError, LikelihoodProfile, Quadrature,
};
use crate::textio::fmt_float;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cn(#[from] CnError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("coordinate file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("node {0} has no coordinates")]
    MissingNode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Link,
    Cn,
    Hybrid,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Method::Link => "link",
            Method::Cn => "cn",
            Method::Hybrid => "hybrid",
        })
    }
}

impl FromStr for Method {
    type Err = EmbedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "link" => Ok(Method::Link),
            "cn" => Ok(Method::Cn),
            "hybrid" => Ok(Method::Hybrid),
            other => Err(EmbedError::Config(format!(
                "unknown method {other:?} (link, cn, hybrid)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedConfig {
    pub method: Method,
    /// Neighbor-only initial estimate plus windowed search for low-degree nodes.
    pub fast: bool,
    /// Half-width of the fast-path window is `window_c / i`.
    pub window_c: f64,
    /// Nodes with degree below this use the fast path when `fast` is set.
    pub k_speedup: usize,
    /// Degree thresholds triggering correction steps, strictly decreasing.
    pub correction_degrees: Vec<usize>,
    /// Sweeps per correction step; `None` uses the rounded average degree.
    pub correction_repeats: Option<usize>,
    pub theta1: f64,
    pub quadrature: Quadrature,
    /// Spectral evaluation of the common-neighbor likelihood.
    pub cn_spectral: bool,
    /// Model parameters; the size is taken from the graph.
    pub params: ModelParams,
}

impl EmbedConfig {
    pub fn new(params: ModelParams) -> Self {
        Self {
            method: Method::Hybrid,
            fast: false,
            window_c: 200.0,
            k_speedup: 10,
            correction_degrees: vec![60, 40, 20, 10],
            correction_repeats: None,
            theta1: PI,
            quadrature: Quadrature::default(),
            cn_spectral: true,
            params,
        }
    }

    pub fn without_corrections(mut self) -> Self {
        self.correction_degrees.clear();
        self
    }

    pub fn validate(&self) -> Result<(), EmbedError> {
        if !(self.window_c > 0.0) {
            return Err(EmbedError::Config(format!(
                "window C must be positive, got {}",
                self.window_c
            )));
        }
        if self.correction_degrees.contains(&0) {
            return Err(EmbedError::Config(
                "correction degree thresholds must be positive".into(),
            ));
        }
        if self.correction_degrees.windows(2).any(|w| w[0] <= w[1]) {
            return Err(EmbedError::Config(
                "correction degree thresholds must be strictly decreasing".into(),
            ));
        }
        if !self.theta1.is_finite() {
            return Err(EmbedError::Config("theta1 must be finite".into()));
        }
        Quadrature::new(self.quadrature.points)?;
        self.params.validate()?;
        Ok(())
    }
}

/// Coordinates of one embedded node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeCoord {
    pub label: String,
    pub rank: usize,
    pub degree: usize,
    pub r: f64,
    pub theta: f64,
}

/// Final-time coordinates of every node, ordered by rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub nodes: Vec<NodeCoord>,
    pub params: ModelParams,
    pub method: String,
}

impl Embedding {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Angles by rank, slot 0 unused.
    pub fn angles_by_rank(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.nodes.iter().map(|n| n.theta))
            .collect()
    }

    /// Coordinates aligned with the node indices of `g`.
    pub fn coords_for(&self, g: &Graph) -> Result<Vec<PolarCoord>, EmbedError> {
        let by_label: HashMap<&str, &NodeCoord> =
            self.nodes.iter().map(|n| (n.label.as_str(), n)).collect();
        g.labels()
            .iter()
            .map(|l| {
                by_label
                    .get(l.as_str())
                    .map(|n| PolarCoord {
                        r: n.r,
                        theta: n.theta,
                    })
                    .ok_or_else(|| EmbedError::MissingNode(l.clone()))
            })
            .collect()
    }

    /// Same embedding with every angle shifted by `delta`.
    pub fn rotated(&self, delta: f64) -> Self {
        let mut e = self.clone();
        for n in &mut e.nodes {
            n.theta = normalize_angle(n.theta + delta);
        }
        e
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        let p = &self.params;
        writeln!(
            out,
            "# params m={} L={} beta={} T={} zeta={} t={} method={}",
            fmt_float(p.m),
            fmt_float(p.l),
            fmt_float(p.beta),
            fmt_float(p.temperature),
            fmt_float(p.zeta),
            p.size,
            self.method
        )?;
        writeln!(out, "# label rank degree r theta")?;
        for n in &self.nodes {
            writeln!(
                out,
                "{} {} {} {} {}",
                n.label,
                n.rank,
                n.degree,
                fmt_float(n.r),
                fmt_float(n.theta)
            )?;
        }
        Ok(())
    }

    /// Reads a coordinate file. Parameters come from its `# params` line or,
    /// failing that, from `fallback`.
    pub fn read<R: BufRead>(reader: R, fallback: Option<ModelParams>) -> Result<Self, EmbedError> {
        let mut nodes = Vec::new();
        let mut params = None;
        let mut method = String::from("unknown");
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let bad = |message: String| EmbedError::Parse {
                line: n + 1,
                message,
            };
            if let Some(rest) = line.strip_prefix("# params") {
                let (p, m) = parse_params_line(rest).map_err(bad)?;
                params = Some(p);
                method = m;
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 {
                return Err(bad("expected label rank degree r theta".into()));
            }
            nodes.push(NodeCoord {
                label: f[0].to_string(),
                rank: f[1].parse().map_err(|_| bad("bad rank".into()))?,
                degree: f[2].parse().map_err(|_| bad("bad degree".into()))?,
                r: f[3].parse().map_err(|_| bad("bad radius".into()))?,
                theta: f[4].parse().map_err(|_| bad("bad angle".into()))?,
            });
        }
        let params = params
            .or(fallback)
            .ok_or_else(|| EmbedError::Config("coordinate file has no parameters line".into()))?;
        nodes.sort_by_key(|n| n.rank);
        Ok(Self {
            nodes,
            params,
            method,
        })
    }
}

fn parse_params_line(rest: &str) -> Result<(ModelParams, String), String> {
    let mut kv = HashMap::new();
    for tok in rest.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format!("bad parameter token {tok:?}"))?;
        kv.insert(k, v);
    }
    let num = |k: &str| -> Result<f64, String> {
        kv.get(k)
            .ok_or_else(|| format!("missing parameter {k}"))?
            .parse()
            .map_err(|_| format!("bad parameter {k}"))
    };
    let p = ModelParams {
        m: num("m")?,
        l: num("L")?,
        beta: num("beta")?,
        temperature: num("T")?,
        zeta: num("zeta")?,
        size: num("t")? as usize,
    };
    Ok((p, kv.get("method").unwrap_or(&"unknown").to_string()))
}

/// One executed correction step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionEvent {
    pub threshold: usize,
    pub time: usize,
    pub sweeps: usize,
    pub moved: usize,
}

/// What happened during a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EmbedLog {
    pub method: String,
    /// Last rank placed by the common-neighbor likelihood (0 if none).
    pub switch_index: usize,
    pub corrections: Vec<CorrectionEvent>,
    pub skipped_thresholds: Vec<usize>,
    pub fast_placed: usize,
    /// Fast-path nodes without an older neighbor, placed on the full grid.
    pub fast_fallbacks: usize,
    pub wall_seconds: f64,
}

/// Stepwise embedding driver.
pub struct Embedder<'g> {
    graph: &'g Graph,
    schedule: GrowthSchedule,
    adj: RankedAdjacency,
    geom: GrowthGeometry,
    cfg: EmbedConfig,
    angles: Vec<f64>,
    frozen: Vec<bool>,
    placed: usize,
    cn_until: usize,
    triggers: Vec<(usize, usize)>,
    repeats: usize,
    engine: Option<CnEngine>,
    log: EmbedLog,
    started: Instant,
}

impl<'g> Embedder<'g> {
    pub fn new(graph: &'g Graph, cfg: EmbedConfig) -> Result<Self, EmbedError> {
        cfg.validate()?;
        let schedule = rank_by_degree(graph)?;
        let adj = RankedAdjacency::new(graph, &schedule);
        let t = graph.node_count();
        let mut cfg = cfg;
        cfg.params = cfg.params.with_size(t);
        let geom = GrowthGeometry::new(&cfg.params)?;
        let cn_until = match cfg.method {
            Method::Link => 0,
            Method::Cn => t,
            Method::Hybrid => geom.last_saturated_rank(),
        };
        let mut log = EmbedLog {
            method: cfg.method.to_string(),
            switch_index: cn_until,
            ..EmbedLog::default()
        };
        let mut triggers = Vec::new();
        for &d in &cfg.correction_degrees {
            let time = (1..=t).take_while(|&r| adj.degree(r) >= d).last();
            match time {
                Some(time) if time >= 2 => triggers.push((d, time)),
                _ => {
                    log::info!(
                        "no correction step for degree threshold {d}: too few nodes reach it"
                    );
                    log.skipped_thresholds.push(d);
                }
            }
        }
        let repeats = cfg
            .correction_repeats
            .unwrap_or_else(|| graph.average_degree().round() as usize);
        let engine =
            (cn_until > 1 && cfg.cn_spectral).then(|| CnEngine::new(&geom, cfg.quadrature));
        Ok(Self {
            graph,
            schedule,
            adj,
            geom,
            angles: vec![0.0; t + 1],
            frozen: vec![false; t + 1],
            placed: 0,
            cn_until,
            triggers,
            repeats,
            engine,
            cfg,
            log,
            started: Instant::now(),
        })
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn placed(&self) -> usize {
        self.placed
    }

    /// Angles by rank, slot 0 unused; only the first `placed()` are set.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn geometry(&self) -> &GrowthGeometry {
        &self.geom
    }

    pub fn adjacency(&self) -> &RankedAdjacency {
        &self.adj
    }

    pub fn schedule(&self) -> &GrowthSchedule {
        &self.schedule
    }

    pub fn config(&self) -> &EmbedConfig {
        &self.cfg
    }

    pub fn log(&self) -> &EmbedLog {
        &self.log
    }

    /// Ranks whose correction step fires right after they are placed.
    pub fn correction_times(&self) -> Vec<(usize, usize)> {
        self.triggers.clone()
    }

    /// Places the next rank and runs any correction step due at that time.
    pub fn place_next(&mut self) -> Option<usize> {
        let i = self.placed + 1;
        if i > self.len() {
            return None;
        }
        let theta = self.choose_angle(i);
        self.angles[i] = normalize_angle(theta);
        self.placed = i;
        if self.cfg.method == Method::Hybrid && i <= self.cn_until {
            self.frozen[i] = true;
        }
        let due: Vec<usize> = self
            .triggers
            .iter()
            .filter(|t| t.1 == i)
            .map(|t| t.0)
            .collect();
        for threshold in due {
            let mut moved = 0;
            for _ in 0..self.repeats {
                moved += self.correction_sweep();
            }
            log::debug!("correction step for degree {threshold} at time {i}: {moved} moves");
            self.log.corrections.push(CorrectionEvent {
                threshold,
                time: i,
                sweeps: self.repeats,
                moved,
            });
        }
        Some(i)
    }

    pub fn run_until(&mut self, i: usize) {
        while self.placed < i.min(self.len()) {
            self.place_next();
        }
    }

    fn choose_angle(&mut self, i: usize) -> f64 {
        if i == 1 {
            return self.cfg.theta1;
        }
        let grid = AngleGrid::for_rank(i);
        if i <= self.cn_until {
            return self.cn_profile(i, &grid).argmax_theta;
        }
        if self.cfg.fast && self.adj.degree(i) < self.cfg.k_speedup {
            self.log.fast_placed += 1;
            return self.fast_angle(i, &grid);
        }
        link_terms(i, &self.angles, &self.adj, &self.geom)
            .profile(&grid)
            .argmax_theta
    }

    /// Common-neighbor profile of rank `i` over the grid.
    pub fn cn_profile(&mut self, i: usize, grid: &AngleGrid) -> LikelihoodProfile {
        let counts: Vec<usize> = (0..i)
            .map(|j| {
                if j == 0 {
                    0
                } else {
                    self.adj.common_neighbors(i, j)
                }
            })
            .collect();
        let thetas = grid.angles();
        match self.engine.as_mut() {
            Some(engine) => {
                let scores = engine.loglik_profile(i, &self.angles, &counts, &thetas);
                LikelihoodProfile::from_scores(thetas, scores)
            }
            None => {
                let (geom, angles, quad) = (&self.geom, &self.angles, self.cfg.quadrature);
                maximize_profile(
                    |th| cn_loglik(i, th, angles, &counts, geom, quad).unwrap_or(f64::NEG_INFINITY),
                    &thetas,
                )
            }
        }
    }

    /// Link-likelihood profile of rank `i` against the placed older ranks.
    pub fn link_profile(&self, i: usize, grid: &AngleGrid) -> LikelihoodProfile {
        link_terms(i, &self.angles, &self.adj, &self.geom).profile(grid)
    }

    /// Neighbor-only initial estimate of rank `i`, if it has older neighbors.
    pub fn initial_estimate(&self, i: usize, grid: &AngleGrid) -> Option<f64> {
        init_terms(i, &self.angles, &self.adj, &self.geom).map(|t| t.profile(grid).argmax_theta)
    }

    fn fast_angle(&mut self, i: usize, grid: &AngleGrid) -> f64 {
        let terms = link_terms(i, &self.angles, &self.adj, &self.geom);
        match self.initial_estimate(i, grid) {
            Some(init) => {
                let window = grid.window(init, self.cfg.window_c / i as f64);
                terms.profile_at(grid, &window).argmax_theta
            }
            None => {
                self.log.fast_fallbacks += 1;
                terms.profile(grid).argmax_theta
            }
        }
    }

    /// One ascending sweep over all placed, unfrozen ranks; returns the number
    /// of angles changed. An angle moves only to a strictly better grid point.
    pub fn correction_sweep(&mut self) -> usize {
        let i = self.placed;
        if i < 2 {
            return 0;
        }
        let grid = AngleGrid::for_rank(i);
        let mut moved = 0;
        for j in 1..=i {
            if self.frozen[j] {
                continue;
            }
            let terms = correction_terms(j, i, &self.angles, &self.adj, &self.geom);
            let current = terms.eval(self.angles[j]);
            let prof = terms.profile(&grid);
            if prof.max() > current {
                self.angles[j] = prof.argmax_theta;
                moved += 1;
            }
        }
        moved
    }

    /// Sum over placed ranks of their correction log-likelihood.
    pub fn correction_objective(&self) -> f64 {
        let i = self.placed;
        (1..=i)
            .map(|j| {
                correction_terms(j, i, &self.angles, &self.adj, &self.geom).eval(self.angles[j])
            })
            .sum()
    }

    /// Places every remaining node and returns the embedding.
    pub fn finish(mut self) -> (Embedding, EmbedLog) {
        self.run_until(self.len());
        self.log.wall_seconds = self.started.elapsed().as_secs_f64();
        let t = self.len();
        let nodes = (1..=t)
            .map(|r| NodeCoord {
                label: self.schedule.label_of(self.graph, r).to_string(),
                rank: r,
                degree: self.adj.degree(r),
                r: self.geom.final_radius(r),
                theta: self.angles[r],
            })
            .collect();
        let method = if self.cfg.fast {
            format!("{}-fast", self.cfg.method)
        } else {
            self.cfg.method.to_string()
        };
        (
            Embedding {
                nodes,
                params: self.cfg.params,
                method,
            },
            self.log,
        )
    }
}

pub fn embed(g: &Graph, cfg: EmbedConfig) -> Result<(Embedding, EmbedLog), EmbedError> {
    Ok(Embedder::new(g, cfg)?.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate;
    use crate::likelihood::link_loglik;

    fn params(t: usize) -> ModelParams {
        ModelParams::from_gamma(1.5, 2.5, 2.1, 0.4, 1.0, t).unwrap()
    }

    #[test]
    fn first_node_is_fixed() {
        let net = generate(&params(40), 2).unwrap();
        let (e, _) = embed(
            &net.graph,
            EmbedConfig::new(params(40)).without_corrections(),
        )
        .unwrap();
        assert_eq!(e.nodes[0].rank, 1);
        assert_eq!(e.nodes[0].theta, PI);
        assert_eq!(e.nodes[0].r, 2.0 * (1.0 - e.params.beta) * 40f64.ln());
    }

    #[test]
    fn path_graph_matches_brute_force() {
        // a - b - c: b has rank 1, a rank 2, c rank 3
        let (g, _) = Graph::from_edges([("a", "b"), ("b", "c")]);
        let mut cfg = EmbedConfig::new(params(3)).without_corrections();
        cfg.method = Method::Link;
        let (e, _) = embed(&g, cfg).unwrap();
        let p = params(3);
        let geom = GrowthGeometry::new(&p).unwrap();
        let adj = RankedAdjacency::from_rank_edges(3, &[(1, 2), (1, 3)]);
        let mut angles = vec![0.0, PI, 0.0, 0.0];
        for i in 2..=3 {
            let grid = AngleGrid::for_rank(i);
            let mut best = (f64::NEG_INFINITY, 0.0);
            for n in 0..grid.len() {
                let th = grid.angle(n);
                let v = link_loglik(i, th, &angles, &adj, &geom);
                if v > best.0 {
                    best = (v, th);
                }
            }
            angles[i] = best.1;
        }
        let labels: Vec<&str> = e.nodes.iter().map(|n| n.label.as_str()).collect();
        assert_eq!(labels, ["b", "a", "c"]);
        assert_eq!(e.nodes[1].theta, angles[2]);
        assert_eq!(e.nodes[2].theta, angles[3]);
    }

    #[test]
    fn switch_index_follows_expected_degree() {
        let net = generate(&params(300), 4).unwrap();
        let cfg = EmbedConfig::new(params(300)).without_corrections();
        let emb = Embedder::new(&net.graph, cfg).unwrap();
        let geom = emb.geometry();
        let s = emb.log().switch_index;
        assert!(s >= 2);
        assert!(geom.mbar(s) >= (s - 1) as f64);
        assert!(geom.mbar(s + 1) < s as f64);
    }

    #[test]
    fn deterministic() {
        let net = generate(&params(150), 8).unwrap();
        let mut cfg = EmbedConfig::new(params(150));
        cfg.fast = true;
        let (a, _) = embed(&net.graph, cfg.clone()).unwrap();
        let (b, _) = embed(&net.graph, cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn saturated_window_equals_full_search() {
        let net = generate(&params(120), 5).unwrap();
        let mut cfg = EmbedConfig::new(params(120)).without_corrections();
        cfg.method = Method::Link;
        let (full, _) = embed(&net.graph, cfg.clone()).unwrap();
        cfg.fast = true;
        cfg.k_speedup = usize::MAX;
        cfg.window_c = 1e9;
        let (fast, log) = embed(&net.graph, cfg).unwrap();
        assert!(log.fast_placed > 0);
        let a: Vec<f64> = full.nodes.iter().map(|n| n.theta).collect();
        let b: Vec<f64> = fast.nodes.iter().map(|n| n.theta).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn corrections_never_decrease_the_objective() {
        let net = generate(&params(200), 3).unwrap();
        let mut cfg = EmbedConfig::new(params(200));
        cfg.method = Method::Link;
        cfg.correction_degrees.clear();
        let mut emb = Embedder::new(&net.graph, cfg).unwrap();
        emb.run_until(60);
        let mut last = emb.correction_objective();
        for _ in 0..3 {
            emb.correction_sweep();
            let now = emb.correction_objective();
            assert!(now >= last - 1e-9, "{now} < {last}");
            last = now;
        }
    }

    #[test]
    fn zero_repeats_change_nothing() {
        let net = generate(&params(150), 6).unwrap();
        let mut cfg = EmbedConfig::new(params(150));
        cfg.method = Method::Link;
        let mut none = cfg.clone();
        none.correction_degrees.clear();
        cfg.correction_repeats = Some(0);
        let (a, la) = embed(&net.graph, cfg).unwrap();
        let (b, _) = embed(&net.graph, none).unwrap();
        assert_eq!(a.nodes, b.nodes);
        assert!(la.corrections.iter().all(|c| c.moved == 0));
    }

    #[test]
    fn hybrid_phase_is_frozen_during_corrections() {
        let net = generate(&params(200), 12).unwrap();
        let cfg = EmbedConfig::new(params(200));
        let mut emb = Embedder::new(&net.graph, cfg).unwrap();
        let s = emb.log().switch_index;
        emb.run_until(s);
        let before: Vec<f64> = emb.angles()[..=s].to_vec();
        emb.run_until(100);
        emb.correction_sweep();
        assert_eq!(&emb.angles()[..=s], &before[..]);
    }

    #[test]
    fn hybrid_phase_equals_cn_method() {
        let net = generate(&params(120), 10).unwrap();
        let cfg = EmbedConfig::new(params(120)).without_corrections();
        let mut cn = cfg.clone();
        cn.method = Method::Cn;
        let mut h = Embedder::new(&net.graph, cfg).unwrap();
        let s = h.log().switch_index;
        h.run_until(s);
        let mut c = Embedder::new(&net.graph, cn).unwrap();
        c.run_until(s);
        assert_eq!(h.angles()[..=s], c.angles()[..=s]);
    }

    #[test]
    fn spectral_and_direct_cn_agree_on_small_net() {
        let p = params(40);
        let net = generate(&p, 1).unwrap();
        let mut cfg = EmbedConfig::new(p).without_corrections();
        cfg.method = Method::Cn;
        let mut a = Embedder::new(&net.graph, cfg.clone()).unwrap();
        cfg.cn_spectral = false;
        let mut b = Embedder::new(&net.graph, cfg).unwrap();
        a.run_until(4);
        b.run_until(4);
        let grid = AngleGrid::with_step(0.05);
        let pa = a.cn_profile(5, &grid);
        let pb = b.cn_profile(5, &grid);
        for (x, y) in pa.loglik.iter().zip(&pb.loglik) {
            assert!((x - y).abs() < 1e-6 * y.abs().max(1.0));
        }
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = EmbedConfig::new(params(10));
        cfg.window_c = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = EmbedConfig::new(params(10));
        cfg.correction_degrees = vec![10, 20];
        assert!(cfg.validate().is_err());
        assert!("bogus".parse::<Method>().is_err());
        let (g, _) = Graph::from_edges(Vec::<(&str, &str)>::new());
        assert!(matches!(
            embed(&g, EmbedConfig::new(params(10))),
            Err(EmbedError::Graph(_))
        ));
    }

    #[test]
    fn coordinate_file_round_trip() {
        let net = generate(&params(60), 2).unwrap();
        let (e, _) = embed(
            &net.graph,
            EmbedConfig::new(params(60)).without_corrections(),
        )
        .unwrap();
        let mut buf = Vec::new();
        e.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap() == "# label rank degree r theta");
        let back = Embedding::read(text.as_bytes(), None).unwrap();
        assert_eq!(back, e);
        let coords = back.coords_for(&net.graph).unwrap();
        assert_eq!(coords.len(), 60);
        let short = text
            .lines()
            .filter(|l| !l.starts_with("17 "))
            .collect::<Vec<_>>()
            .join("\n");
        let missing = Embedding::read(short.as_bytes(), None)
            .unwrap()
            .coords_for(&net.graph);
        assert!(matches!(missing, Err(EmbedError::MissingNode(l)) if l == "17"));
    }
}
