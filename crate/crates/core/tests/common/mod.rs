//! Invariance and reference checks shared by the acceptance run and the
//! property tests. Each returns a short summary or a description of the
//! first violation.

#![allow(dead_code)]

use std::f64::consts::TAU;

use hyperembed::evaluate::{empirical_connection_probability, greedy_route, log_loss};
use hyperembed::graph::RankedAdjacency;
use hyperembed::likelihood::{cn_loglik, correction_loglik, link_loglik};
use hyperembed::{
    auc, embed, generate, gr_stats, log_loss_random_baseline, predict, rank_by_degree, EmbedConfig,
    Embedding, Graph, GrowthGeometry, Method, ModelParams, Orientation, PolarCoord, Quadrature,
    ScoreMethod, Subset,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn params(t: usize, zeta: f64) -> ModelParams {
    ModelParams::from_gamma(1.5, 2.5, 2.1, 0.4, zeta, t).unwrap()
}

pub fn small_net(t: usize, seed: u64) -> Graph {
    generate(&params(t, 1.0), seed).unwrap().graph
}

pub fn embed_small(g: &Graph, zeta: f64, method: Method) -> Embedding {
    let mut cfg = EmbedConfig::new(params(g.node_count(), zeta));
    cfg.method = method;
    cfg.correction_degrees = vec![10];
    embed(g, cfg).unwrap().0
}

fn close(a: f64, b: f64, what: &str) -> Result<(), String> {
    if (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0) {
        Ok(())
    } else {
        Err(format!("{what}: {a} vs {b}"))
    }
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Embedding angles, reduced radii and log-losses do not depend on zeta.
pub fn zeta_invariance() -> Result<String, String> {
    let g = small_net(150, 2);
    let base = embed_small(&g, 1.0, Method::Hybrid);
    let base_ll = log_loss(&g, &base.coords_for(&g).unwrap(), &base.params).unwrap();
    for zeta in [0.5, 4.0] {
        let e = embed_small(&g, zeta, Method::Hybrid);
        for (a, b) in base.nodes.iter().zip(&e.nodes) {
            if circular_gap(a.theta, b.theta) > 1e-9 {
                return Err(format!(
                    "zeta {zeta}: node {} angle {} vs {}",
                    a.label, a.theta, b.theta
                ));
            }
            close(a.r, zeta * b.r, "reduced radius")?;
        }
        let ll = log_loss(&g, &e.coords_for(&g).unwrap(), &e.params).unwrap();
        close(base_ll, ll, "log-loss")?;
    }
    Ok(format!("{} nodes, zeta in {{0.5, 1, 4}}", g.node_count()))
}

/// Shifting every angle by the same amount changes no likelihood or metric.
pub fn rotation_invariance() -> Result<String, String> {
    let g = small_net(150, 3);
    let e = embed_small(&g, 1.0, Method::Link);
    let delta = 1.234;
    let turned = e.rotated(delta);
    let p = e.params;
    let (c0, c1) = (e.coords_for(&g).unwrap(), turned.coords_for(&g).unwrap());
    close(
        log_loss(&g, &c0, &p).unwrap(),
        log_loss(&g, &c1, &p).unwrap(),
        "log-loss",
    )?;
    close(
        log_loss_random_baseline(&g, &c0, &p, 3, 5).unwrap(),
        log_loss_random_baseline(&g, &c1, &p, 3, 5).unwrap(),
        "random log-loss",
    )?;

    let schedule = rank_by_degree(&g).unwrap();
    let adj = RankedAdjacency::new(&g, &schedule);
    let geom = GrowthGeometry::new(&p).unwrap();
    let (a0, a1) = (e.angles_by_rank(), turned.angles_by_rank());
    let quad = Quadrature::default();
    let counts: Vec<usize> = (0..=40)
        .map(|j| {
            if j == 0 {
                0
            } else {
                adj.common_neighbors(40, j)
            }
        })
        .collect();
    for theta in [0.3, 2.0, 5.1] {
        let shifted = theta + delta;
        close(
            link_loglik(120, theta, &a0, &adj, &geom),
            link_loglik(120, shifted, &a1, &adj, &geom),
            "link likelihood",
        )?;
        close(
            correction_loglik(17, theta, 150, &a0, &adj, &geom),
            correction_loglik(17, shifted, 150, &a1, &adj, &geom),
            "correction likelihood",
        )?;
        close(
            cn_loglik(40, theta, &a0, &counts, &geom, quad).unwrap(),
            cn_loglik(40, shifted, &a1, &counts, &geom, quad).unwrap(),
            "common-neighbor likelihood",
        )?;
    }

    let (h0, h1) = (
        empirical_connection_probability(&g, &c0, 1.0, 0.5),
        empirical_connection_probability(&g, &c1, 1.0, 0.5),
    );
    let counts0: Vec<(usize, usize)> = h0.iter().map(|b| (b.pairs, b.connected)).collect();
    let counts1: Vec<(usize, usize)> = h1.iter().map(|b| (b.pairs, b.connected)).collect();
    if counts0 != counts1 {
        return Err("connection-probability histogram changed".into());
    }
    let (g0, g1) = (
        gr_stats(&g, &c0, 1.0, 5000, 4),
        gr_stats(&g, &c1, 1.0, 5000, 4),
    );
    close(g0.success_ratio, g1.success_ratio, "routing success")?;
    close(g0.mean_hops, g1.mean_hops, "routing hops")?;

    let future = generate(&params(180, 1.0), 3).unwrap().graph;
    let (r0, r1) = (
        predict(&g, &future, &e, None, 0.5).unwrap(),
        predict(&g, &future, &turned, None, 0.5).unwrap(),
    );
    for subset in [Subset::All, Subset::ZeroCommonNeighbors, Subset::LowDegree] {
        match (
            r0.get(ScoreMethod::Hyperbolic, subset),
            r1.get(ScoreMethod::Hyperbolic, subset),
        ) {
            (Some(a), Some(b)) => close(a, b, "hyperbolic auc")?,
            (None, None) => {}
            _ => return Err(format!("auc defined in only one orientation for {subset}")),
        }
    }
    Ok(format!("rotation by {delta}"))
}

/// Brute-force AUC over all positive/negative pairs, lower scores better.
pub fn brute_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut twice = 0u64;
    for &a in pos {
        for &b in neg {
            twice += if a < b {
                2
            } else if a == b {
                1
            } else {
                0
            };
        }
    }
    twice as f64 / (2 * pos.len() * neg.len()) as f64
}

pub fn check_auc(pos: &[f64], neg: &[f64]) -> Result<(), String> {
    let fast = auc(pos, neg, Orientation::LowerIsBetter).map_err(|e| e.to_string())?;
    close(fast, brute_auc(pos, neg), "auc vs brute force")?;
    let flipped = auc(pos, neg, Orientation::HigherIsBetter).map_err(|e| e.to_string())?;
    close(flipped, 1.0 - fast, "orientation complement")?;
    let squashed: (Vec<f64>, Vec<f64>) = (
        pos.iter().map(|x| x.exp()).collect(),
        neg.iter().map(|x| x.exp()).collect(),
    );
    let monotone =
        auc(&squashed.0, &squashed.1, Orientation::LowerIsBetter).map_err(|e| e.to_string())?;
    close(monotone, fast, "monotone transform")
}

pub fn auc_brute_force() -> Result<String, String> {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    for _ in 0..200 {
        let np = rng.random_range(1..40);
        let nn = rng.random_range(1..40);
        // coarse values force ties
        let draw = |rng: &mut ChaCha20Rng| rng.random_range(0..12) as f64 * 0.25;
        let pos: Vec<f64> = (0..np).map(|_| draw(&mut rng)).collect();
        let neg: Vec<f64> = (0..nn).map(|_| draw(&mut rng)).collect();
        check_auc(&pos, &neg)?;
    }
    Ok("200 tied samples".into())
}

/// Independent greedy walker using the textbook law of cosines.
pub fn reference_route(
    g: &Graph,
    coords: &[PolarCoord],
    zeta: f64,
    s: usize,
    d: usize,
) -> (bool, usize) {
    let dist = |a: PolarCoord, b: PolarCoord| {
        let (x, y) = (zeta * a.r, zeta * b.r);
        (x.cosh() * y.cosh() - x.sinh() * y.sinh() * (a.theta - b.theta).cos())
            .max(1.0)
            .acosh()
            / zeta
    };
    let n = g.node_count();
    let (mut cur, mut prev, mut hops) = (s, None, 0);
    while cur != d {
        if hops >= n {
            return (false, hops);
        }
        let next = g.neighbors(cur).iter().copied().min_by(|&u, &v| {
            dist(coords[u], coords[d])
                .total_cmp(&dist(coords[v], coords[d]))
                .then_with(|| g.label(u).cmp(g.label(v)))
        });
        match next {
            None => return (false, hops),
            Some(v) if Some(v) == prev => return (false, hops),
            Some(v) => {
                prev = Some(cur);
                cur = v;
                hops += 1;
            }
        }
    }
    (true, hops)
}

pub fn check_walker(g: &Graph, coords: &[PolarCoord]) -> Result<(), String> {
    for s in 0..g.node_count() {
        for d in 0..g.node_count() {
            if s == d {
                continue;
            }
            let got = greedy_route(g, coords, 1.0, s, d);
            let want = reference_route(g, coords, 1.0, s, d);
            if (got.success, got.hops) != want {
                return Err(format!(
                    "route {s}->{d}: {:?} vs reference {want:?}",
                    (got.success, got.hops)
                ));
            }
        }
    }
    Ok(())
}

pub fn random_instance(n: usize, density: f64, seed: u64) -> (Graph, Vec<PolarCoord>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|_| rng.random_bool(density))
        .collect();
    let coords = (0..n)
        .map(|_| PolarCoord::new(rng.random_range(0.0..8.0), rng.random_range(0.0..TAU)))
        .collect();
    (Graph::from_index_edges(n, &edges).0, coords)
}

pub fn reference_walker() -> Result<String, String> {
    for seed in 0..50 {
        let (g, coords) = random_instance(10, 0.3, seed);
        check_walker(&g, &coords)?;
    }
    Ok("50 ten-node instances, all ordered pairs".into())
}

/// Every stage gives bit-identical results on 1 and 4 worker threads.
pub fn thread_determinism() -> Result<String, String> {
    let run = || {
        let p = params(250, 1.0);
        let net = generate(&p, 12).unwrap();
        let mut cfg = EmbedConfig::new(p);
        cfg.fast = true;
        cfg.correction_degrees = vec![12];
        let (e, _) = embed(&net.graph, cfg).unwrap();
        let coords = e.coords_for(&net.graph).unwrap();
        let ll = log_loss(&net.graph, &coords, &e.params).unwrap();
        let rand_ll = log_loss_random_baseline(&net.graph, &coords, &e.params, 2, 3).unwrap();
        let gr = gr_stats(&net.graph, &coords, 1.0, 3000, 3);
        let future = generate(&params(300, 1.0), 12).unwrap().graph;
        let report = predict(&net.graph, &future, &e, None, 0.5).unwrap();
        let aucs: Vec<Option<f64>> = report.rows.iter().map(|r| r.auc).collect();
        let edges: Vec<(usize, usize)> = net.graph.edges().collect();
        (
            edges,
            e,
            ll.to_bits(),
            rand_ll.to_bits(),
            gr.success_ratio.to_bits(),
            gr.mean_hops.to_bits(),
            aucs,
        )
    };
    let pool = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
    };
    let one = pool(1).install(run);
    let four = pool(4).install(run);
    if one != four {
        return Err("outputs differ between 1 and 4 threads".into());
    }
    Ok("generate, embed, eval and predict on 1 vs 4 threads".into())
}
