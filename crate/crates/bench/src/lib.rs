//! Fixtures shared by the benchmarks.

use hyperembed::graph::RankedAdjacency;
use hyperembed::{generate, rank_by_degree, GrowthGeometry, ModelParams};

/// A synthetic network in rank space with its true angles.
pub struct Fixture {
    pub geom: GrowthGeometry,
    pub adj: RankedAdjacency,
    pub angles: Vec<f64>,
}

pub fn fixture(t: usize, seed: u64) -> Fixture {
    let params = ModelParams::from_gamma(1.5, 2.5, 2.1, 0.4, 1.0, t).expect("valid parameters");
    let net = generate(&params, seed).expect("generation");
    let schedule = rank_by_degree(&net.graph).expect("non-empty graph");
    let adj = RankedAdjacency::new(&net.graph, &schedule);
    let mut angles = vec![0.0; t + 1];
    for r in 1..=t {
        let label: usize = schedule
            .label_of(&net.graph, r)
            .parse()
            .expect("numeric label");
        angles[r] = net.truth[label - 1].theta;
    }
    Fixture {
        geom: GrowthGeometry::new(&params).expect("geometry"),
        adj,
        angles,
    }
}
