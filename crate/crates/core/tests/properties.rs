mod common;

use std::f64::consts::TAU;

use hyperembed::evaluate::log_loss;
use hyperembed::geometry::{hyperbolic_distance, reduced_distance, PolarCoord};
use hyperembed::{gr_stats, Graph, ModelParams};
use proptest::prelude::*;

fn arb_instance() -> impl Strategy<Value = (Graph, Vec<PolarCoord>)> {
    (2usize..14, 0.1f64..0.9, any::<u64>())
        .prop_map(|(n, density, seed)| common::random_instance(n, density, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn auc_matches_pair_counting(
        pos in prop::collection::vec(0u8..8, 1..30),
        neg in prop::collection::vec(0u8..8, 1..30),
    ) {
        let pos: Vec<f64> = pos.into_iter().map(f64::from).collect();
        let neg: Vec<f64> = neg.into_iter().map(f64::from).collect();
        prop_assert_eq!(common::check_auc(&pos, &neg), Ok(()));
    }

    #[test]
    fn greedy_routes_match_the_reference_walker((g, coords) in arb_instance()) {
        prop_assert_eq!(common::check_walker(&g, &coords), Ok(()));
    }

    #[test]
    fn routing_and_log_loss_ignore_rotation((g, coords) in arb_instance(), delta in 0.0..TAU) {
        let p = ModelParams::from_gamma(1.5, 2.5, 2.1, 0.4, 1.0, g.node_count()).unwrap();
        let turned: Vec<PolarCoord> = coords.iter().map(|c| PolarCoord::new(c.r, c.theta + delta)).collect();
        let (a, b) = (log_loss(&g, &coords, &p).unwrap(), log_loss(&g, &turned, &p).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        let (s, t) = (gr_stats(&g, &coords, 1.0, 1000, 1), gr_stats(&g, &turned, 1.0, 1000, 1));
        prop_assert_eq!(s.success_ratio, t.success_ratio);
    }

    #[test]
    fn distance_scales_with_curvature(
        ra in 0.0f64..20.0, rb in 0.0f64..20.0, ta in 0.0..TAU, tb in 0.0..TAU, zeta in 0.1f64..5.0,
    ) {
        let (a, b) = (PolarCoord::new(ra / zeta, ta), PolarCoord::new(rb / zeta, tb));
        let reduced = reduced_distance(ra, rb, (ta - tb).abs());
        let full = hyperbolic_distance(a, b, zeta);
        prop_assert!((zeta * full - reduced).abs() <= 1e-9 * reduced.max(1.0));
    }
}

#[test]
fn embeddings_do_not_depend_on_curvature() {
    common::zeta_invariance().unwrap();
}

#[test]
fn embeddings_and_metrics_commute_with_rotation() {
    common::rotation_invariance().unwrap();
}

#[test]
fn results_do_not_depend_on_thread_count() {
    common::thread_determinism().unwrap();
}
