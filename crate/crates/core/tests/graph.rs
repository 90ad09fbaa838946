use nodedp::graph::{max_degree, parse_edge_list, sample_sbm, sample_weighted_sbm, thin_graph, AnyGraph, WeightModel};
use nodedp::rng::{derive, seeded};
use nodedp::{Graph, LabelAssignment, SbmParams};
use proptest::prelude::*;

fn two_block() -> SbmParams {
    SbmParams::new(200, vec![vec![0.3, 0.05], vec![0.05, 0.3]]).unwrap()
}

#[test]
fn all_ones_block_matrix_gives_complete_graph() {
    let p = SbmParams::planted(12, 3, 1.0, 1.0).unwrap();
    let g = sample_sbm(&p, &mut seeded(1)).unwrap();
    assert_eq!(g, Graph::complete(12));
}

#[test]
fn tiny_probability_gives_empty_graph() {
    let p = SbmParams::planted(40, 2, 1e-300, 1e-300).unwrap();
    let g = sample_sbm(&p, &mut seeded(2)).unwrap();
    assert_eq!(g.edge_count(), 0);
}

#[test]
fn rejects_invalid_params() {
    assert!(SbmParams::new(201, vec![vec![0.3, 0.05], vec![0.05, 0.3]]).is_err());
    assert!(SbmParams::new(200, vec![vec![0.3, 0.05], vec![0.06, 0.3]]).is_err());
    assert!(SbmParams::new(200, vec![vec![0.0, 0.05], vec![0.05, 0.3]]).is_err());
    assert!(SbmParams::new(200, vec![vec![1.2, 0.05], vec![0.05, 0.3]]).is_err());
}

#[test]
fn mean_degree_matches_binomial_mean() {
    // Node degree is Bin(99, 0.3) + Bin(100, 0.05).
    let expected = 99.0 * 0.3 + 100.0 * 0.05;
    let p = two_block();
    let mut total = 0.0;
    for s in 0..100 {
        let g = sample_sbm(&p, &mut derive(7, s)).unwrap();
        total += g.degrees().iter().sum::<usize>() as f64 / 200.0;
    }
    let mean = total / 100.0;
    assert!((mean - expected).abs() <= 1.0, "mean degree {mean} vs {expected}");
}

#[test]
fn degrees_stay_below_twice_expected_max() {
    // n=400, d = n·max(B) = 120 ≥ 25 log n.
    let p = SbmParams::new(400, vec![vec![0.3, 0.05], vec![0.05, 0.3]]).unwrap();
    let d = p.d();
    assert!(d >= 25.0 * (400f64).ln() / 2.0);
    let ok = (0..100)
        .filter(|&s| {
            let g = sample_sbm(&p, &mut derive(11, s)).unwrap();
            (g.max_degree() as f64) < 2.0 * d
        })
        .count();
    assert!(ok >= 99, "{ok}/100 seeds had all degrees below 2d");
}

#[test]
fn point_mass_weights_reproduce_unweighted_sample() {
    let p = two_block();
    let wm = WeightModel { mean: vec![vec![1.0, 1.0], vec![1.0, 1.0]], sd: 0.0 };
    let pw = p.clone().with_weights(wm).unwrap();
    let g = sample_sbm(&p, &mut seeded(3)).unwrap();
    let w = sample_weighted_sbm(&pw, &mut seeded(3)).unwrap();
    assert_eq!(w.binarize(), g);
    for (u, v) in g.edges() {
        assert_eq!(w.weight(u, v), 1.0);
    }
}

#[test]
fn gaussian_weight_mean_within_clt_band() {
    // Every pair is present, so the weight of (0,1) (same community) is a
    // pure Gaussian draw.
    let mu = 0.7;
    let sd = 0.4;
    let p = SbmParams::planted(4, 2, 1.0, 1.0)
        .unwrap()
        .with_weights(WeightModel { mean: vec![vec![mu, 0.0], vec![0.0, mu]], sd })
        .unwrap();
    let reps = 10_000;
    let mut sum = 0.0;
    for s in 0..reps {
        sum += sample_weighted_sbm(&p, &mut derive(5, s)).unwrap().weight(0, 1);
    }
    let mean = sum / reps as f64;
    let se = sd / (reps as f64).sqrt();
    assert!((mean - mu).abs() <= 3.0 * se, "mean {mean}");
}

#[test]
fn absent_edges_have_zero_weight() {
    let p = two_block().with_weights(WeightModel { mean: vec![vec![2.0, 1.0], vec![1.0, 2.0]], sd: 0.5 }).unwrap();
    let w = sample_weighted_sbm(&p, &mut seeded(4)).unwrap();
    let g = w.binarize();
    for u in 0..200 {
        for v in 0..200 {
            if !g.has_edge(u, v) {
                assert_eq!(w.weight(u, v), 0.0);
            }
        }
    }
}

#[test]
fn weighted_sbm_rejects_indefinite_mean() {
    let p = two_block().with_weights(WeightModel { mean: vec![vec![1.0, 2.0], vec![2.0, 1.0]], sd: 0.5 });
    assert!(p.is_err());
}

#[test]
fn thinning_with_one_copy_is_identity() {
    let g = sample_sbm(&two_block(), &mut seeded(6)).unwrap();
    let subs = thin_graph(&g, 1, 1, &mut seeded(7)).unwrap();
    assert_eq!(subs, vec![g]);
}

#[test]
fn thinning_empty_graph() {
    let subs = thin_graph(&Graph::empty(30), 5, 5, &mut seeded(8)).unwrap();
    assert_eq!(subs.len(), 5);
    assert!(subs.iter().all(|s| s.edge_count() == 0));
}

#[test]
fn thinning_requires_matching_count() {
    assert!(thin_graph(&Graph::empty(3), 3, 2, &mut seeded(0)).is_err());
}

#[test]
fn thinned_complete_graph_edge_count() {
    let g = Graph::complete(100);
    let mut total = 0.0;
    let mut count = 0.0;
    for s in 0..200 {
        for sub in thin_graph(&g, 5, 5, &mut derive(9, s)).unwrap() {
            total += sub.edge_count() as f64;
            count += 1.0;
        }
    }
    let mean = total / count;
    assert!((mean - 990.0).abs() <= 30.0, "mean edges {mean}");
}

#[test]
fn thinned_sbm_matches_scaled_block_law() {
    // Each subgraph is an SBM with B/T: check the within and between edge
    // frequencies against 3σ binomial bands.
    let p = two_block();
    let t = 3;
    let half = 100usize;
    let pairs_in = 2 * half * (half - 1) / 2;
    let pairs_out = half * half;
    let reps = 40;
    let (mut e_in, mut e_out) = (0usize, 0usize);
    for s in 0..reps {
        let g = sample_sbm(&p, &mut derive(10, s)).unwrap();
        let sub = &thin_graph(&g, t, t, &mut derive(11, s)).unwrap()[0];
        for (u, v) in sub.edges() {
            if (u < half) == (v < half) {
                e_in += 1;
            } else {
                e_out += 1;
            }
        }
    }
    for (count, pairs, prob) in [(e_in, pairs_in, 0.3 / 3.0), (e_out, pairs_out, 0.05 / 3.0)] {
        let trials = (pairs * reps as usize) as f64;
        let mean = trials * prob;
        let sd = (trials * prob * (1.0 - prob)).sqrt();
        assert!((count as f64 - mean).abs() <= 3.0 * sd, "count {count} vs {mean}±{sd}");
    }
}

#[test]
fn max_degree_examples() {
    assert_eq!(max_degree(&Graph::empty(5)), 0);
    assert_eq!(max_degree(&Graph::complete(7)), 6);
    assert_eq!(max_degree(&Graph::path(3)), 2);
}

#[test]
fn edge_list_round_trip() {
    let g = sample_sbm(&two_block(), &mut seeded(12)).unwrap();
    match parse_edge_list(&g.to_edge_list()).unwrap() {
        AnyGraph::Plain(h) => assert_eq!(h, g),
        AnyGraph::Weighted(_) => panic!("expected unweighted"),
    }
    let p = two_block().with_weights(WeightModel { mean: vec![vec![2.0, 1.0], vec![1.0, 2.0]], sd: 0.5 }).unwrap();
    let w = sample_weighted_sbm(&p, &mut seeded(13)).unwrap();
    match parse_edge_list(&w.to_edge_list()).unwrap() {
        AnyGraph::Weighted(h) => assert_eq!(h, w),
        AnyGraph::Plain(_) => panic!("expected weighted"),
    }
}

#[test]
fn edge_list_rejects_bad_input() {
    assert!(parse_edge_list("0 1\n").is_err());
    assert!(parse_edge_list("n=3 weighted=0\n0 3\n").is_err());
    assert!(parse_edge_list("n=3 weighted=0\n1 1\n").is_err());
}

#[test]
fn membership_is_one_hot() {
    let t = LabelAssignment::new(vec![0, 2, 1, 1, 0], 3).unwrap();
    let m = t.to_membership();
    for i in 0..5 {
        let row = m.row(i);
        assert_eq!(row.iter().sum::<f64>(), 1.0);
        assert_eq!(row[t.labels()[i]], 1.0);
    }
    assert!(LabelAssignment::new(vec![0, 3], 3).is_err());
}

proptest! {
    #[test]
    fn sampled_graphs_are_symmetric_loopless(seed in any::<u64>(), pin in 0.01f64..1.0, pout in 0.01f64..1.0) {
        let p = SbmParams::planted(30, 3, pin, pout).unwrap();
        let g = sample_sbm(&p, &mut seeded(seed)).unwrap();
        let a = g.adjacency::<f64>();
        for i in 0..30 {
            prop_assert_eq!(a[(i, i)], 0.0);
            for j in 0..30 {
                prop_assert_eq!(a[(i, j)], a[(j, i)]);
            }
            prop_assert_eq!(g.degree(i), a.row(i).iter().sum::<f64>() as usize);
            prop_assert!(g.degree(i) < 30);
        }
    }

    #[test]
    fn binarized_weighted_graph_is_valid(seed in any::<u64>()) {
        let p = SbmParams::planted(20, 2, 0.5, 0.2).unwrap()
            .with_weights(WeightModel { mean: vec![vec![2.0, 1.0], vec![1.0, 2.0]], sd: 1.0 }).unwrap();
        let w = sample_weighted_sbm(&p, &mut seeded(seed)).unwrap();
        let m = w.matrix();
        prop_assert!(m.is_symmetric(0.0));
        let g = w.binarize();
        for i in 0..20 {
            prop_assert_eq!(m[(i, i)], 0.0);
            prop_assert!(!g.has_edge(i, i));
        }
    }
}
