use nodedp::graph::{sample_sbm, SbmParams};
use nodedp::linalg::{orthonormalize, DenseMatrix};
use nodedp::lp::*;
use nodedp::rng::{derive, seeded};
use nodedp::{Graph, NoiseMode, SeedRng, WeightedGraph};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn random_orthonormal(n: usize, q: usize, rng: &mut SeedRng) -> DenseMatrix<f64> {
    let m = DenseMatrix::from_fn(n, q, |_, _| rng.sample::<f64, _>(StandardNormal));
    orthonormalize(&m).unwrap()
}

fn random_graph(n: usize, p: f64, rng: &mut SeedRng) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                g.add_edge(u, v);
            }
        }
    }
    g
}

#[test]
fn single_variable_examples() {
    let mut p = LpProblem::<f64>::new(1, Sense::Maximize);
    p.objective[0] = 1.0;
    p.set_bounds(0, 0.0, 1.0);
    let s = solve_lp(&p).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.objective - 1.0).abs() < 1e-12);

    let mut q = LpProblem::<f64>::new(1, Sense::Minimize);
    q.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
    q.add_constraint(vec![(0, 1.0)], Relation::Le, 0.0);
    q.add_constraint(vec![(0, 1.0)], Relation::Ge, 1.0);
    assert_eq!(solve_lp(&q).unwrap().status, LpStatus::Infeasible);
    assert!(solve_lp(&q).unwrap().into_optimal().is_err());

    let mut u = LpProblem::<f64>::new(1, Sense::Maximize);
    u.objective[0] = 1.0;
    assert_eq!(solve_lp(&u).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn debug_dump_lists_rows_and_bounds() {
    let mut p = LpProblem::<f64>::new(2, Sense::Maximize);
    p.objective = vec![1.0, 2.0];
    p.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Le, 3.0);
    let s = p.to_debug_string();
    assert!(s.starts_with("maximize"));
    assert!(s.contains("r0: 1 x0 + 1 x1 <= 3"));
    assert!(s.ends_with("end\n"));
}

/// A bounded LP in 5 variables: `max cᵀx` over `a_i·x (≤|≥) b_i`, `0 ≤ x ≤ u`.
struct Small {
    c: [f64; 5],
    rows: Vec<([f64; 5], Relation, f64)>,
    u: [f64; 5],
}

fn random_small(rng: &mut SeedRng) -> Small {
    let mut c = [0.0; 5];
    let mut u = [0.0; 5];
    let mut x0 = [0.0; 5];
    for j in 0..5 {
        c[j] = rng.random_range(-2.0..2.0);
        u[j] = rng.random_range(0.5..3.0);
        x0[j] = rng.random_range(0.0..u[j]);
    }
    // Rows pass through near a random interior point, so the box is never empty.
    let rows = (0..4)
        .map(|_| {
            let mut a = [0.0; 5];
            for v in a.iter_mut() {
                *v = rng.random_range(-1.0..1.0);
            }
            let at: f64 = a.iter().zip(&x0).map(|(p, q)| p * q).sum();
            if rng.random::<bool>() {
                (a, Relation::Le, at + rng.random_range(0.0..0.5))
            } else {
                (a, Relation::Ge, at - rng.random_range(0.0..0.5))
            }
        })
        .collect();
    Small { c, rows, u }
}

fn solve5(a: &[[f64; 5]; 5], b: &[f64; 5]) -> Option<[f64; 5]> {
    let mut m = [[0.0; 6]; 5];
    for i in 0..5 {
        m[i][..5].copy_from_slice(&a[i]);
        m[i][5] = b[i];
    }
    for col in 0..5 {
        let piv = (col..5).max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs())).unwrap();
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..5 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for k in col..6 {
                    m[r][k] -= f * m[col][k];
                }
            }
        }
    }
    let mut x = [0.0; 5];
    for i in 0..5 {
        x[i] = m[i][5] / m[i][i];
    }
    Some(x)
}

/// Best objective over all basic feasible solutions.
fn vertex_oracle(p: &Small) -> f64 {
    // Hyperplanes: the 4 rows, then x_j = 0 and x_j = u_j.
    let mut planes: Vec<([f64; 5], f64)> = p.rows.iter().map(|(a, _, b)| (*a, *b)).collect();
    for j in 0..5 {
        let mut e = [0.0; 5];
        e[j] = 1.0;
        planes.push((e, 0.0));
        planes.push((e, p.u[j]));
    }
    let feasible = |x: &[f64; 5]| {
        (0..5).all(|j| x[j] >= -1e-9 && x[j] <= p.u[j] + 1e-9)
            && p.rows.iter().all(|(a, rel, b)| {
                let ax: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
                match rel {
                    Relation::Le => ax <= b + 1e-9,
                    Relation::Ge => ax >= b - 1e-9,
                    Relation::Eq => (ax - b).abs() <= 1e-9,
                }
            })
    };
    let m = planes.len();
    let mut best = f64::NEG_INFINITY;
    let mut idx = [0usize, 1, 2, 3, 4];
    loop {
        let a = std::array::from_fn(|i| planes[idx[i]].0);
        let b = std::array::from_fn(|i| planes[idx[i]].1);
        if let Some(x) = solve5(&a, &b) {
            if feasible(&x) {
                best = best.max(p.c.iter().zip(&x).map(|(c, v)| c * v).sum());
            }
        }
        // Next 5-subset in lexicographic order.
        let mut i = 5;
        while i > 0 && idx[i - 1] == m - 5 + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..5 {
            idx[j] = idx[j - 1] + 1;
        }
    }
    best
}

#[test]
fn random_block_instances_match_vertex_enumeration() {
    let mut rng = seeded(21);
    for _ in 0..30 {
        let blocks: Vec<Small> = (0..4).map(|_| random_small(&mut rng)).collect();
        let mut lp = LpProblem::new(20, Sense::Maximize);
        for (b, s) in blocks.iter().enumerate() {
            for j in 0..5 {
                lp.objective[5 * b + j] = s.c[j];
                lp.set_bounds(5 * b + j, 0.0, s.u[j]);
            }
            for (a, rel, rhs) in &s.rows {
                lp.add_constraint((0..5).map(|j| (5 * b + j, a[j])).collect(), *rel, *rhs);
            }
        }
        let expect: f64 = blocks.iter().map(vertex_oracle).sum();
        let sol = solve_lp(&lp).unwrap().into_optimal().unwrap();
        assert!((sol.objective - expect).abs() <= 1e-8 * expect.abs().max(1.0), "{} vs {expect}", sol.objective);
        assert!(lp.max_violation(&sol.x) <= 1e-8);
        assert!((lp.evaluate(&sol.x) - sol.objective).abs() <= 1e-9);
    }
}

#[test]
fn lp_score_equals_plain_score_on_bounded_graphs() {
    let mut rng = seeded(22);
    for trial in 0..5 {
        let g = random_graph(30, 0.1, &mut rng);
        let d = g.max_degree() as f64 + trial as f64;
        let v = random_orthonormal(30, 1 + trial % 3, &mut rng);
        let sc = LipschitzScorer::new(&g, d).unwrap();
        assert!(sc.is_bounded());
        let direct = sc.plain_score(&v);
        assert!((sc.score_lp(&v).unwrap() - direct).abs() <= 1e-6, "trial {trial}");
        assert_eq!(sc.score(&v).unwrap(), direct);
        assert_eq!(lipschitz_extension_score(&g, &v, d).unwrap(), direct);
    }
}

#[test]
fn empty_graph_scores_zero() {
    let mut rng = seeded(23);
    for q in 1..=3 {
        let v = random_orthonormal(8, q, &mut rng);
        assert_eq!(lipschitz_extension_score(&Graph::empty(8), &v, 2.0).unwrap(), 0.0);
        assert_eq!(LipschitzScorer::new(&Graph::empty(8), 2.0).unwrap().score_lp(&v).unwrap(), 0.0);
    }
}

#[test]
fn scorer_rejects_bad_input() {
    let g = Graph::path(4);
    assert!(LipschitzScorer::new(&g, 0.0).is_err());
    let not_unit = DenseMatrix::from_vec(4, 1, vec![1.0, 1.0, 0.0, 0.0]);
    assert!(lipschitz_extension_score(&g, &not_unit, 2.0).is_err());
    let wrong_rows = DenseMatrix::from_vec(3, 1, vec![1.0, 0.0, 0.0]);
    assert!(lipschitz_extension_score(&g, &wrong_rows, 2.0).is_err());
}

/// Exact LP value for the 6-node star by enumerating half-integral points.
///
/// Every column of the row-sum constraint matrix has at most two unit
/// entries and all bounds are integers, so each vertex is half-integral. Of
/// the 21 upper-triangular entries of C, the 5 hub-leaf ones have zero
/// capacity; C_00 is alone in its row; the 15 leaf entries are enumerated.
fn star_oracle(v: &[f64], d2: f64) -> f64 {
    let w = |i: usize, j: usize| 1.0 + v[i] * v[j];
    let hub = (0..=10).map(|h| h as f64 / 2.0).filter(|&c| c <= d2).map(|c| c * w(0, 0)).fold(0.0, f64::max);
    let mut vars = Vec::new();
    for i in 1..6 {
        for j in i..6 {
            vars.push((i, j));
        }
    }
    fn dfs(
        k: usize,
        vars: &[(usize, usize)],
        w: &dyn Fn(usize, usize) -> f64,
        rows: &mut [f64; 6],
        d2: f64,
        acc: f64,
        best: &mut f64,
    ) {
        if k == vars.len() {
            *best = best.max(acc);
            return;
        }
        let (i, j) = vars[k];
        for c in [0.0, 0.5, 1.0] {
            let add_j = if i == j { 0.0 } else { c };
            if rows[i] + c > d2 + 1e-12 || rows[j] + add_j > d2 + 1e-12 {
                continue;
            }
            rows[i] += c;
            if i != j {
                rows[j] += c;
            }
            let gain = if i == j { c * w(i, i) } else { 2.0 * c * w(i, j) };
            dfs(k + 1, vars, w, rows, d2, acc + gain, best);
            rows[i] -= c;
            if i != j {
                rows[j] -= c;
            }
        }
    }
    let mut best = 0.0;
    dfs(0, &vars, &w, &mut [0.0; 6], d2, 0.0, &mut best);
    hub + best
}

#[test]
fn star_score_matches_half_integral_oracle() {
    let g = Graph::star(5);
    assert_eq!(g.degree(0), 5);
    let sc = LipschitzScorer::new(&g, 2.0).unwrap();
    assert!(!sc.is_bounded());
    let mut rng = seeded(24);
    for _ in 0..4 {
        let v = random_orthonormal(6, 1, &mut rng);
        let col = v.column(0);
        let hat = sc.score(&v).unwrap();
        let oracle = star_oracle(&col, 4.0);
        assert!((hat - oracle).abs() <= 1e-8, "{hat} vs {oracle}");
        assert!(hat <= sc.plain_score(&v) + 1e-9);
    }
}

#[test]
fn cycle_to_path_rewiring_shifts_score_by_more_than_three_d_squared() {
    // C4 against the same graph with node 0 isolated, both of max degree 2.
    // The offset Tr(A²J) = Σ deg² drops from 16 to 6, and A² − A'² has top
    // eigenvalue 1+√5, so the supremum of the score gap is 11+√5 > 3·2².
    let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    let cut = c4.rewired(0, &[false; 4]);
    assert_eq!(c4.node_distance(&cut), 1);
    let diff = c4.adjacency_squared().sub(&cut.adjacency_squared());
    let eig = nodedp::linalg::sym_eigen(&diff).unwrap();
    let top = eig.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!((top - (1.0 + 5f64.sqrt())).abs() < 1e-10);
    let (j, _) = eig.values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let v = DenseMatrix::from_vec(4, 1, eig.vector(j));
    let a = lipschitz_extension_score(&c4, &v, 2.0).unwrap();
    let b = lipschitz_extension_score(&cut, &v, 2.0).unwrap();
    assert!((a - b - (11.0 + 5f64.sqrt())).abs() < 1e-9);
    assert!(a - b > 12.0);
}

#[test]
fn truncation_is_identity_on_bounded_graphs() {
    let mut rng = seeded(25);
    for _ in 0..20 {
        let g = random_graph(25, 0.1, &mut rng);
        let d = g.max_degree().max(1);
        assert_eq!(degree_truncate(&g, d).unwrap(), (g.clone(), 0.0));
    }
    assert_eq!(degree_truncate(&Graph::complete(6), 5).unwrap(), (Graph::complete(6), 0.0));
    assert_eq!(degree_truncate(&Graph::empty(7), 1).unwrap(), (Graph::empty(7), 0.0));
    assert!(degree_truncate(&Graph::path(3), 0).is_err());
}

#[test]
fn star_truncation_and_rewiring_stability() {
    let g = Graph::star(9);
    let (t, d_t) = degree_truncate(&g, 2).unwrap();
    assert!(t.degree(0) <= 4, "hub degree {}", t.degree(0));
    assert!(t.max_degree() <= 4);
    // Every single-node rewiring of K_{1,9}.
    let mut worst = 0.0f64;
    for u in 0..10 {
        for mask in 0..(1u32 << 9) {
            let mut nbrs = vec![false; 10];
            let mut bit = 0;
            for (v, slot) in nbrs.iter_mut().enumerate() {
                if v != u {
                    *slot = mask >> bit & 1 == 1;
                    bit += 1;
                }
            }
            let h = g.rewired(u, &nbrs);
            let (_, d_h) = degree_truncate(&h, 2).unwrap();
            worst = worst.max((d_t - d_h).abs());
        }
    }
    assert!(worst <= 4.0 + 1e-9, "max |Δd_T| = {worst}");
}

/// Exhaustive search over node subsets: `s` works when every differing pair
/// touches it.
fn brute_node_distance(g: &Graph, h: &Graph) -> usize {
    let n = g.n();
    (0u32..1 << n)
        .filter(|s| {
            (0..n)
                .all(|u| (u + 1..n).all(|v| g.has_edge(u, v) == h.has_edge(u, v) || s >> u & 1 == 1 || s >> v & 1 == 1))
        })
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap()
}

#[test]
fn d_t_dominates_node_distance_small_graphs() {
    let mut rng = seeded(26);
    for trial in 0..300 {
        let n = 4 + trial % 5;
        let g = random_graph(n, rng.random_range(0.2..0.9), &mut rng);
        let d = 1 + trial % 3;
        let det = degree_truncate_detail(&g, d).unwrap();
        for (u, v) in det.graph.edges() {
            assert!(g.has_edge(u, v));
        }
        let dist = g.node_distance(&det.graph);
        assert_eq!(dist, brute_node_distance(&g, &det.graph));
        assert!(det.d_t + 1e-9 >= dist as f64, "d_T {} < distance {dist}", det.d_t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn truncated_degree_at_most_twice_d(seed in any::<u64>(), n in 5usize..30, p in 0.05f64..0.9, d in 1usize..5) {
        let g = random_graph(n, p, &mut seeded(seed));
        let det = degree_truncate_detail(&g, d).unwrap();
        prop_assert!(det.graph.max_degree() <= 2 * d);
        prop_assert!(det.d_t >= 0.0);
        prop_assert!(det.x.iter().all(|&x| (-1e-9..=1.0 + 1e-9).contains(&x)));
    }
}

#[test]
fn truncation_on_sbm_sample() {
    let p = SbmParams::planted(120, 2, 0.3, 0.05).unwrap();
    let g = sample_sbm(&p, &mut seeded(27)).unwrap();
    let det = degree_truncate_detail(&g, 10).unwrap();
    assert!(det.graph.max_degree() <= 20);
    assert!(det.lp_iterations > 0);
}

#[test]
fn sensitivity_bound_examples() {
    let mut rng = seeded(28);
    let l = private_sensitivity_bound(0.0, 1.0, 1e-6, NoiseMode::Off, &mut rng).unwrap();
    assert!((l - (5.0 + 8.0 * 1e6f64.ln())).abs() < 1e-12);
    assert!((l - 115.52).abs() < 5e-3);
    assert_eq!(sensitivity_bound_value(0.0, 1.0, 0.5, -1e6), 0.5);
    assert_eq!(sensitivity_bound_value(3.0, 2.0, 0.1, 0.0), 5.0 + 6.0 + 4.0 * 10f64.ln());
    assert!(private_sensitivity_bound(0.0, 0.0, 0.1, NoiseMode::On, &mut rng).is_err());
    assert!(private_sensitivity_bound(0.0, 1.0, 1.0, NoiseMode::On, &mut rng).is_err());
}

#[test]
fn sensitivity_bound_tail() {
    // L̂ < 5 + 2d_T needs Lap(8/ε) < −8 log(1/δ)/ε, which has probability δ/2.
    let (eps, delta, d_t) = (0.7, 1e-2, 3.0);
    let draws = 10_000;
    let below = (0..draws)
        .filter(|&i| {
            let l = private_sensitivity_bound(d_t, eps, delta, NoiseMode::On, &mut derive(29, i)).unwrap();
            assert!(l >= 0.5);
            l < 5.0 + 2.0 * d_t
        })
        .count();
    let sigma = (delta * (1.0 - delta) / draws as f64).sqrt();
    let rate = below as f64 / draws as f64;
    assert!(rate <= delta + 3.0 * sigma, "rate {rate}");
}

#[test]
fn certificate_bundles_outputs() {
    let c = truncation_certificate(&Graph::star(9), 2, 1.0, 1e-3, NoiseMode::Off, &mut seeded(30)).unwrap();
    assert!(c.truncated.max_degree() <= 4);
    assert!((c.l_hat - sensitivity_bound_value(c.d_t, 1.0, 1e-3, 0.0)).abs() < 1e-12);
    assert_eq!(c.budget_used, (1.0, 1e-3));
}

#[test]
fn weighted_truncation_keeps_surviving_weights() {
    let mut rng = seeded(31);
    let mut w = WeightedGraph::empty(10);
    for v in 1..10 {
        w.set_weight(0, v, rng.random_range(0.1..5.0));
    }
    w.set_weight(3, 4, 0.25);
    let (t, d_t) = weighted_degree_truncate(&w, 2).unwrap();
    let (mask, d_mask) = degree_truncate(&w.binarize(), 2).unwrap();
    assert_eq!(d_t, d_mask);
    assert_eq!(t.binarize(), mask);
    assert!(mask.degree(0) <= 4);
    for u in 0..10 {
        for v in 0..10 {
            let expect = if mask.has_edge(u, v) { w.weight(u, v) } else { 0.0 };
            assert_eq!(t.weight(u, v), expect);
        }
    }
}

#[test]
fn weighted_truncation_trivial_cases() {
    let mut w = WeightedGraph::empty(5);
    w.set_weight(0, 1, 2.5);
    w.set_weight(1, 2, -0.5);
    assert_eq!(weighted_degree_truncate(&w, 2).unwrap(), (w.clone(), 0.0));
    let z = WeightedGraph::empty(6);
    assert_eq!(weighted_degree_truncate(&z, 1).unwrap(), (z.clone(), 0.0));
}
