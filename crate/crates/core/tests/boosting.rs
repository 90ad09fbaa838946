use nodedp::accounting::{BudgetKind, PrivacyBudget, Scope};
use nodedp::boosting::*;
use nodedp::estimators::{Diagnostics, EstimatorOutput};
use nodedp::metrics::{loss_overall, loss_worst_case};
use nodedp::rng::{derive, seeded};
use nodedp::{Error, Graph, LabelAssignment, SeedRng};
use rand::Rng;

fn wrap(labels: LabelAssignment) -> EstimatorOutput {
    EstimatorOutput { labels, budget: None, diagnostics: Diagnostics::default() }
}

/// Truth with each label redrawn uniformly with probability `rate`, under a
/// random global relabeling.
fn corrupted(truth: &LabelAssignment, rate: f64, rng: &mut SeedRng) -> LabelAssignment {
    let k = truth.k();
    let shift = rng.random_range(0..k);
    let labels = truth
        .labels()
        .iter()
        .map(|&l| {
            let l = if rng.random::<f64>() < rate { rng.random_range(0..k) } else { l };
            (l + shift) % k
        })
        .collect();
    LabelAssignment::new(labels, k).unwrap()
}

#[test]
fn config_validation() {
    assert!(BoostConfig { t: 3, xi: 0.05, k: 2 }.validate().is_ok());
    assert!(BoostConfig { t: 4, xi: 0.05, k: 2 }.validate().is_err());
    assert!(BoostConfig { t: 0, xi: 0.05, k: 2 }.validate().is_err());
    assert!(BoostConfig { t: 3, xi: 1.0 / 16.0, k: 2 }.validate().is_err());
    assert!(BoostConfig { t: 3, xi: 0.0, k: 2 }.validate().is_err());
}

#[test]
fn single_copy_returns_the_base_output() {
    let truth = LabelAssignment::balanced(50, 2).unwrap();
    let base = |g: &Graph, rng: &mut SeedRng| Ok(wrap(corrupted(&LabelAssignment::balanced(g.n(), 2)?, 0.3, rng)));
    let cfg = BoostConfig { t: 1, xi: 0.05, k: 2 };
    let g = Graph::complete(50);
    for s in 0..10 {
        let out = graph_boost(&g, &cfg, &base, &mut derive(1, s)).unwrap();
        // Replay the generator split to get the base's own output.
        let mut rng = derive(1, s);
        let _ = nodedp::graph::thin_graph(&g, 1, 1, &mut rng).unwrap();
        let mut child = nodedp::rng::split(&mut rng);
        let direct = corrupted(&truth, 0.3, &mut child);
        assert_eq!(out.labels, direct);
    }
}

#[test]
fn identical_estimates_are_returned() {
    let truth = LabelAssignment::balanced(30, 3).unwrap();
    let est = corrupted(&truth, 0.2, &mut seeded(2));
    let cfg = BoostConfig { t: 5, xi: 0.01, k: 3 };
    let comb = combine_estimates(&vec![est.clone(); 5], &cfg, &mut seeded(3)).unwrap();
    assert_eq!(comb.labels, est);
    assert_eq!(comb.candidates, vec![0, 1, 2, 3, 4]);
    assert_eq!(comb.tied_rows, 0);
}

#[test]
fn relabeled_copies_are_aligned_before_voting() {
    let truth = LabelAssignment::balanced(40, 2).unwrap();
    let flipped = truth.relabeled(&[1, 0]);
    let ests = vec![truth.clone(), flipped.clone(), truth.clone(), flipped, truth.clone()];
    let comb = combine_estimates(&ests, &BoostConfig { t: 5, xi: 0.01, k: 2 }, &mut seeded(4)).unwrap();
    assert_eq!(loss_overall(&comb.labels, &truth).unwrap(), 0.0);
}

#[test]
fn no_witness_is_a_typed_failure() {
    let mut rng = seeded(5);
    let n = 60;
    let ests: Vec<LabelAssignment> =
        (0..3).map(|_| LabelAssignment::new((0..n).map(|_| rng.random_range(0..2)).collect(), 2).unwrap()).collect();
    let r = combine_estimates(&ests, &BoostConfig { t: 3, xi: 0.01, k: 2 }, &mut rng);
    assert!(matches!(r, Err(Error::NoMajority)));
}

#[test]
fn vote_ties_follow_the_witness() {
    // k=3, T=3: the three estimates disagree everywhere on node 0.
    let a = LabelAssignment::balanced(60, 3).unwrap();
    let mut b = a.labels().to_vec();
    b[0] = 1;
    let mut c = a.labels().to_vec();
    c[0] = 2;
    let ests = vec![a.clone(), LabelAssignment::new(b, 3).unwrap(), LabelAssignment::new(c, 3).unwrap()];
    let cfg = BoostConfig { t: 3, xi: 0.04, k: 3 };
    for s in 0..10 {
        let comb = combine_estimates(&ests, &cfg, &mut derive(6, s)).unwrap();
        assert_eq!(comb.tied_rows, 1);
        assert_eq!(comb.labels.labels()[0], ests[comb.witness].labels()[0]);
        assert_eq!(&comb.labels.labels()[1..], &a.labels()[1..]);
    }
}

#[test]
fn corrupted_simulator_meets_the_bound_and_rarely_fails() {
    // T=11, k=2, n=200, ξ=0.06; 5% of labels redrawn per run.
    let truth = LabelAssignment::balanced(200, 2).unwrap();
    let cfg = BoostConfig { t: 11, xi: 0.06, k: 2 };
    let base = |g: &Graph, rng: &mut SeedRng| Ok(wrap(corrupted(&LabelAssignment::balanced(g.n(), 2)?, 0.05, rng)));
    let g = Graph::empty(200);
    let mut failures = 0;
    for s in 0..200 {
        match graph_boost(&g, &cfg, &base, &mut derive(7, s)) {
            Ok(out) => {
                let l = loss_overall(&out.labels, &truth).unwrap();
                assert!(l <= cfg.xi * cfg.t as f64, "trial {s}: loss {l}");
            }
            Err(Error::NoMajority) => failures += 1,
            Err(e) => panic!("{e}"),
        }
    }
    assert!(failures <= 10, "{failures}/200 failures");
}

#[test]
fn per_trial_bound_when_a_majority_is_good() {
    let truth = LabelAssignment::balanced(200, 2).unwrap();
    let cfg = BoostConfig { t: 11, xi: 0.06, k: 2 };
    let mut qualifying = 0;
    for s in 0..200 {
        let mut rng = derive(8, s);
        let ests: Vec<LabelAssignment> = (0..11).map(|_| corrupted(&truth, 0.05, &mut rng)).collect();
        let good = ests.iter().filter(|e| loss_worst_case(e, &truth).unwrap() <= cfg.xi).count();
        if good < 6 {
            continue;
        }
        qualifying += 1;
        let comb = combine_estimates(&ests, &cfg, &mut rng).expect("a good majority always has a witness");
        let l = loss_worst_case(&comb.labels, &truth).unwrap();
        assert!(l <= cfg.xi * 11.0, "trial {s}: {l}");
    }
    assert!(qualifying >= 50, "only {qualifying} qualifying trials");
}

#[test]
fn budget_scales_with_t() {
    let b = PrivacyBudget::approx(0.2, 1e-6, Scope::Node, "base").unwrap();
    let t = boost_budget(&b, 7);
    let (e, d) = t.eps_delta().unwrap();
    assert!((e - 1.4).abs() < 1e-12 && (d - 7e-6).abs() < 1e-18);
    assert_eq!(t.chain.last().unwrap().rule, "boosting_composition");
    let p = PrivacyBudget::pure(0.5, Scope::Node, "base").unwrap();
    assert_eq!(boost_budget(&p, 3).kind, BudgetKind::Pure { eps: 1.5 });
}

#[test]
fn hgr_examples() {
    assert_eq!(hgr_thinned_bernoulli(0.4, 1.0).unwrap(), 0.0);
    assert_eq!(hgr_thinned_bernoulli(0.0, 0.3).unwrap(), 0.0);
    assert!((hgr_thinned_bernoulli(0.5, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert!(hgr_thinned_bernoulli(1.0, 1.0).is_err());
    assert!(hgr_thinned_bernoulli(1.2, 0.5).is_err());
}

#[test]
fn hgr_matches_empirical_correlation() {
    let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
    let samples = 100_000;
    let mut rng = seeded(9);
    for &p in &grid {
        for &q in &grid {
            let (mut s1, mut s2, mut s12) = (0.0, 0.0, 0.0);
            for _ in 0..samples {
                let z = (rng.random::<f64>() < q) as u8 as f64;
                let x = z * (rng.random::<f64>() < p) as u8 as f64;
                let y = z * (rng.random::<f64>() < p) as u8 as f64;
                s1 += x;
                s2 += y;
                s12 += x * y;
            }
            let nf = samples as f64;
            let (m1, m2) = (s1 / nf, s2 / nf);
            // Bernoulli: E[X²] = E[X].
            let corr = (s12 / nf - m1 * m2) / ((m1 - m1 * m1) * (m2 - m2 * m2)).sqrt();
            let expect = hgr_thinned_bernoulli(p, q).unwrap();
            assert!((corr - expect).abs() <= 0.02, "p={p} q={q}: {corr} vs {expect}");
        }
    }
}
