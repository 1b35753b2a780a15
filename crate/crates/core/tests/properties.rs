use proptest::prelude::*;
use rand::Rng;

use idlearn::admg::{Admg, Assignment, ConfigIter, Symbol, VarSet};
use idlearn::generate;
use idlearn::identify::{identify, Identification};
use idlearn::learn::{learn, DistHandle, LearnConfig, LearnedInterventional};
use idlearn::oracle::random::{floored_dirichlet_row, random_admg, random_net, AdmgShape, CptShape};
use idlearn::oracle::CausalBayesNet;
use idlearn::rng::seeded;
use idlearn::table::PmfTable;
use idlearn::verify::{exact_kl, exact_tv, pinsker_bound};

/// A random graph with a random intervention and values, all from `seed`.
fn scenario(seed: u64, n: usize, card: usize) -> (Admg, CausalBayesNet, Assignment) {
    let mut rng = seeded(seed);
    let g = random_admg(
        &AdmgShape {
            n,
            cardinality: card,
            bidirected_prob: 0.4,
            ..AdmgShape::default()
        },
        &mut rng,
    );
    let net = random_net(&g, &CptShape::default(), &mut rng);
    let xb = rng.random_range(0..(1u64 << n) - 1);
    let x = Assignment::from_pairs(
        VarSet::from_bits(xb)
            .iter()
            .map(|v| (v, rng.random_range(0..g.cardinality(v)) as Symbol)),
    );
    (g, net, x)
}

fn exact_learned(g: &Admg, net: &CausalBayesNet, x: &Assignment) -> Option<LearnedInterventional> {
    let joint = net.exact_observational().unwrap();
    learn(DistHandle::Table { table: &joint, eta: 0.0 }, g, x, &LearnConfig::default()).ok()
}

fn oracle_tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identified_estimands_match_the_oracle(seed in any::<u64>(), n in 2usize..6, card in 2usize..4) {
        let (g, net, x) = scenario(seed, n, card);
        let targets = g.vars().difference(x.domain());
        let id = identify(&g, x.domain(), targets).unwrap();
        if let Identification::Identified { estimand, .. } = id {
            prop_assert_eq!(estimand.expr.scope(), targets);
            let obs = net.exact_observational().unwrap();
            let got = estimand.full_table(&obs, &x).unwrap().table;
            let truth = net.exact_interventional(&x).unwrap();
            prop_assert!(got.max_abs_diff(&truth).unwrap() < 1e-9);
        }
    }

    #[test]
    fn exact_learning_reproduces_the_oracle(seed in any::<u64>(), n in 2usize..6) {
        let (g, net, x) = scenario(seed, n, 2);
        if let Some(li) = exact_learned(&g, &net, &x) {
            let got = li.full_table().unwrap();
            let truth = net.exact_interventional(&x).unwrap();
            prop_assert!((got.total() - 1.0).abs() < 1e-9);
            prop_assert!(oracle_tv(got.probs(), truth.probs()) < 1e-9);
        }
    }

    #[test]
    fn sample_learned_models_are_normalized(seed in any::<u64>(), n in 2usize..6, m in 1usize..500) {
        let (g, net, x) = scenario(seed, n, 2);
        let samples = net.sample_observational(seed, m);
        if let Ok(li) = learn(DistHandle::Samples(&samples), &g, &x, &LearnConfig::default()) {
            let list = li.targets().to_vec();
            let total: f64 = ConfigIter::new(&list, g.cardinalities())
                .map(|cfg| li.evaluate_point(&Assignment::from_pairs(list.iter().copied().zip(cfg))).unwrap())
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn model_json_round_trips(seed in any::<u64>(), n in 2usize..6) {
        let (g, net, x) = scenario(seed, n, 2);
        let samples = net.sample_observational(seed, 300);
        if let Ok(li) = learn(DistHandle::Samples(&samples), &g, &x, &LearnConfig::default()) {
            let text = li.to_json();
            let back = LearnedInterventional::from_json(&text).unwrap();
            prop_assert_eq!(back.to_json(), text);
            let (a, b) = (back.full_table().unwrap(), li.full_table().unwrap());
            prop_assert_eq!(a.probs(), b.probs());
        }
    }

    #[test]
    fn graph_json_round_trips(seed in any::<u64>(), n in 1usize..8) {
        let (g, _, _) = scenario(seed, n.max(2), 2);
        prop_assert_eq!(Admg::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn marginal_sampling_projects_full_sampling(seed in any::<u64>(), n in 2usize..6, bits in any::<u64>()) {
        let (g, net, x) = scenario(seed, n, 2);
        if let Some(li) = exact_learned(&g, &net, &x) {
            let t = VarSet::from_bits(bits & li.targets().bits());
            let full = generate::sample(&li, seed, 64);
            let part = generate::sample_marginal(&li, t, seed, 64);
            let cols: Vec<usize> = li.targets().iter().enumerate().filter(|(_, v)| t.contains(*v)).map(|(i, _)| i).collect();
            for i in 0..64 {
                let want: Vec<Symbol> = cols.iter().map(|&c| full.row(i)[c]).collect();
                prop_assert_eq!(part.row(i), &want[..]);
            }
        }
    }

    #[test]
    fn distances_behave(seed in any::<u64>(), k in 1usize..5) {
        let mut rng = seeded(seed);
        let cards = vec![2; k];
        let vars = VarSet::full(k);
        let p = floored_dirichlet_row(1 << k, 0.01, &mut rng);
        let q = floored_dirichlet_row(1 << k, 0.01, &mut rng);
        let (pt, qt) = (PmfTable::new(vars, &cards, p.clone()).unwrap(), PmfTable::new(vars, &cards, q.clone()).unwrap());
        let tv = exact_tv(&pt, &qt).unwrap();
        prop_assert!((tv - oracle_tv(&p, &q)).abs() < 1e-12);
        prop_assert!((tv - exact_tv(&qt, &pt).unwrap()).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&tv));
        let kl = exact_kl(&pt, &qt).unwrap();
        prop_assert!(kl >= 0.0);
        prop_assert!(tv <= pinsker_bound(kl) + 1e-12);
        prop_assert!(exact_tv(&pt, &pt).unwrap() == 0.0);
    }
}
