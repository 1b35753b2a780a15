//! Ancestral sampling from a learned interventional distribution.

use rand::Rng;

use crate::admg::{Symbol, VarSet};
use crate::learn::LearnedInterventional;
use crate::rng::seeded;
use crate::samples::SampleSet;

/// `m` i.i.d. draws over `V ∖ X`; columns are the targets in ascending
/// order. One uniform per variable, walked in the learned order.
pub fn sample(li: &LearnedInterventional, seed: u64, m: usize) -> SampleSet {
    sample_marginal(li, li.targets(), seed, m)
}

/// Draws of the full target vector projected to `t ⊆ V ∖ X`. The stream is
/// the one [`sample`] uses, so the columns agree with its output.
pub fn sample_marginal(li: &LearnedInterventional, t: VarSet, seed: u64, m: usize) -> SampleSet {
    assert!(t.is_subset(li.targets()), "sampled variables must be targets");
    let keep = t.to_vec();
    let mut rng = seeded(seed);
    let mut buf = li.buffer();
    let mut out = SampleSet::new(keep.len());
    let mut row: Vec<Symbol> = vec![0; keep.len()];
    for _ in 0..m {
        for f in li.factors() {
            let u: f64 = rng.random();
            buf[f.table.target().0] = f.table.draw(&buf, u);
        }
        for (r, v) in row.iter_mut().zip(&keep) {
            *r = buf[v.0];
        }
        out.push(&row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admg::{Assignment, VarId};
    use crate::fixtures::{front_door, confounded_chain};
    use crate::learn::{learn, DistHandle, LearnConfig};
    use crate::oracle::random::{random_net, CptShape};
    use crate::oracle::{CausalBayesNet, Node};

    fn exact_learned(net: &CausalBayesNet, x: &Assignment) -> LearnedInterventional {
        let g = net.latent_project().unwrap();
        let joint = net.exact_observational().unwrap();
        learn(DistHandle::Table { table: &joint, eta: 0.0 }, &g, x, &LearnConfig::default()).unwrap()
    }

    #[test]
    fn deterministic_model_gives_constant_samples() {
        let node = |name: &str, parents: &[usize], cpt: &[f64]| Node {
            name: name.into(),
            cardinality: 2,
            hidden: false,
            parents: parents.to_vec(),
            cpt: cpt.to_vec(),
        };
        let net = CausalBayesNet::new(vec![node("A", &[], &[0.0, 1.0]), node("B", &[0], &[1.0, 0.0, 0.0, 1.0])]).unwrap();
        let li = exact_learned(&net, &Assignment::empty());
        let s = sample(&li, 1, 100);
        assert!(s.rows().all(|r| r == [1, 1]));
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let g = front_door();
        let net = random_net(&g, &CptShape::default(), &mut seeded(1));
        let li = exact_learned(&net, &Assignment::from_pairs([(VarId(0), 1)]));
        assert_eq!(sample(&li, 5, 1000), sample(&li, 5, 1000));
        assert_ne!(sample(&li, 5, 1000), sample(&li, 6, 1000));
    }

    #[test]
    fn samples_match_the_evaluator() {
        let g = front_door();
        let net = random_net(&g, &CptShape::default(), &mut seeded(2));
        let li = exact_learned(&net, &Assignment::from_pairs([(VarId(0), 0)]));
        let m = 200_000;
        let s = sample(&li, 3, m);
        let table = li.full_table().unwrap();
        let targets = li.targets().to_vec();
        let counts = s.counts(VarSet::full(targets.len()), &[2, 2, 2]).unwrap();
        for (i, p) in table.probs().iter().enumerate() {
            let f = counts[i] as f64 / m as f64;
            assert!((f - p).abs() <= 5.0 * (p * (1.0 - p) / m as f64).sqrt() + 1e-12, "cell {i}: {f} vs {p}");
        }
    }

    #[test]
    fn marginals_project_the_full_stream() {
        let g = confounded_chain();
        let net = random_net(&g, &CptShape::default(), &mut seeded(4));
        let x = Assignment::from_pairs([(VarId(0), 0), (VarId(1), 1), (VarId(2), 1)]);
        let li = exact_learned(&net, &x);
        let y = g.var_set(&["Y"]).unwrap();
        assert_eq!(sample_marginal(&li, y, 7, 50), sample(&li, 7, 50));
        let empty = sample_marginal(&li, VarSet::EMPTY, 7, 3);
        assert_eq!(empty.len(), 3);
        assert_eq!(empty.n_vars(), 0);
    }
}
