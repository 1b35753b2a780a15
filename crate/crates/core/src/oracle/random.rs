//! Random ADMGs and random standard-form nets realizing them.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::Exp1;

use super::{CausalBayesNet, Node};
use crate::admg::{Admg, VarId, VarSet};

/// Shape limits for [`random_admg`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmgShape {
    pub n: usize,
    /// largest number of directed parents of any variable
    pub max_in_degree: usize,
    /// largest c-component
    pub max_component: usize,
    /// chance of proposing each bidirected pair
    pub bidirected_prob: f64,
    pub cardinality: usize,
}

impl Default for AdmgShape {
    fn default() -> Self {
        AdmgShape {
            n: 6,
            max_in_degree: 3,
            max_component: 3,
            bidirected_prob: 0.3,
            cardinality: 2,
        }
    }
}

/// Parameters of the CPTs drawn by [`random_net`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptShape {
    /// entrywise floor applied before renormalizing each row
    pub gamma: f64,
    pub hidden_cardinality: usize,
}

impl Default for CptShape {
    fn default() -> Self {
        CptShape {
            gamma: 0.1,
            hidden_cardinality: 2,
        }
    }
}

/// Draws an ADMG within `shape`. Variables are named `V0..`, and the causal
/// order is a random permutation of the indices so index order carries no
/// information.
pub fn random_admg<R: Rng + ?Sized>(shape: &AdmgShape, rng: &mut R) -> Admg {
    let n = shape.n;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut directed = Vec::new();
    for (pos, &child) in order.iter().enumerate() {
        let k = rng.random_range(0..=shape.max_in_degree.min(pos));
        let mut earlier = order[..pos].to_vec();
        earlier.shuffle(rng);
        directed.extend(earlier[..k].iter().map(|&p| (p, child)));
    }

    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    pairs.shuffle(rng);
    let mut comp: Vec<usize> = (0..n).collect();
    let mut bidirected = Vec::new();
    for (a, b) in pairs {
        if !rng.random_bool(shape.bidirected_prob) {
            continue;
        }
        let (ca, cb) = (comp[a], comp[b]);
        let size = |c: usize| comp.iter().filter(|&&x| x == c).count();
        if ca != cb && size(ca) + size(cb) > shape.max_component {
            continue;
        }
        if ca == cb && shape.max_component < 2 {
            continue;
        }
        for c in comp.iter_mut().filter(|c| **c == cb) {
            *c = ca;
        }
        bidirected.push((a, b));
    }

    let vars = (0..n).map(|i| (format!("V{i}"), shape.cardinality)).collect();
    Admg::new(vars, &directed, &bidirected).expect("generated graph is acyclic by construction")
}

/// One CPT row: a symmetric Dirichlet(1) draw, floored at `gamma` and
/// renormalized.
pub fn floored_dirichlet_row<R: Rng + ?Sized>(card: usize, gamma: f64, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..card).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    let floored: Vec<f64> = draws.iter().map(|d| (d / total).max(gamma)).collect();
    let total: f64 = floored.iter().sum();
    floored.iter().map(|p| p / total).collect()
}

/// A standard-form net whose projection is `g`: the observables keep `g`'s
/// indices and directed parents, and each bidirected edge `a↔b` becomes a
/// parentless hidden `U_a_b` with children `a` and `b`.
pub fn random_net<R: Rng + ?Sized>(g: &Admg, shape: &CptShape, rng: &mut R) -> CausalBayesNet {
    let n = g.num_vars();
    let hidden = g.bidirected_edges();
    let mut parents: Vec<Vec<usize>> = (0..n).map(|v| g.parents(VarId(v)).iter().map(|p| p.0).collect()).collect();
    for (h, (a, b)) in hidden.iter().enumerate() {
        parents[a.0].push(n + h);
        parents[b.0].push(n + h);
    }

    let mut card_of = g.cardinalities().to_vec();
    card_of.extend(std::iter::repeat_n(shape.hidden_cardinality, hidden.len()));

    let mut nodes = Vec::with_capacity(n + hidden.len());
    for (v, ps) in parents.into_iter().enumerate() {
        let rows: usize = ps.iter().map(|&p| card_of[p]).product();
        let cpt = (0..rows)
            .flat_map(|_| floored_dirichlet_row(card_of[v], shape.gamma, rng))
            .collect();
        nodes.push(Node {
            name: g.name(VarId(v)).to_string(),
            cardinality: card_of[v],
            hidden: false,
            parents: ps,
            cpt,
        });
    }
    for (a, b) in &hidden {
        nodes.push(Node {
            name: format!("U_{}_{}", g.name(*a), g.name(*b)),
            cardinality: shape.hidden_cardinality,
            hidden: true,
            parents: Vec::new(),
            cpt: floored_dirichlet_row(shape.hidden_cardinality, shape.gamma, rng),
        });
    }
    CausalBayesNet::new(nodes).expect("generated net is valid by construction")
}

/// Largest c-component size of `g`.
pub fn max_component_size(g: &Admg) -> usize {
    g.c_components().iter().map(|c| c.len()).max().unwrap_or(0)
}

/// Every variable set `s` with `s ⊆ mask`, in increasing bit order.
pub fn subsets(mask: VarSet) -> impl Iterator<Item = VarSet> {
    let bits = mask.bits();
    let mut cur = Some(0u64);
    std::iter::from_fn(move || {
        let out = cur?;
        cur = if out == bits { None } else { Some((out.wrapping_sub(bits)) & bits) };
        Some(VarSet::from_bits(out))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::front_door;
    use crate::rng::seeded;

    #[test]
    fn random_admgs_respect_shape() {
        let mut rng = seeded(5);
        for n in 1..=8 {
            let shape = AdmgShape {
                n,
                bidirected_prob: 0.6,
                ..AdmgShape::default()
            };
            for _ in 0..50 {
                let g = random_admg(&shape, &mut rng);
                assert_eq!(g.num_vars(), n);
                assert!(g.max_in_degree() <= 3);
                assert!(max_component_size(&g) <= 3);
            }
        }
    }

    #[test]
    fn rows_are_floored_distributions() {
        let mut rng = seeded(9);
        for card in 1..5 {
            for _ in 0..100 {
                let row = floored_dirichlet_row(card, 0.1, &mut rng);
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                // the floor survives renormalization up to the factor 1 + card·γ
                assert!(row.iter().all(|&p| p >= 0.1 / (1.0 + card as f64 * 0.1)));
            }
        }
    }

    #[test]
    fn projection_of_realization_is_identity() {
        let mut rng = seeded(1);
        let g = front_door();
        let net = random_net(&g, &CptShape::default(), &mut rng);
        assert_eq!(net.latent_project().unwrap(), g);
        for _ in 0..20 {
            let g = random_admg(&AdmgShape::default(), &mut rng);
            assert_eq!(random_net(&g, &CptShape::default(), &mut rng).latent_project().unwrap(), g);
        }
    }

    #[test]
    fn subset_enumeration() {
        let m = VarSet::from_bits(0b1010);
        let all: Vec<u64> = subsets(m).map(|s| s.bits()).collect();
        assert_eq!(all, vec![0, 0b10, 0b1000, 0b1010]);
        assert_eq!(subsets(VarSet::EMPTY).count(), 1);
    }
}
