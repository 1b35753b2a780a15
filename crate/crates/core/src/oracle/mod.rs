//! Ground-truth causal Bayes nets with explicit hidden variables.
//!
//! A [`CausalBayesNet`] is the reference every other module is checked
//! against: it draws observational samples, computes observational and
//! interventional distributions exactly by full enumeration, and projects
//! itself onto the ADMG of its observables.

mod json;
pub mod random;

pub use json::{CbnDoc, NodeDoc};

use rand::Rng;
use thiserror::Error;

use crate::admg::{Admg, AdmgError, Assignment, Symbol, VarId, VarSet};
use crate::rng::{cumulative, draw_from_cdf, seeded};
use crate::samples::SampleSet;
use crate::table::{pairwise_sum, PmfTable, TableError, STATE_CEILING};

const ROW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("node `{node}` lists unknown parent `{parent}`")]
    UnknownParent { node: String, parent: String },
    #[error("duplicate node name `{0}`")]
    DuplicateName(String),
    #[error("node `{node}`: {reason}")]
    BadCpt { node: String, reason: String },
    #[error("node `{0}` has cardinality 0")]
    ZeroCardinality(String),
    #[error("the network's parent relation has a cycle through `{0}`")]
    Cycle(String),
    #[error("joint state space of {0} states exceeds the ceiling of {STATE_CEILING}")]
    StateSpaceTooLarge(u128),
    #[error("hidden variable `{0}` is not in standard form (no parents, exactly two observable children)")]
    NonStandardForm(String),
    #[error("assignment is not valid for the observables: {0}")]
    InvalidAssignment(String),
    #[error("malformed network document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Graph(#[from] AdmgError),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// One node of the net: `cpt` holds one row of `cardinality` probabilities per
/// parent configuration, rows ordered with the first listed parent most
/// significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub name: String,
    pub cardinality: usize,
    pub hidden: bool,
    pub parents: Vec<usize>,
    pub cpt: Vec<f64>,
}

impl Node {
    pub fn rows(&self) -> usize {
        self.cpt.len() / self.cardinality.max(1)
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.cpt[r * self.cardinality..(r + 1) * self.cardinality]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalBayesNet {
    nodes: Vec<Node>,
    topo: Vec<usize>,
    /// node index of each observable, in declaration order
    observables: Vec<usize>,
    /// observable index of each node
    obs_of_node: Vec<Option<usize>>,
    obs_cards: Vec<usize>,
    obs_names: Vec<String>,
}

impl CausalBayesNet {
    /// Validates and builds a net. Observables are numbered in declaration
    /// order; that numbering is the `VarId` of every table and sample.
    pub fn new(nodes: Vec<Node>) -> Result<Self, OracleError> {
        let n = nodes.len();
        for (i, node) in nodes.iter().enumerate() {
            if nodes[..i].iter().any(|o| o.name == node.name) {
                return Err(OracleError::DuplicateName(node.name.clone()));
            }
            if node.cardinality == 0 {
                return Err(OracleError::ZeroCardinality(node.name.clone()));
            }
            if let Some(&p) = node.parents.iter().find(|&&p| p >= n || p == i) {
                return Err(OracleError::UnknownParent {
                    node: node.name.clone(),
                    parent: format!("#{p}"),
                });
            }
            let rows: usize = node.parents.iter().map(|&p| nodes[p].cardinality).product();
            if node.cpt.len() != rows * node.cardinality {
                return Err(OracleError::BadCpt {
                    node: node.name.clone(),
                    reason: format!("expected {rows} rows of {} entries", node.cardinality),
                });
            }
            for r in 0..rows {
                let row = node.row(r);
                if row.iter().any(|p| p.is_nan() || *p < 0.0 || !p.is_finite()) {
                    return Err(OracleError::BadCpt {
                        node: node.name.clone(),
                        reason: format!("row {r} has a negative or non-finite entry"),
                    });
                }
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > ROW_TOLERANCE {
                    return Err(OracleError::BadCpt {
                        node: node.name.clone(),
                        reason: format!("row {r} sums to {s}"),
                    });
                }
            }
        }

        // Kahn's algorithm, smallest index first.
        let mut indeg: Vec<usize> = nodes.iter().map(|nd| nd.parents.len()).collect();
        let mut children = vec![Vec::new(); n];
        for (i, nd) in nodes.iter().enumerate() {
            for &p in &nd.parents {
                children[p].push(i);
            }
        }
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(&v) = ready.iter().next() {
            ready.remove(&v);
            topo.push(v);
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap_or(0);
            return Err(OracleError::Cycle(nodes[stuck].name.clone()));
        }

        let observables: Vec<usize> = (0..n).filter(|&i| !nodes[i].hidden).collect();
        if observables.len() > crate::admg::MAX_VARS {
            return Err(AdmgError::TooManyVariables(observables.len()).into());
        }
        let mut obs_of_node = vec![None; n];
        for (k, &i) in observables.iter().enumerate() {
            obs_of_node[i] = Some(k);
        }
        let obs_cards = observables.iter().map(|&i| nodes[i].cardinality).collect();
        let obs_names = observables.iter().map(|&i| nodes[i].name.clone()).collect();
        Ok(CausalBayesNet {
            nodes,
            topo,
            observables,
            obs_of_node,
            obs_cards,
            obs_names,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn num_observables(&self) -> usize {
        self.observables.len()
    }

    /// Node index of each observable `VarId`.
    pub fn observable_nodes(&self) -> &[usize] {
        &self.observables
    }

    pub fn observable_cards(&self) -> &[usize] {
        &self.obs_cards
    }

    pub fn observable_names(&self) -> &[String] {
        &self.obs_names
    }

    pub fn observable_of_node(&self, node: usize) -> Option<VarId> {
        self.obs_of_node[node].map(VarId)
    }

    pub fn hidden_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].hidden)
    }

    /// Observable parents of an observable, as a set of `VarId`s.
    pub fn observable_parents(&self, v: VarId) -> VarSet {
        self.nodes[self.observables[v.0]]
            .parents
            .iter()
            .filter_map(|&p| self.obs_of_node[p].map(VarId))
            .collect()
    }

    #[inline]
    fn row_index(&self, node: usize, state: &[Symbol]) -> usize {
        let nd = &self.nodes[node];
        let mut r = 0;
        for &p in &nd.parents {
            r = r * self.nodes[p].cardinality + state[p] as usize;
        }
        r
    }

    /// Draws `m` i.i.d. observational samples. Deterministic in `seed`.
    pub fn sample_observational(&self, seed: u64, m: usize) -> SampleSet {
        let mut rng = seeded(seed);
        let cdfs: Vec<Vec<Vec<f64>>> = self
            .nodes
            .iter()
            .map(|nd| (0..nd.rows()).map(|r| cumulative(nd.row(r))).collect())
            .collect();
        let mut state = vec![0 as Symbol; self.nodes.len()];
        let mut row = vec![0 as Symbol; self.observables.len()];
        let mut out = SampleSet::new(self.observables.len());
        for _ in 0..m {
            for &i in &self.topo {
                let r = self.row_index(i, &state);
                let u: f64 = rng.random();
                state[i] = draw_from_cdf(&cdfs[i][r], u) as Symbol;
            }
            for (k, &i) in self.observables.iter().enumerate() {
                row[k] = state[i];
            }
            out.push(&row);
        }
        out
    }

    /// Exact joint distribution of the observables.
    pub fn exact_observational(&self) -> Result<PmfTable, OracleError> {
        self.exact_interventional(&Assignment::empty())
    }

    /// Exact `P_x(V∖X)` by the truncated factorization: the mechanisms of the
    /// intervened observables are deleted, their values clamped to `x`, and
    /// the hidden variables summed out.
    pub fn exact_interventional(&self, x: &Assignment) -> Result<PmfTable, OracleError> {
        let n_obs = self.observables.len();
        if !x.domain().is_subset(VarSet::full(n_obs)) || !x.is_valid_for(&self.obs_cards) {
            return Err(OracleError::InvalidAssignment(format!("{x:?}")));
        }
        let total: u128 = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.obs_of_node[*i].is_none_or(|k| !x.domain().contains(VarId(k))))
            .map(|(_, nd)| nd.cardinality as u128)
            .product();
        if total > STATE_CEILING as u128 {
            return Err(OracleError::StateSpaceTooLarge(total));
        }

        let out_scope = VarSet::full(n_obs).difference(x.domain());
        let out_vars = out_scope.to_vec();
        let hidden: Vec<usize> = self.hidden_nodes().collect();
        let free_factors: Vec<usize> = self
            .topo
            .iter()
            .copied()
            .filter(|&i| self.obs_of_node[i].is_none_or(|k| !x.domain().contains(VarId(k))))
            .collect();

        let mut state = vec![0 as Symbol; self.nodes.len()];
        for (v, s) in x.iter() {
            state[self.observables[v.0]] = s;
        }
        let n_hidden: usize = hidden.iter().map(|&h| self.nodes[h].cardinality).product();
        let mut terms = vec![0.0; n_hidden];
        let mut table = PmfTable::zeros(out_scope, &self.obs_cards)?;
        let out_cards: Vec<usize> = out_vars.iter().map(|v| self.obs_cards[v.0]).collect();

        for cell in 0..table.len() {
            let mut rem = cell;
            for (k, v) in out_vars.iter().enumerate().rev() {
                state[self.observables[v.0]] = (rem % out_cards[k]) as Symbol;
                rem /= out_cards[k];
            }
            for (h_idx, term) in terms.iter_mut().enumerate() {
                let mut rem = h_idx;
                for &h in hidden.iter().rev() {
                    let c = self.nodes[h].cardinality;
                    state[h] = (rem % c) as Symbol;
                    rem /= c;
                }
                let mut p = 1.0;
                for &i in &free_factors {
                    let r = self.row_index(i, &state);
                    p *= self.nodes[i].cpt[r * self.nodes[i].cardinality + state[i] as usize];
                    if p == 0.0 {
                        break;
                    }
                }
                *term = p;
            }
            table.probs_mut()[cell] = pairwise_sum(&terms);
        }
        Ok(table.with_context(x.clone()))
    }

    /// The ADMG over the observables: observable→observable edges are kept
    /// and each hidden variable becomes one bidirected edge between its two
    /// children.
    pub fn latent_project(&self) -> Result<Admg, OracleError> {
        let mut directed = Vec::new();
        let mut bidirected = Vec::new();
        for (i, nd) in self.nodes.iter().enumerate() {
            if nd.hidden {
                let children: Vec<usize> = (0..self.nodes.len())
                    .filter(|&c| self.nodes[c].parents.contains(&i))
                    .collect();
                let standard = nd.parents.is_empty()
                    && children.len() == 2
                    && children.iter().all(|&c| !self.nodes[c].hidden);
                if !standard {
                    return Err(OracleError::NonStandardForm(nd.name.clone()));
                }
                let (a, b) = (
                    self.obs_of_node[children[0]].unwrap(),
                    self.obs_of_node[children[1]].unwrap(),
                );
                let pair = (a.min(b), a.max(b));
                if bidirected.contains(&pair) {
                    // two hiddens over the same pair project onto one edge
                    continue;
                }
                bidirected.push(pair);
            } else {
                let c = self.obs_of_node[i].unwrap();
                for &p in &nd.parents {
                    if let Some(pk) = self.obs_of_node[p] {
                        directed.push((pk, c));
                    }
                }
            }
        }
        let vars = self
            .obs_names
            .iter()
            .cloned()
            .zip(self.obs_cards.iter().copied())
            .collect();
        Ok(Admg::new(vars, &directed, &bidirected)?)
    }

    /// Audits α-strong positivity: for each component `C`, the smallest
    /// probability of any joint configuration of `Pa⁺(C)` must be at least
    /// `alpha`.
    pub fn check_strong_positivity(
        &self,
        components: &[VarSet],
        alpha: f64,
    ) -> Result<PositivityReport, OracleError> {
        let joint = self.exact_observational()?;
        let mut report = PositivityReport {
            passed: true,
            min_probability: f64::INFINITY,
            worst_component: None,
            worst_event: Assignment::empty(),
        };
        for (ci, &c) in components.iter().enumerate() {
            let mut pa_plus = c;
            for v in c.iter() {
                pa_plus = pa_plus.union(self.observable_parents(v));
            }
            let marg = joint.marginalize(pa_plus);
            for (cell, &p) in marg.probs().iter().enumerate() {
                if p < report.min_probability {
                    report.min_probability = p;
                    report.worst_component = Some(ci);
                    report.worst_event = marg.assignment_of(cell);
                }
            }
        }
        report.passed = report.min_probability >= alpha;
        Ok(report)
    }
}

/// Outcome of [`CausalBayesNet::check_strong_positivity`].
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub passed: bool,
    pub min_probability: f64,
    /// index into the supplied component list
    pub worst_component: Option<usize>,
    pub worst_event: Assignment,
}
