//! Acyclic directed mixed graphs (ADMGs) over observable variables.
//!
//! Directed edges form a DAG; bidirected edges stand for hidden common causes.
//! All set-valued results are ordered by ascending [`VarId`], and topological
//! ties are broken by index, so every operation is deterministic.
//!
//! Most algorithms come in two flavours: one over the whole graph and a
//! `*_within` variant that works on the subgraph induced by a vertex mask.
//! The identification recursion uses the masked variants so that variable
//! indices never need remapping.

mod json;
mod varset;

pub use json::{AdmgDoc, EdgeDoc, VarDoc};
pub use varset::{Assignment, ConfigIter, Symbol, VarId, VarSet, VarSetIter, MAX_VARS};

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdmgError {
    #[error("directed edges contain a cycle through `{0}`")]
    CycleDetected(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0}")]
    DuplicateEdge(String),
    #[error("variable `{name}` has invalid cardinality {cardinality}")]
    InvalidCardinality { name: String, cardinality: usize },
    #[error("graph declares {0} variables; at most {MAX_VARS} are supported")]
    TooManyVariables(usize),
    #[error("malformed graph document: {0}")]
    Malformed(String),
}

/// An ADMG with per-variable cardinalities.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Admg {
    names: Vec<String>,
    cards: Vec<usize>,
    parents: Vec<VarSet>,
    children: Vec<VarSet>,
    spouses: Vec<VarSet>,
    topo: Vec<VarId>,
}

impl Admg {
    /// Builds and validates a graph.
    ///
    /// `vars` lists `(name, cardinality)`; edges refer to positions in `vars`.
    /// Bidirected edges are unordered, so `(a, b)` and `(b, a)` are duplicates.
    pub fn new(
        vars: Vec<(String, usize)>,
        directed: &[(usize, usize)],
        bidirected: &[(usize, usize)],
    ) -> Result<Self, AdmgError> {
        let n = vars.len();
        if n > MAX_VARS {
            return Err(AdmgError::TooManyVariables(n));
        }
        let mut seen = BTreeSet::new();
        for (name, card) in &vars {
            if !seen.insert(name.as_str()) {
                return Err(AdmgError::DuplicateName(name.clone()));
            }
            if *card == 0 || *card > Symbol::MAX as usize + 1 {
                return Err(AdmgError::InvalidCardinality {
                    name: name.clone(),
                    cardinality: *card,
                });
            }
        }
        let (names, cards): (Vec<String>, Vec<usize>) = vars.into_iter().unzip();
        let label = |i: usize| {
            names
                .get(i)
                .cloned()
                .ok_or_else(|| AdmgError::UnknownVariable(format!("#{i}")))
        };

        let mut parents = vec![VarSet::EMPTY; n];
        let mut children = vec![VarSet::EMPTY; n];
        let mut spouses = vec![VarSet::EMPTY; n];
        for &(a, b) in directed {
            let (na, nb) = (label(a)?, label(b)?);
            if a == b {
                return Err(AdmgError::SelfLoop(na));
            }
            if parents[b].contains(VarId(a)) {
                return Err(AdmgError::DuplicateEdge(format!("{na} -> {nb}")));
            }
            parents[b].insert(VarId(a));
            children[a].insert(VarId(b));
        }
        for &(a, b) in bidirected {
            let (na, nb) = (label(a)?, label(b)?);
            if a == b {
                return Err(AdmgError::SelfLoop(na));
            }
            if spouses[a].contains(VarId(b)) {
                return Err(AdmgError::DuplicateEdge(format!("{na} <-> {nb}")));
            }
            spouses[a].insert(VarId(b));
            spouses[b].insert(VarId(a));
        }

        let topo = kahn_order(&parents, &children).map_err(|v| AdmgError::CycleDetected(names[v].clone()))?;
        Ok(Admg {
            names,
            cards,
            parents,
            children,
            spouses,
            topo,
        })
    }

    /// Convenience constructor addressing variables by name; every variable
    /// gets the same cardinality.
    pub fn from_names(
        names: &[&str],
        cardinality: usize,
        directed: &[(&str, &str)],
        bidirected: &[(&str, &str)],
    ) -> Result<Self, AdmgError> {
        let vars = names.iter().map(|n| (n.to_string(), cardinality)).collect();
        let idx = |s: &str| {
            names
                .iter()
                .position(|n| *n == s)
                .ok_or_else(|| AdmgError::UnknownVariable(s.to_string()))
        };
        let d = directed
            .iter()
            .map(|(a, b)| Ok((idx(a)?, idx(b)?)))
            .collect::<Result<Vec<_>, AdmgError>>()?;
        let b = bidirected
            .iter()
            .map(|(a, b)| Ok((idx(a)?, idx(b)?)))
            .collect::<Result<Vec<_>, AdmgError>>()?;
        Admg::new(vars, &d, &b)
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn vars(&self) -> VarSet {
        VarSet::full(self.num_vars())
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name).map(VarId)
    }

    pub fn cardinality(&self, v: VarId) -> usize {
        self.cards[v.0]
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn parents(&self, v: VarId) -> VarSet {
        self.parents[v.0]
    }

    pub fn children(&self, v: VarId) -> VarSet {
        self.children[v.0]
    }

    /// Bidirected neighbours of `v`.
    pub fn spouses(&self, v: VarId) -> VarSet {
        self.spouses[v.0]
    }

    /// Directed edges as `(parent, child)`, sorted.
    pub fn directed_edges(&self) -> Vec<(VarId, VarId)> {
        let mut out = Vec::new();
        for (c, ps) in self.parents.iter().enumerate() {
            for p in ps.iter() {
                out.push((p, VarId(c)));
            }
        }
        out.sort();
        out
    }

    /// Bidirected edges as `(a, b)` with `a < b`, sorted.
    pub fn bidirected_edges(&self) -> Vec<(VarId, VarId)> {
        let mut out = Vec::new();
        for (a, ss) in self.spouses.iter().enumerate() {
            for b in ss.iter().filter(|b| b.0 > a) {
                out.push((VarId(a), b));
            }
        }
        out
    }

    pub fn max_in_degree(&self) -> usize {
        self.parents.iter().map(|p| p.len()).max().unwrap_or(0)
    }

    /// Topological order of all variables, ties broken by ascending index.
    pub fn topological_order(&self) -> &[VarId] {
        &self.topo
    }

    /// The global topological order restricted to `mask`.
    pub fn topological_order_within(&self, mask: VarSet) -> Vec<VarId> {
        self.topo.iter().copied().filter(|v| mask.contains(*v)).collect()
    }

    /// Variables strictly before `v` in `order`.
    pub fn prefix(order: &[VarId], v: VarId) -> VarSet {
        order.iter().take_while(|u| **u != v).collect()
    }

    /// `An(y)`, reflexive, following directed edges only.
    pub fn ancestors(&self, y: VarSet) -> VarSet {
        self.ancestors_within(y, self.vars(), VarSet::EMPTY)
    }

    /// Ancestors of `y` in the subgraph induced by `mask`, where the incoming
    /// edges of `blocked` vertices are ignored (the graph `G_{\bar X}`).
    pub fn ancestors_within(&self, y: VarSet, mask: VarSet, blocked: VarSet) -> VarSet {
        let mut seen = y.intersection(mask);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VarSet::EMPTY;
            for v in frontier.iter() {
                if blocked.contains(v) {
                    continue;
                }
                next = next.union(self.parents[v.0].intersection(mask));
            }
            frontier = next.difference(seen);
            seen = seen.union(frontier);
        }
        seen
    }

    /// Descendants of `x` (reflexive).
    pub fn descendants(&self, x: VarSet) -> VarSet {
        let mut seen = x;
        let mut frontier = x;
        while !frontier.is_empty() {
            let mut next = VarSet::EMPTY;
            for v in frontier.iter() {
                next = next.union(self.children[v.0]);
            }
            frontier = next.difference(seen);
            seen = seen.union(frontier);
        }
        seen
    }

    /// C-component partition of the whole graph.
    pub fn c_components(&self) -> Vec<VarSet> {
        self.c_components_within(self.vars())
    }

    /// C-components of the subgraph induced by `mask`, ordered by smallest
    /// member.
    pub fn c_components_within(&self, mask: VarSet) -> Vec<VarSet> {
        let mut left = mask;
        let mut out = Vec::new();
        while let Some(start) = left.first() {
            let comp = self.c_component_of_within(start, mask);
            left = left.difference(comp);
            out.push(comp);
        }
        out
    }

    /// The c-component containing `v` in the subgraph induced by `mask`.
    pub fn c_component_of_within(&self, v: VarId, mask: VarSet) -> VarSet {
        let mut comp = VarSet::singleton(v);
        let mut frontier = comp;
        while !frontier.is_empty() {
            let mut next = VarSet::EMPTY;
            for u in frontier.iter() {
                next = next.union(self.spouses[u.0].intersection(mask));
            }
            frontier = next.difference(comp);
            comp = comp.union(frontier);
        }
        comp
    }

    /// `Pa⁺(s)`: `s` together with the directed parents of its members,
    /// restricted to `mask`.
    pub fn pa_plus_within(&self, s: VarSet, mask: VarSet) -> VarSet {
        let mut out = s;
        for v in s.iter() {
            out = out.union(self.parents[v.0]);
        }
        out.intersection(mask)
    }

    pub fn pa_plus(&self, s: VarSet) -> VarSet {
        self.pa_plus_within(s, self.vars())
    }

    /// Effective parents of `vi`: `Pa⁺(C) ∩ prefix(vi)` where `C` is the
    /// c-component of `vi` and the prefix is taken in `order`.
    pub fn effective_parents(&self, order: &[VarId], vi: VarId) -> VarSet {
        self.effective_parents_within(order, vi, self.vars())
    }

    /// Effective parents of `vi` in the subgraph induced by `mask`.
    pub fn effective_parents_within(&self, order: &[VarId], vi: VarId, mask: VarSet) -> VarSet {
        let comp = self.c_component_of_within(vi, mask);
        self.pa_plus_within(comp, mask)
            .intersection(Admg::prefix(order, vi))
    }

    /// The subgraph induced by `s` with variables re-indexed densely.
    ///
    /// Returns the new graph and, for each new index, the original variable.
    pub fn induced_subgraph(&self, s: VarSet) -> (Admg, Vec<VarId>) {
        let keep = s.intersection(self.vars()).to_vec();
        let mut remap = vec![usize::MAX; self.num_vars()];
        for (new, old) in keep.iter().enumerate() {
            remap[old.0] = new;
        }
        let vars = keep
            .iter()
            .map(|v| (self.names[v.0].clone(), self.cards[v.0]))
            .collect();
        let directed: Vec<_> = self
            .directed_edges()
            .into_iter()
            .filter(|(a, b)| s.contains(*a) && s.contains(*b))
            .map(|(a, b)| (remap[a.0], remap[b.0]))
            .collect();
        let bidirected: Vec<_> = self
            .bidirected_edges()
            .into_iter()
            .filter(|(a, b)| s.contains(*a) && s.contains(*b))
            .map(|(a, b)| (remap[a.0], remap[b.0]))
            .collect();
        let g = Admg::new(vars, &directed, &bidirected).expect("subgraph of a valid ADMG is valid");
        (g, keep)
    }

    /// `G_{\bar X}`: removes directed edges into `x` and every bidirected edge
    /// touching `x`.
    pub fn remove_incoming(&self, x: VarSet) -> Admg {
        let vars = self
            .names
            .iter()
            .cloned()
            .zip(self.cards.iter().copied())
            .collect();
        let directed: Vec<_> = self
            .directed_edges()
            .into_iter()
            .filter(|(_, b)| !x.contains(*b))
            .map(|(a, b)| (a.0, b.0))
            .collect();
        let bidirected: Vec<_> = self
            .bidirected_edges()
            .into_iter()
            .filter(|(a, b)| !x.contains(*a) && !x.contains(*b))
            .map(|(a, b)| (a.0, b.0))
            .collect();
        Admg::new(vars, &directed, &bidirected).expect("edge removal keeps an ADMG valid")
    }

    /// Looks up a set of variables by name.
    pub fn var_set(&self, names: &[&str]) -> Result<VarSet, AdmgError> {
        names
            .iter()
            .map(|n| self.var(n).ok_or_else(|| AdmgError::UnknownVariable(n.to_string())))
            .collect()
    }

    /// Comma-separated variable names of `s`, in index order.
    pub fn format_set(&self, s: VarSet) -> String {
        let parts: Vec<&str> = s.iter().map(|v| self.name(v)).collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// Kahn's algorithm, always taking the smallest ready index.
fn kahn_order(parents: &[VarSet], children: &[VarSet]) -> Result<Vec<VarId>, usize> {
    let n = parents.len();
    let mut indeg: Vec<usize> = parents.iter().map(|p| p.len()).collect();
    let mut ready: VarSet = (0..n).filter(|&i| indeg[i] == 0).map(VarId).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.first() {
        ready.remove(v);
        order.push(v);
        for c in children[v.0].iter() {
            indeg[c.0] -= 1;
            if indeg[c.0] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap_or(0);
        return Err(stuck);
    }
    Ok(order)
}
