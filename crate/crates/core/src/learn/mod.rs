//! Finite-sample learning of a full interventional distribution `P_x(V ∖ X)`.
//!
//! The target factorizes over the c-components of `G`. Components disjoint
//! from `X` form the high-dimensional part `Q`, learned as add-1 conditionals
//! on effective parents. Each component `C_i` that meets `X` splits into the
//! c-components `C_ij` of `G[C_i ∖ X]`; every `P(c_ij | do(v ∖ c_ij))` is
//! compiled by the ID algorithm and materialized from the data as a small
//! table, then rewritten as per-variable conditionals so the result is one
//! ordered product that can be evaluated and sampled.

mod budget;
mod conditional;
mod json;

pub use budget::Budget;
pub use conditional::ConditionalTable;
pub use json::{LearnedDoc, LearnedFactorDoc};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::admg::{Admg, Assignment, ConfigIter, Symbol, VarId, VarSet};
use crate::estimand::{marginal_table, DistAccess, EmpiricalAccess, Estimand, EstimandError};
use crate::identify::{identify, Identification, IdentifyError};
use crate::rng::RNG_ALGORITHM;
use crate::samples::SampleSet;
use crate::table::{state_count, PmfTable, TableError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error("P_x({0}) is not identifiable")]
    NotIdentifiable(String),
    #[error("positivity violation: conditioning event {0} never occurs")]
    PositivityViolation(String),
    #[error("assignment covers {got:?} but the evaluator needs exactly {expected:?}")]
    ScopeMismatch { got: VarSet, expected: VarSet },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("malformed learned model: {0}")]
    Malformed(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

impl From<IdentifyError> for LearnError {
    fn from(e: IdentifyError) -> Self {
        LearnError::Invalid(e.to_string())
    }
}

/// The c-components of `G` arranged around an intervention set `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativePartition {
    /// components meeting `X` first, each group ordered by smallest member
    pub c_components: Vec<VarSet>,
    pub ell: usize,
    /// `X ∩ C_i` for the first `ell` components
    pub x_parts: Vec<VarSet>,
    pub c_low: VarSet,
    pub c_high: VarSet,
    /// c-components of `G[C_i ∖ X_i]` for the first `ell` components
    pub sub_components: Vec<Vec<VarSet>>,
}

pub fn relative_partition(g: &Admg, x: VarSet) -> RelativePartition {
    let (mut touched, rest): (Vec<VarSet>, Vec<VarSet>) =
        g.c_components().into_iter().partition(|c| !c.is_disjoint(x));
    let ell = touched.len();
    let x_parts: Vec<VarSet> = touched.iter().map(|c| c.intersection(x)).collect();
    let sub_components = touched
        .iter()
        .zip(&x_parts)
        .map(|(c, xi)| g.c_components_within(c.difference(*xi)))
        .collect();
    let c_low = touched.iter().fold(VarSet::EMPTY, |a, c| a.union(*c));
    let c_high = rest.iter().fold(VarSet::EMPTY, |a, c| a.union(*c));
    touched.extend(rest);
    RelativePartition {
        c_components: touched,
        ell,
        x_parts,
        c_low,
        c_high,
        sub_components,
    }
}

/// What the learner reads the observational distribution from.
#[derive(Debug, Clone, Copy)]
pub enum DistHandle<'a> {
    Samples(&'a SampleSet),
    /// a joint table over every observable and its pointwise relative
    /// accuracy `eta` (0 for an exact table)
    Table { table: &'a PmfTable, eta: f64 },
}

impl DistHandle<'_> {
    fn size(&self) -> usize {
        match self {
            DistHandle::Samples(s) => s.len(),
            DistHandle::Table { .. } => 0,
        }
    }

    fn source(&self) -> &'static str {
        match self {
            DistHandle::Samples(_) => "samples",
            DistHandle::Table { .. } => "table",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnConfig {
    pub epsilon: f64,
    pub delta: f64,
    /// assumed strong-positivity level of the components meeting `X`
    pub alpha: f64,
    /// seed that produced the samples, when known
    pub seed: Option<u64>,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            epsilon: 0.05,
            delta: 0.05,
            alpha: 0.01,
            seed: None,
        }
    }
}

impl LearnConfig {
    fn validate(&self) -> Result<(), LearnError> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.epsilon) || !open_unit(self.delta) || !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(LearnError::Invalid(
                "need 0 < epsilon < 1, 0 < delta < 1 and 0 < alpha <= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Add-1 conditionals `Q̂(V_i | Z_i)` for every `V_i` in the components
/// disjoint from `X`, over all configurations of the effective parents.
pub fn learn_q(
    data: DistHandle<'_>,
    g: &Admg,
    part: &RelativePartition,
) -> Result<BTreeMap<VarId, ConditionalTable>, LearnError> {
    let order = g.topological_order();
    let cards = g.cardinalities();
    let mut out = BTreeMap::new();
    for v in part.c_high.iter() {
        let z = g.effective_parents(order, v);
        let t = match data {
            DistHandle::Samples(s) => {
                let counts = s.counts(z.with(v), cards)?;
                ConditionalTable::add_one(v, z, cards, &counts)
            }
            DistHandle::Table { table, .. } => ConditionalTable::from_joint(v, z, cards, table),
        }
        .map_err(LearnError::Malformed)?;
        out.insert(v, t);
    }
    Ok(out)
}

/// One `R̂_ij = P̂(c_ij | do(v ∖ c_ij))` materialized at the intervention.
#[derive(Debug, Clone, PartialEq)]
pub struct RFactor {
    /// `(i, j)` into the partition's sub-components
    pub component: (usize, usize),
    pub vars: VarSet,
    pub estimand: Estimand,
    /// over `vars` plus every non-intervened variable the estimand reads
    pub table: PmfTable,
}

/// Compiles and materializes every `R_ij` at `x`.
pub fn learn_r(
    data: DistHandle<'_>,
    g: &Admg,
    part: &RelativePartition,
    x: &Assignment,
) -> Result<Vec<RFactor>, LearnError> {
    let empirical;
    let access: &dyn DistAccess = match data {
        DistHandle::Samples(s) => {
            empirical = EmpiricalAccess::new(s, g.cardinalities());
            &empirical
        }
        DistHandle::Table { table, .. } => table,
    };
    let mut out = Vec::new();
    for (i, subs) in part.sub_components.iter().enumerate() {
        for (j, &cij) in subs.iter().enumerate() {
            let rest = g.vars().difference(cij);
            let estimand = match identify(g, rest, cij)? {
                Identification::Identified { estimand, .. } => estimand,
                Identification::Hedge(_) => {
                    return Err(LearnError::NotIdentifiable(g.format_set(cij)));
                }
            };
            let env = x.restrict(estimand.expr.reads());
            let table = marginal_table(&estimand.expr, cij, access, &env).map_err(|e| match e {
                EstimandError::ZeroConditioningEvent(ev) => LearnError::PositivityViolation(format_event(g, &ev)),
                EstimandError::Table(t) => LearnError::Table(t),
                other => LearnError::Malformed(other.to_string()),
            })?;
            out.push(RFactor {
                component: (i, j),
                vars: cij,
                estimand,
                table,
            });
        }
    }
    Ok(out)
}

fn format_event(g: &Admg, ev: &[(VarId, Symbol)]) -> String {
    let parts: Vec<String> = ev.iter().map(|(v, s)| format!("{}={}", g.name(*v), s)).collect();
    format!("{{{}}}", parts.join(","))
}

/// Which part of the factorization a learned factor comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorKind {
    /// high-dimensional part, add-1 estimate
    Q,
    /// low-dimensional part, from `R̂_ij`
    S { component: usize, sub: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedFactor {
    pub kind: FactorKind,
    pub table: ConditionalTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnMeta {
    /// samples consumed (0 when learned from a table)
    pub m_used: usize,
    pub source: String,
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
    pub budget: Budget,
    pub rng_algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// The learned evaluator and generator for `P_x(V ∖ X)`: one conditional
/// per non-intervened variable, in topological order.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnedInterventional {
    graph: Admg,
    x: Assignment,
    order: Vec<VarId>,
    factors: Vec<LearnedFactor>,
    meta: LearnMeta,
}

impl LearnedInterventional {
    /// Checks that `factors[i]` targets `order[i]`, that `order` lists
    /// `V ∖ X` topologically, and that every factor conditions only on
    /// intervened or earlier variables.
    pub fn new(
        graph: Admg,
        x: Assignment,
        order: Vec<VarId>,
        factors: Vec<LearnedFactor>,
        meta: LearnMeta,
    ) -> Result<Self, LearnError> {
        if !x.is_valid_for(graph.cardinalities()) || !x.domain().is_subset(graph.vars()) {
            return Err(LearnError::Malformed("intervention does not fit the graph".into()));
        }
        let targets = graph.vars().difference(x.domain());
        if order.len() != factors.len() || order.iter().collect::<VarSet>() != targets || order.len() != targets.len() {
            return Err(LearnError::Malformed("order must list every non-intervened variable once".into()));
        }
        let mut seen = x.domain();
        for (v, f) in order.iter().zip(&factors) {
            if f.table.target() != *v {
                return Err(LearnError::Malformed(format!("factor for `{}` is out of order", graph.name(*v))));
            }
            if !graph.parents(*v).is_subset(seen) {
                return Err(LearnError::Malformed("order is not topological".into()));
            }
            if !f.table.given_set().is_subset(seen) {
                return Err(LearnError::Malformed(format!(
                    "factor for `{}` conditions on a later variable",
                    graph.name(*v)
                )));
            }
            if f.table.cardinality() != graph.cardinality(*v) {
                return Err(LearnError::Malformed(format!("factor for `{}` has the wrong arity", graph.name(*v))));
            }
            seen.insert(*v);
        }
        Ok(LearnedInterventional {
            graph,
            x,
            order,
            factors,
            meta,
        })
    }

    pub fn graph(&self) -> &Admg {
        &self.graph
    }

    pub fn intervention(&self) -> &Assignment {
        &self.x
    }

    pub fn targets(&self) -> VarSet {
        self.graph.vars().difference(self.x.domain())
    }

    pub fn order(&self) -> &[VarId] {
        &self.order
    }

    pub fn factors(&self) -> &[LearnedFactor] {
        &self.factors
    }

    pub fn meta(&self) -> &LearnMeta {
        &self.meta
    }

    /// Dense value vector with the intervention filled in.
    pub fn buffer(&self) -> Vec<Symbol> {
        self.x.to_dense(self.graph.num_vars())
    }

    /// `P̂_x(y)` from a dense vector holding `x` and `y`.
    #[inline]
    pub fn evaluate_dense(&self, values: &[Symbol]) -> f64 {
        self.factors.iter().map(|f| f.table.prob(values)).product()
    }

    /// `P̂_x(y)` for an assignment of exactly `V ∖ X`.
    pub fn evaluate_point(&self, y: &Assignment) -> Result<f64, LearnError> {
        let targets = self.targets();
        if y.domain() != targets {
            return Err(LearnError::ScopeMismatch {
                got: y.domain(),
                expected: targets,
            });
        }
        if !y.is_valid_for(self.graph.cardinalities()) {
            return Err(LearnError::Invalid("assignment value out of range".into()));
        }
        let mut buf = self.buffer();
        for (v, s) in y.iter() {
            buf[v.0] = s;
        }
        Ok(self.evaluate_dense(&buf))
    }

    /// The whole evaluator table over `V ∖ X`, with `x` as context.
    pub fn full_table(&self) -> Result<PmfTable, LearnError> {
        let targets = self.targets();
        let cards = self.graph.cardinalities();
        state_count(targets, cards)?;
        let mut table = PmfTable::zeros(targets, cards)?;
        let mut buf = self.buffer();
        self.fill(0, 1.0, &mut buf, &mut table);
        Ok(table.with_context(self.x.clone()))
    }

    fn fill(&self, depth: usize, acc: f64, buf: &mut [Symbol], out: &mut PmfTable) {
        if depth == self.order.len() {
            let i = out.index_dense(buf);
            out.probs_mut()[i] = acc;
            return;
        }
        let f = &self.factors[depth].table;
        let v = self.order[depth];
        let row = f.row(f.row_index(buf));
        for (s, p) in row.iter().enumerate() {
            buf[v.0] = s as Symbol;
            self.fill(depth + 1, acc * p, buf, out);
        }
        buf[v.0] = 0;
    }
}

/// Rewrites the `R̂_ij` tables as per-variable conditionals and joins them
/// with the `Q̂` factors in topological order.
pub fn assemble(
    q: BTreeMap<VarId, ConditionalTable>,
    r: &[RFactor],
    part: &RelativePartition,
    g: &Admg,
    x: &Assignment,
    meta: LearnMeta,
) -> Result<LearnedInterventional, LearnError> {
    let order: Vec<VarId> = g
        .topological_order()
        .iter()
        .copied()
        .filter(|v| !x.domain().contains(*v))
        .collect();
    let mut q = q;
    let mut factors = Vec::with_capacity(order.len());
    for &v in &order {
        if part.c_high.contains(v) {
            let table = q
                .remove(&v)
                .ok_or_else(|| LearnError::Malformed(format!("no learned factor for `{}`", g.name(v))))?;
            factors.push(LearnedFactor {
                kind: FactorKind::Q,
                table,
            });
            continue;
        }
        let rf = r
            .iter()
            .find(|rf| rf.vars.contains(v))
            .ok_or_else(|| LearnError::Malformed(format!("no component table covers `{}`", g.name(v))))?;
        let z = g.effective_parents(g.topological_order(), v).difference(x.domain());
        factors.push(LearnedFactor {
            kind: FactorKind::S {
                component: rf.component.0,
                sub: rf.component.1,
            },
            table: conditional_from_component(g, &rf.table, rf.vars, v, z)?,
        });
    }
    LearnedInterventional::new(g.clone(), x.clone(), order, factors, meta)
}

/// `R̂(v | z)` from a table over `C_ij` plus read variables.
///
/// Later members of `C_ij` are summed out and the rest normalized per
/// configuration; variables outside `z` are averaged out uniformly and
/// members of `z` absent from the table are broadcast. Exact tables do not
/// depend on the averaged variables, so only estimation noise is smoothed.
/// Rows with no mass become uniform.
fn conditional_from_component(
    g: &Admg,
    t: &PmfTable,
    cij: VarSet,
    v: VarId,
    z: VarSet,
) -> Result<ConditionalTable, LearnError> {
    let order = g.topological_order();
    let later = cij.intersection(g.vars().difference(Admg::prefix(order, v).with(v)));
    let ti = t.marginalize(t.scope().difference(later));
    let context = ti.scope().difference(VarSet::singleton(v));
    let avg: Vec<VarId> = context.difference(z).to_vec();
    let zv: Vec<VarId> = z.to_vec();
    let cards = g.cardinalities();
    let card = cards[v.0];
    let n_avg: usize = avg.iter().map(|u| cards[u.0]).product();
    let mut buf = vec![0 as Symbol; g.num_vars()];
    let mut rows = Vec::with_capacity(card * zv.iter().map(|u| cards[u.0]).product::<usize>());
    for a in ConfigIter::new(&zv, cards) {
        for (u, s) in zv.iter().zip(&a) {
            buf[u.0] = *s;
        }
        let mut acc = vec![0.0; card];
        for b in ConfigIter::new(&avg, cards) {
            for (u, s) in avg.iter().zip(&b) {
                buf[u.0] = *s;
            }
            let row: Vec<f64> = (0..card)
                .map(|s| {
                    buf[v.0] = s as Symbol;
                    ti.get_dense(&buf)
                })
                .collect();
            for (a, p) in acc.iter_mut().zip(conditional::normalize_or_uniform(row)) {
                *a += p;
            }
        }
        rows.extend(conditional::normalize_or_uniform(
            acc.into_iter().map(|p| p / n_avg as f64).collect(),
        ));
    }
    ConditionalTable::new(v, z, cards, rows, None).map_err(LearnError::Malformed)
}

/// Learns `P_x(V ∖ X)` from observational data on `g`.
pub fn learn(
    data: DistHandle<'_>,
    g: &Admg,
    x: &Assignment,
    config: &LearnConfig,
) -> Result<LearnedInterventional, LearnError> {
    config.validate()?;
    if !x.domain().is_subset(g.vars()) || !x.is_valid_for(g.cardinalities()) {
        return Err(LearnError::Invalid("intervention does not fit the graph".into()));
    }
    match data {
        DistHandle::Samples(s) if s.n_vars() != g.num_vars() => {
            return Err(LearnError::Invalid(format!(
                "samples have {} columns, graph has {} variables",
                s.n_vars(),
                g.num_vars()
            )));
        }
        DistHandle::Samples(s) if s.is_empty() => return Err(LearnError::Invalid("no samples".into())),
        DistHandle::Table { table, .. } if table.scope() != g.vars() => {
            return Err(LearnError::Invalid("table must cover every observable".into()));
        }
        _ => {}
    }
    let targets = g.vars().difference(x.domain());
    if targets.is_empty() {
        return Err(LearnError::Invalid("every variable is intervened on".into()));
    }
    if let Identification::Hedge(_) = identify(g, x.domain(), targets)? {
        return Err(LearnError::NotIdentifiable(g.format_set(targets)));
    }
    let part = relative_partition(g, x.domain());
    let budget = Budget::new(g, &part, config.epsilon, config.delta, config.alpha);
    let q = learn_q(data, g, &part)?;
    let r = learn_r(data, g, &part, x)?;
    let meta = LearnMeta {
        m_used: data.size(),
        source: data.source().to_string(),
        epsilon: config.epsilon,
        delta: config.delta,
        alpha: config.alpha,
        budget,
        rng_algorithm: RNG_ALGORITHM.to_string(),
        seed: config.seed,
    };
    assemble(q, &r, &part, g, x, meta)
}
