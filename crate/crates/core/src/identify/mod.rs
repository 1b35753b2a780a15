//! The ID algorithm as a symbolic compiler from interventional queries to
//! estimands.
//!
//! The recursion never re-indexes variables: each call works on the
//! subgraph induced by a vertex mask, and steps 5b/5c condition along the
//! global topological order of the input graph restricted to that mask.

mod query;
pub mod witness;

pub use query::{InterventionDoc, QueryDoc};

use std::fmt;

use thiserror::Error;

use crate::admg::{Admg, Assignment, VarSet};
use crate::estimand::{DistExpr, Estimand, Factor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentifyError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Step1,
    Step2,
    Step3,
    Step4,
    Step5a,
    Step5b,
    Step5c,
}

impl Step {
    pub fn id(self) -> &'static str {
        match self {
            Step::Step1 => "step1",
            Step::Step2 => "step2",
            Step::Step3 => "step3",
            Step::Step4 => "step4",
            Step::Step5a => "step5a",
            Step::Step5b => "step5b",
            Step::Step5c => "step5c",
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One recursion step: the step taken and the call it was taken in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub step: Step,
    pub depth: usize,
    pub y: VarSet,
    pub x: VarSet,
    /// vertices of the subgraph the call works in
    pub graph: VarSet,
}

impl TraceEntry {
    pub fn describe(&self, g: &Admg) -> String {
        format!(
            "y={} x={} in G[{}]",
            g.format_set(self.y),
            g.format_set(self.x),
            g.format_set(self.graph)
        )
    }
}

/// Where step 5a failed: the c-component `root` of `G[graph] ∖ x` and the
/// single-c-component subgraph it sits in, plus the full trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HedgeWitness {
    pub root: VarSet,
    pub graph: VarSet,
    pub x: VarSet,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Identification {
    Identified { estimand: Estimand, trace: Vec<TraceEntry> },
    Hedge(HedgeWitness),
}

impl Identification {
    pub fn trace(&self) -> &[TraceEntry] {
        match self {
            Identification::Identified { trace, .. } => trace,
            Identification::Hedge(w) => &w.trace,
        }
    }

    pub fn estimand(&self) -> Option<&Estimand> {
        match self {
            Identification::Identified { estimand, .. } => Some(estimand),
            Identification::Hedge(_) => None,
        }
    }
}

/// An interventional query `P_x(y)` on a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalQuery {
    pub graph: Admg,
    pub x: Assignment,
    pub y: VarSet,
}

impl CausalQuery {
    pub fn new(graph: Admg, x: Assignment, y: VarSet) -> Result<Self, IdentifyError> {
        validate(&graph, x.domain(), y)?;
        if !x.is_valid_for(graph.cardinalities()) {
            return Err(IdentifyError::InvalidQuery("intervention value out of range".into()));
        }
        Ok(CausalQuery { graph, x, y })
    }

    pub fn identify(&self) -> Result<Identification, IdentifyError> {
        identify(&self.graph, self.x.domain(), self.y)
    }

    pub fn is_identifiable(&self) -> Result<bool, IdentifyError> {
        Ok(matches!(self.identify()?, Identification::Identified { .. }))
    }

    pub fn explain_trace(&self) -> Result<Vec<(Step, String)>, IdentifyError> {
        explain_trace(&self.graph, self.x.domain(), self.y)
    }
}

fn validate(g: &Admg, x: VarSet, y: VarSet) -> Result<(), IdentifyError> {
    let all = g.vars();
    if !x.is_subset(all) || !y.is_subset(all) {
        return Err(IdentifyError::InvalidQuery("query mentions undeclared variables".into()));
    }
    if !x.is_disjoint(y) {
        return Err(IdentifyError::InvalidQuery(format!(
            "{} is both intervened on and a target",
            g.format_set(x.intersection(y))
        )));
    }
    if y.is_empty() {
        return Err(IdentifyError::InvalidQuery("no target variables".into()));
    }
    Ok(())
}

/// Compiles `P_x(y)`. The result depends only on the graph and the sets;
/// intervention values are bound at evaluation.
pub fn identify(g: &Admg, x: VarSet, y: VarSet) -> Result<Identification, IdentifyError> {
    validate(g, x, y)?;
    let mut c = Compiler {
        g,
        order: g.topological_order().to_vec(),
        trace: Vec::new(),
        arbitrary: VarSet::EMPTY,
    };
    match c.id(y, x, DistExpr::base(g.vars()), g.vars(), 0) {
        Ok(expr) => Ok(Identification::Identified {
            estimand: Estimand {
                expr,
                targets: y,
                intervened: x,
                arbitrary: c.arbitrary.difference(x.union(y)),
            },
            trace: c.trace,
        }),
        Err((root, graph, local_x)) => Ok(Identification::Hedge(HedgeWitness {
            root,
            graph,
            x: local_x,
            trace: c.trace,
        })),
    }
}

pub fn is_identifiable(g: &Admg, x: VarSet, y: VarSet) -> Result<bool, IdentifyError> {
    Ok(matches!(identify(g, x, y)?, Identification::Identified { .. }))
}

/// The recursion trace as `(step, description of the call)` pairs.
pub fn explain_trace(g: &Admg, x: VarSet, y: VarSet) -> Result<Vec<(Step, String)>, IdentifyError> {
    Ok(identify(g, x, y)?
        .trace()
        .iter()
        .map(|t| (t.step, t.describe(g)))
        .collect())
}

struct Compiler<'a> {
    g: &'a Admg,
    order: Vec<crate::admg::VarId>,
    trace: Vec<TraceEntry>,
    arbitrary: VarSet,
}

type Fail = (VarSet, VarSet, VarSet);

impl Compiler<'_> {
    fn log(&mut self, step: Step, depth: usize, y: VarSet, x: VarSet, graph: VarSet) {
        self.trace.push(TraceEntry {
            step,
            depth,
            y,
            x,
            graph,
        });
    }

    /// `∏_{v ∈ s} p[v | effective parents of v in G[mask]]`.
    fn chain(&self, p: DistExpr, s: VarSet, mask: VarSet) -> DistExpr {
        let factors = self
            .order
            .iter()
            .filter(|v| s.contains(**v))
            .map(|&v| Factor {
                var: v,
                given: self.g.effective_parents_within(&self.order, v, mask),
            })
            .collect();
        DistExpr::chain_product(p, factors)
    }

    fn id(&mut self, y: VarSet, x: VarSet, p: DistExpr, mask: VarSet, depth: usize) -> Result<DistExpr, Fail> {
        let g = self.g;
        if x.is_empty() {
            self.log(Step::Step1, depth, y, x, mask);
            return Ok(DistExpr::marginal(p, mask.difference(y)));
        }

        let an = g.ancestors_within(y, mask, VarSet::EMPTY);
        if an != mask {
            self.log(Step::Step2, depth, y, x, mask);
            let p = DistExpr::marginal(p, mask.difference(an));
            return self.id(y, x.intersection(an), p, an, depth + 1);
        }

        let w = mask
            .difference(x)
            .difference(g.ancestors_within(y, mask, x));
        if !w.is_empty() {
            self.log(Step::Step3, depth, y, x, mask);
            self.arbitrary = self.arbitrary.union(w);
            return self.id(y, x.union(w), p, mask, depth + 1);
        }

        let parts = g.c_components_within(mask.difference(x));
        if parts.len() > 1 {
            self.log(Step::Step4, depth, y, x, mask);
            let mut children = Vec::with_capacity(parts.len());
            for s in parts {
                children.push(self.id(s, mask.difference(s), p.clone(), mask, depth + 1)?);
            }
            let drop = mask.difference(y.union(x));
            return Ok(DistExpr::marginal(DistExpr::Product { children }, drop));
        }

        let s = parts[0];
        let whole = g.c_components_within(mask);
        if whole.len() == 1 {
            self.log(Step::Step5a, depth, y, x, mask);
            return Err((s, mask, x));
        }
        if whole.contains(&s) {
            self.log(Step::Step5b, depth, y, x, mask);
            return Ok(self.chain(p, s, mask));
        }
        self.log(Step::Step5c, depth, y, x, mask);
        let s_prime = *whole
            .iter()
            .find(|c| s.is_subset(**c))
            .expect("a c-component of G ∖ X lies inside one of G");
        let p = self.chain(p, s_prime, mask);
        self.id(y, x.intersection(s_prime), p, s_prime, depth + 1)
    }
}
