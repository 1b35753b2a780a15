//! Estimands: expression trees over the observational distribution.
//!
//! Every node denotes a nonnegative function of the variables in its
//! [`scope`](DistExpr::scope), parameterized by the values of the variables it
//! [`reads`](DistExpr::reads) from the surrounding assignment. Scope and reads
//! are always disjoint. Summation binds lexically: inside a [`DistExpr::Marginal`]
//! the dropped variables take the summed values, shadowing any outer value.
//!
//! Two independent routes compute the same numbers: [`evaluate_expr`] walks the
//! tree pointwise, and [`full_table_expr`] materializes it with table algebra.

mod access;
mod eval;
mod json;
mod materialize;
mod render;

pub use access::{DistAccess, EmpiricalAccess};
pub use eval::evaluate_expr;
pub use json::{EstimandDoc, ExprDoc, FactorDoc};
pub use materialize::{full_table_expr, marginal_table};
pub use render::{render, Style};

use thiserror::Error;

use crate::admg::{Assignment, Symbol, VarId, VarSet};
use crate::table::TableError;

/// Largest deviation of a materialized total from 1 that passes unflagged.
pub const MASS_FLAG_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimandError {
    #[error("conditioning event {0:?} has zero mass")]
    ZeroConditioningEvent(Vec<(VarId, Symbol)>),
    #[error("assignment covers {got:?} but the expression needs exactly {expected:?}")]
    ScopeMismatch { got: VarSet, expected: VarSet },
    #[error("malformed estimand: {0}")]
    Malformed(String),
    #[error(transparent)]
    Table(TableError),
}

impl From<TableError> for EstimandError {
    fn from(e: TableError) -> Self {
        match e {
            TableError::ZeroDivision(at) => EstimandError::ZeroConditioningEvent(at),
            other => EstimandError::Table(other),
        }
    }
}

/// One conditional `child[var | given]` of a chain product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub var: VarId,
    pub given: VarSet,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistExpr {
    /// The observational distribution over `vars`.
    Base { vars: VarSet },
    /// `Σ_drop child`.
    Marginal { child: Box<DistExpr>, drop: VarSet },
    /// `∏ child[v_i | given_i]` over the variables `over`, factors listed in
    /// topological order. Each conditional is a ratio of two marginals of
    /// the child; variables of `given` outside `over` are read from the
    /// assignment.
    ChainProduct {
        child: Box<DistExpr>,
        over: VarSet,
        factors: Vec<Factor>,
    },
    /// Pointwise product of children with disjoint scopes.
    Product { children: Vec<DistExpr> },
}

impl DistExpr {
    pub fn base(vars: VarSet) -> Self {
        DistExpr::Base { vars }
    }

    /// Sums out `drop`; an empty `drop` returns `child` unchanged.
    pub fn marginal(child: DistExpr, drop: VarSet) -> Self {
        if drop.is_empty() {
            child
        } else {
            DistExpr::Marginal {
                child: Box::new(child),
                drop,
            }
        }
    }

    pub fn chain_product(child: DistExpr, factors: Vec<Factor>) -> Self {
        let over = factors.iter().map(|f| f.var).collect();
        DistExpr::ChainProduct {
            child: Box::new(child),
            over,
            factors,
        }
    }

    pub fn scope(&self) -> VarSet {
        match self {
            DistExpr::Base { vars } => *vars,
            DistExpr::Marginal { child, drop } => child.scope().difference(*drop),
            DistExpr::ChainProduct { over, .. } => *over,
            DistExpr::Product { children } => children.iter().fold(VarSet::EMPTY, |s, c| s.union(c.scope())),
        }
    }

    /// Variables whose values come from the surrounding assignment.
    pub fn reads(&self) -> VarSet {
        match self {
            DistExpr::Base { .. } => VarSet::EMPTY,
            DistExpr::Marginal { child, .. } => child.reads(),
            DistExpr::ChainProduct { child, over, factors } => {
                let given = factors.iter().fold(VarSet::EMPTY, |s, f| s.union(f.given));
                child.reads().union(given.difference(*over))
            }
            DistExpr::Product { children } => {
                let reads = children.iter().fold(VarSet::EMPTY, |s, c| s.union(c.reads()));
                reads.difference(self.scope())
            }
        }
    }

    pub fn depth(&self) -> usize {
        1 + match self {
            DistExpr::Base { .. } => 0,
            DistExpr::Marginal { child, .. } | DistExpr::ChainProduct { child, .. } => child.depth(),
            DistExpr::Product { children } => children.iter().map(|c| c.depth()).max().unwrap_or(0),
        }
    }

    /// Checks the structural invariants: scopes and reads disjoint, marginals
    /// drop only scope variables, chain factors live in the child's scope,
    /// product children disjoint.
    pub fn validate(&self) -> Result<(), EstimandError> {
        let bad = |m: String| Err(EstimandError::Malformed(m));
        match self {
            DistExpr::Base { .. } => Ok(()),
            DistExpr::Marginal { child, drop } => {
                child.validate()?;
                if !drop.is_subset(child.scope()) {
                    return bad(format!("marginal drops {drop:?} outside child scope {:?}", child.scope()));
                }
                Ok(())
            }
            DistExpr::ChainProduct { child, over, factors } => {
                child.validate()?;
                let cs = child.scope();
                let vars: VarSet = factors.iter().map(|f| f.var).collect();
                if vars != *over || vars.len() != factors.len() {
                    return bad("chain product factors must list each variable of `over` once".into());
                }
                for f in factors {
                    if !f.given.with(f.var).is_subset(cs) || f.given.contains(f.var) {
                        return bad(format!("factor {:?} | {:?} leaves the child scope", f.var, f.given));
                    }
                }
                if !child.reads().is_disjoint(*over) {
                    return bad("chain product child reads a variable it produces".into());
                }
                Ok(())
            }
            DistExpr::Product { children } => {
                let mut seen = VarSet::EMPTY;
                for c in children {
                    c.validate()?;
                    if !seen.is_disjoint(c.scope()) {
                        return bad("product children overlap".into());
                    }
                    seen = seen.union(c.scope());
                }
                Ok(())
            }
        }
    }
}

/// A compiled interventional query: `expr` has scope `targets` and reads
/// only `intervened ∪ arbitrary`.
///
/// `arbitrary` holds variables the recursion intervened on with an
/// unconstrained value; they are bound to the evaluation point when it
/// assigns them and to symbol 0 otherwise. The value does not change the
/// result.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimand {
    pub expr: DistExpr,
    pub targets: VarSet,
    pub intervened: VarSet,
    pub arbitrary: VarSet,
}

/// A materialized estimand table and whether its mass strays from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Materialized {
    pub table: crate::table::PmfTable,
    pub mass_deviation: f64,
    pub flagged: bool,
}

impl Estimand {
    fn binding(&self, point: &Assignment) -> Assignment {
        let mut a = point.clone();
        for w in self.arbitrary.difference(point.domain()).iter() {
            a.set(w, 0);
        }
        a
    }

    /// `P_x(y)` at a point assigning exactly the targets and intervened
    /// variables (optionally also arbitrary ones).
    pub fn evaluate(&self, p: &dyn DistAccess, point: &Assignment) -> Result<f64, EstimandError> {
        let need = self.targets.union(self.intervened);
        let dom = point.domain().difference(self.arbitrary);
        if dom != need {
            return Err(EstimandError::ScopeMismatch {
                got: point.domain(),
                expected: need,
            });
        }
        evaluate_expr(&self.expr, p, &self.binding(point))
    }

    /// The whole table over the targets with the intervened variables fixed
    /// to `x`.
    pub fn full_table(&self, p: &dyn DistAccess, x: &Assignment) -> Result<Materialized, EstimandError> {
        let dom = x.domain().difference(self.arbitrary);
        if dom != self.intervened {
            return Err(EstimandError::ScopeMismatch {
                got: x.domain(),
                expected: self.intervened,
            });
        }
        let table = full_table_expr(&self.expr, p, &self.binding(x))?;
        let mass_deviation = (table.total() - 1.0).abs();
        Ok(Materialized {
            table,
            mass_deviation,
            flagged: mass_deviation > MASS_FLAG_TOLERANCE,
        })
    }
}

#[cfg(test)]
mod tests;
