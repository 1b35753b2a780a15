use super::{DistAccess, DistExpr, EstimandError};
use crate::admg::{Assignment, VarSet};
use crate::table::{PmfTable, TableError};

/// The table of `e` over its scope with every read variable fixed by
/// `fixed`.
pub fn full_table_expr(e: &DistExpr, p: &dyn DistAccess, fixed: &Assignment) -> Result<PmfTable, EstimandError> {
    let reads = e.reads();
    if !reads.is_subset(fixed.domain()) {
        return Err(EstimandError::ScopeMismatch {
            got: fixed.domain(),
            expected: reads,
        });
    }
    let env = fixed.restrict(reads);
    Ok(marginal_table(e, e.scope(), p, &env)?.with_context(env))
}

/// `Σ_{scope ∖ keep} e` as a table over `keep` plus every read variable that
/// `env` leaves unassigned. `keep` must lie in the scope of `e`.
///
/// Marginals are pushed down the tree, so a base distribution is only ever
/// asked for the small marginals each conditional needs.
pub fn marginal_table(
    e: &DistExpr,
    keep: VarSet,
    p: &dyn DistAccess,
    env: &Assignment,
) -> Result<PmfTable, EstimandError> {
    match e {
        DistExpr::Base { .. } => p.marginal(keep),
        DistExpr::Marginal { child, .. } => marginal_table(child, keep, p, &without(env, child.scope())),
        DistExpr::ChainProduct { child, over, factors } => {
            let child_env = without(env, child.scope());
            let mut acc: Option<PmfTable> = None;
            for f in factors {
                let t = marginal_table(child, f.given.with(f.var), p, &child_env)?;
                let pin = env.restrict(f.given.difference(*over));
                let num = t.restrict(&pin);
                let den = num.marginalize(num.scope().difference(VarSet::singleton(f.var)));
                let cond = num.divide(&den).map_err(|e| match e {
                    TableError::ZeroDivision(at) => {
                        let mut event = Assignment::from_pairs(at).merged(&pin);
                        event = event.restrict(f.given);
                        EstimandError::ZeroConditioningEvent(event.iter().collect())
                    }
                    other => other.into(),
                })?;
                acc = Some(match acc {
                    None => cond,
                    Some(a) => a.product(&cond)?,
                });
            }
            let full = acc.unwrap_or_else(|| PmfTable::new(VarSet::EMPTY, &[], vec![1.0]).expect("scalar table"));
            Ok(full.marginalize(keep.union(full.scope().difference(*over))))
        }
        DistExpr::Product { children } => {
            let scope = e.scope();
            let inner = without(env, scope);
            let mut acc = PmfTable::new(VarSet::EMPTY, &[], vec![1.0]).expect("scalar table");
            for c in children {
                acc = acc.product(&marginal_table(c, c.scope(), p, &inner)?)?;
            }
            Ok(acc.marginalize(keep.union(acc.scope().difference(scope))))
        }
    }
}

fn without(env: &Assignment, vars: VarSet) -> Assignment {
    env.restrict(env.domain().difference(vars))
}
