use super::{DistAccess, DistExpr, EstimandError};
use crate::admg::{Assignment, ConfigIter, Symbol, VarId, VarSet, MAX_VARS};
use crate::table::pairwise_sum;

/// Pointwise value of `e` at an assignment covering its scope and reads.
///
/// Sums are enumerated term by term, so the cost is exponential in the
/// number of summed variables. This is the reference route; use
/// [`full_table_expr`](super::full_table_expr) for whole tables.
pub fn evaluate_expr(e: &DistExpr, p: &dyn DistAccess, a: &Assignment) -> Result<f64, EstimandError> {
    let need = e.scope().union(e.reads());
    if !need.is_subset(a.domain()) {
        return Err(EstimandError::ScopeMismatch {
            got: a.domain(),
            expected: need,
        });
    }
    let mut buf = a.to_dense(MAX_VARS);
    eval(e, p, &mut buf)
}

fn eval(e: &DistExpr, p: &dyn DistAccess, buf: &mut [Symbol]) -> Result<f64, EstimandError> {
    match e {
        DistExpr::Base { .. } => p.point(buf),
        DistExpr::Marginal { child, drop } => sum_over(child, *drop, p, buf),
        DistExpr::ChainProduct { child, factors, .. } => {
            let cs = child.scope();
            let mut prod = 1.0;
            for f in factors {
                let den = sum_over(child, cs.difference(f.given), p, buf)?;
                if den == 0.0 {
                    let at = f.given.iter().map(|v| (v, buf[v.0])).collect();
                    return Err(EstimandError::ZeroConditioningEvent(at));
                }
                let num = sum_over(child, cs.difference(f.given.with(f.var)), p, buf)?;
                prod *= num / den;
            }
            Ok(prod)
        }
        DistExpr::Product { children } => {
            let mut prod = 1.0;
            for c in children {
                prod *= eval(c, p, buf)?;
            }
            Ok(prod)
        }
    }
}

/// `Σ_vars e`, with the summed values written into `buf` and restored after.
fn sum_over(e: &DistExpr, vars: VarSet, p: &dyn DistAccess, buf: &mut [Symbol]) -> Result<f64, EstimandError> {
    if vars.is_empty() {
        return eval(e, p, buf);
    }
    let list: Vec<VarId> = vars.to_vec();
    let cards: Vec<usize> = {
        let mut c = vec![1; MAX_VARS];
        for v in &list {
            c[v.0] = p.cardinality(*v);
        }
        c
    };
    let saved: Vec<Symbol> = list.iter().map(|v| buf[v.0]).collect();
    let mut terms = Vec::new();
    for cfg in ConfigIter::new(&list, &cards) {
        for (v, s) in list.iter().zip(&cfg) {
            buf[v.0] = *s;
        }
        terms.push(eval(e, p, buf)?);
    }
    for (v, s) in list.iter().zip(saved) {
        buf[v.0] = s;
    }
    Ok(pairwise_sum(&terms))
}
