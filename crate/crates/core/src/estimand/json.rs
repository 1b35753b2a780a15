use serde::{Deserialize, Serialize};

use super::{render, DistExpr, Estimand, EstimandError, Factor, Style};
use crate::admg::{VarId, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDoc {
    pub var: String,
    pub given: Vec<String>,
}

/// JSON mirror of [`DistExpr`] with variables named.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExprDoc {
    Base { vars: Vec<String> },
    Marginal { drop: Vec<String>, child: Box<ExprDoc> },
    ChainProduct { factors: Vec<FactorDoc>, child: Box<ExprDoc> },
    Product { children: Vec<ExprDoc> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimandDoc {
    pub targets: Vec<String>,
    pub intervened: Vec<String>,
    #[serde(default)]
    pub arbitrary: Vec<String>,
    /// rendered formula; informational, ignored when reading
    #[serde(default)]
    pub formula: String,
    #[serde(default)]
    pub latex: String,
    pub expr: ExprDoc,
}

fn names_of(s: VarSet, names: &[String]) -> Vec<String> {
    s.iter().map(|v| names[v.0].clone()).collect()
}

fn set_of(list: &[String], names: &[String]) -> Result<VarSet, EstimandError> {
    list.iter()
        .map(|n| {
            names
                .iter()
                .position(|m| m == n)
                .map(VarId)
                .ok_or_else(|| EstimandError::Malformed(format!("unknown variable `{n}`")))
        })
        .collect()
}

impl ExprDoc {
    pub fn from_expr(e: &DistExpr, names: &[String]) -> Self {
        match e {
            DistExpr::Base { vars } => ExprDoc::Base {
                vars: names_of(*vars, names),
            },
            DistExpr::Marginal { child, drop } => ExprDoc::Marginal {
                drop: names_of(*drop, names),
                child: Box::new(ExprDoc::from_expr(child, names)),
            },
            DistExpr::ChainProduct { child, factors, .. } => ExprDoc::ChainProduct {
                factors: factors
                    .iter()
                    .map(|f| FactorDoc {
                        var: names[f.var.0].clone(),
                        given: names_of(f.given, names),
                    })
                    .collect(),
                child: Box::new(ExprDoc::from_expr(child, names)),
            },
            DistExpr::Product { children } => ExprDoc::Product {
                children: children.iter().map(|c| ExprDoc::from_expr(c, names)).collect(),
            },
        }
    }

    pub fn into_expr(&self, names: &[String]) -> Result<DistExpr, EstimandError> {
        let e = match self {
            ExprDoc::Base { vars } => DistExpr::Base {
                vars: set_of(vars, names)?,
            },
            ExprDoc::Marginal { drop, child } => DistExpr::Marginal {
                child: Box::new(child.into_expr(names)?),
                drop: set_of(drop, names)?,
            },
            ExprDoc::ChainProduct { factors, child } => {
                let factors = factors
                    .iter()
                    .map(|f| {
                        Ok(Factor {
                            var: set_of(std::slice::from_ref(&f.var), names)?.first().expect("one variable"),
                            given: set_of(&f.given, names)?,
                        })
                    })
                    .collect::<Result<Vec<_>, EstimandError>>()?;
                DistExpr::chain_product(child.into_expr(names)?, factors)
            }
            ExprDoc::Product { children } => DistExpr::Product {
                children: children.iter().map(|c| c.into_expr(names)).collect::<Result<_, _>>()?,
            },
        };
        e.validate()?;
        Ok(e)
    }
}

impl EstimandDoc {
    pub fn from_estimand(e: &Estimand, names: &[String]) -> Self {
        EstimandDoc {
            targets: names_of(e.targets, names),
            intervened: names_of(e.intervened, names),
            arbitrary: names_of(e.arbitrary, names),
            formula: render(&e.expr, names, Style::Text),
            latex: render(&e.expr, names, Style::Latex),
            expr: ExprDoc::from_expr(&e.expr, names),
        }
    }

    pub fn into_estimand(&self, names: &[String]) -> Result<Estimand, EstimandError> {
        let e = Estimand {
            expr: self.expr.into_expr(names)?,
            targets: set_of(&self.targets, names)?,
            intervened: set_of(&self.intervened, names)?,
            arbitrary: set_of(&self.arbitrary, names)?,
        };
        if e.expr.scope() != e.targets || !e.expr.reads().is_subset(e.intervened.union(e.arbitrary)) {
            return Err(EstimandError::Malformed("expression scope or reads disagree with the query".into()));
        }
        Ok(e)
    }
}
