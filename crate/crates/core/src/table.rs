//! Dense probability tables over small ordered variable sets.
//!
//! A [`PmfTable`] stores one `f64` per joint configuration of its variables,
//! row-major with the variables in ascending index order (the last variable
//! varies fastest). Besides normalized distributions the same type carries the
//! unnormalized intermediates of table algebra: products, ratios and
//! marginals.

use thiserror::Error;

use crate::admg::{Assignment, ConfigIter, Symbol, VarId, VarSet};

/// Largest number of cells any table or enumeration may have.
pub const STATE_CEILING: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableError {
    #[error("table scopes differ: {left:?} vs {right:?}")]
    ScopeMismatch { left: Vec<VarId>, right: Vec<VarId> },
    #[error("state space of {0} cells exceeds the ceiling of {STATE_CEILING}")]
    StateSpaceTooLarge(u128),
    #[error("table has {got} entries, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("division by a zero-mass event {0:?}")]
    ZeroDivision(Vec<(VarId, Symbol)>),
}

/// Number of joint states of `vars`, or an error beyond [`STATE_CEILING`].
pub fn state_count(vars: VarSet, host_cards: &[usize]) -> Result<usize, TableError> {
    let mut total: u128 = 1;
    for v in vars.iter() {
        total = total.saturating_mul(host_cards[v.0] as u128);
        if total > STATE_CEILING as u128 {
            return Err(TableError::StateSpaceTooLarge(total));
        }
    }
    Ok(total as usize)
}

/// Pairwise (tree) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    vars: Vec<VarId>,
    cards: Vec<usize>,
    strides: Vec<usize>,
    probs: Vec<f64>,
    context: Assignment,
}

fn strides_for(cards: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * cards[i + 1];
    }
    strides
}

impl PmfTable {
    /// A table over `vars` with the given cell values.
    pub fn new(vars: VarSet, host_cards: &[usize], probs: Vec<f64>) -> Result<Self, TableError> {
        let expected = state_count(vars, host_cards)?;
        if probs.len() != expected {
            return Err(TableError::WrongLength {
                got: probs.len(),
                expected,
            });
        }
        let vars_vec = vars.to_vec();
        let cards: Vec<usize> = vars_vec.iter().map(|v| host_cards[v.0]).collect();
        Ok(PmfTable {
            strides: strides_for(&cards),
            vars: vars_vec,
            cards,
            probs,
            context: Assignment::empty(),
        })
    }

    pub fn zeros(vars: VarSet, host_cards: &[usize]) -> Result<Self, TableError> {
        let n = state_count(vars, host_cards)?;
        PmfTable::new(vars, host_cards, vec![0.0; n])
    }

    /// The uniform distribution over `vars`.
    pub fn uniform(vars: VarSet, host_cards: &[usize]) -> Result<Self, TableError> {
        let n = state_count(vars, host_cards)?;
        PmfTable::new(vars, host_cards, vec![1.0 / n as f64; n])
    }

    /// Attaches the assignment this table is conditioned on or intervened at.
    pub fn with_context(mut self, context: Assignment) -> Self {
        self.context = context;
        self
    }

    pub fn context(&self) -> &Assignment {
        &self.context
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn scope(&self) -> VarSet {
        self.vars.iter().collect()
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn probs_mut(&mut self) -> &mut [f64] {
        &mut self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Cell index of a configuration read from a dense per-host-variable
    /// value vector.
    #[inline]
    pub fn index_dense(&self, values: &[Symbol]) -> usize {
        self.vars
            .iter()
            .zip(&self.strides)
            .map(|(v, s)| values[v.0] as usize * s)
            .sum()
    }

    /// Value at a configuration read from a dense value vector.
    #[inline]
    pub fn get_dense(&self, values: &[Symbol]) -> f64 {
        self.probs[self.index_dense(values)]
    }

    /// Value at an assignment covering the table's variables.
    pub fn get(&self, a: &Assignment) -> Option<f64> {
        let mut idx = 0;
        for (v, s) in self.vars.iter().zip(&self.strides) {
            idx += a.get(*v)? as usize * s;
        }
        Some(self.probs[idx])
    }

    /// Configuration (over `vars()`, in order) of a cell index.
    pub fn config_of(&self, mut index: usize) -> Vec<Symbol> {
        let mut out = vec![0; self.vars.len()];
        for (o, &s) in out.iter_mut().zip(&self.strides) {
            *o = (index / s) as Symbol;
            index %= s;
        }
        out
    }

    /// Assignment of a cell index.
    pub fn assignment_of(&self, index: usize) -> Assignment {
        Assignment::from_pairs(self.vars.iter().copied().zip(self.config_of(index)))
    }

    /// Iterates `(configuration, value)` pairs in cell order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<Symbol>, f64)> + '_ {
        (0..self.probs.len()).map(move |i| (self.config_of(i), self.probs[i]))
    }

    fn host_cards_sparse(&self) -> Vec<usize> {
        let n = self.vars.last().map_or(0, |v| v.0 + 1);
        let mut cards = vec![1; n];
        for (v, c) in self.vars.iter().zip(&self.cards) {
            cards[v.0] = *c;
        }
        cards
    }

    fn host_cards_dense(&self, other: &PmfTable) -> Vec<usize> {
        let n = self
            .vars
            .iter()
            .chain(&other.vars)
            .map(|v| v.0 + 1)
            .max()
            .unwrap_or(0);
        let mut cards = vec![1; n];
        for (v, c) in self.vars.iter().zip(&self.cards).chain(other.vars.iter().zip(&other.cards)) {
            cards[v.0] = *c;
        }
        cards
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.probs)
    }

    /// Sums out every variable not in `keep`.
    pub fn marginalize(&self, keep: VarSet) -> PmfTable {
        let keep = keep.intersection(self.scope());
        if keep == self.scope() {
            return self.clone();
        }
        let host = self.host_cards_sparse();
        let out_vars: Vec<VarId> = keep.to_vec();
        let sum_vars: Vec<VarId> = self.scope().difference(keep).to_vec();
        let stride_of = |v: VarId| self.strides[self.vars.iter().position(|u| *u == v).unwrap()];

        let offsets: Vec<usize> = ConfigIter::new(&sum_vars, &host)
            .map(|cfg| cfg.iter().zip(&sum_vars).map(|(s, v)| *s as usize * stride_of(*v)).sum())
            .collect();
        let mut buf = vec![0.0; offsets.len()];
        let mut out = Vec::with_capacity(self.probs.len() / offsets.len().max(1));
        for cfg in ConfigIter::new(&out_vars, &host) {
            let base: usize = cfg.iter().zip(&out_vars).map(|(s, v)| *s as usize * stride_of(*v)).sum();
            for (b, off) in buf.iter_mut().zip(&offsets) {
                *b = self.probs[base + off];
            }
            out.push(pairwise_sum(&buf));
        }
        PmfTable::new(keep, &host, out)
            .expect("marginal of a valid table is valid")
            .with_context(self.context.clone())
    }

    /// Fixes the variables assigned in `a`; the result is over the remaining
    /// variables.
    pub fn restrict(&self, a: &Assignment) -> PmfTable {
        let fixed = a.domain().intersection(self.scope());
        if fixed.is_empty() {
            return self.clone();
        }
        let host = self.host_cards_sparse();
        let rest = self.scope().difference(fixed);
        let base: usize = fixed
            .iter()
            .map(|v| a.get(v).unwrap() as usize * self.strides[self.vars.iter().position(|u| *u == v).unwrap()])
            .sum();
        let rest_vars = rest.to_vec();
        let out: Vec<f64> = ConfigIter::new(&rest_vars, &host)
            .map(|cfg| {
                let off: usize = cfg
                    .iter()
                    .zip(&rest_vars)
                    .map(|(s, v)| *s as usize * self.strides[self.vars.iter().position(|u| u == v).unwrap()])
                    .sum();
                self.probs[base + off]
            })
            .collect();
        PmfTable::new(rest, &host, out)
            .expect("restriction of a valid table is valid")
            .with_context(self.context.merged(&a.restrict(fixed)))
    }

    /// Pointwise product over the union of both scopes.
    pub fn product(&self, other: &PmfTable) -> Result<PmfTable, TableError> {
        self.combine(other, |a, b| Ok(a * b))
    }

    /// Pointwise ratio `self / other`, where `other`'s scope must be a subset
    /// of `self`'s. A zero denominator is an error.
    pub fn divide(&self, other: &PmfTable) -> Result<PmfTable, TableError> {
        if !other.scope().is_subset(self.scope()) {
            return Err(TableError::ScopeMismatch {
                left: self.vars.clone(),
                right: other.vars.clone(),
            });
        }
        self.combine(other, |a, b| if b == 0.0 { Err(()) } else { Ok(a / b) })
    }

    fn combine(
        &self,
        other: &PmfTable,
        op: impl Fn(f64, f64) -> Result<f64, ()>,
    ) -> Result<PmfTable, TableError> {
        let host = self.host_cards_dense(other);
        let scope = self.scope().union(other.scope());
        state_count(scope, &host)?;
        let out_vars = scope.to_vec();
        let stride_in = |t: &PmfTable, v: VarId| {
            t.vars
                .iter()
                .position(|u| *u == v)
                .map_or(0, |i| t.strides[i])
        };
        let sa: Vec<usize> = out_vars.iter().map(|v| stride_in(self, *v)).collect();
        let sb: Vec<usize> = out_vars.iter().map(|v| stride_in(other, *v)).collect();
        let mut out = Vec::new();
        for cfg in ConfigIter::new(&out_vars, &host) {
            let ia: usize = cfg.iter().zip(&sa).map(|(s, st)| *s as usize * st).sum();
            let ib: usize = cfg.iter().zip(&sb).map(|(s, st)| *s as usize * st).sum();
            match op(self.probs[ia], other.probs[ib]) {
                Ok(v) => out.push(v),
                Err(()) => {
                    let at = out_vars
                        .iter()
                        .copied()
                        .zip(cfg)
                        .filter(|(v, _)| other.scope().contains(*v))
                        .collect();
                    return Err(TableError::ZeroDivision(at));
                }
            }
        }
        Ok(PmfTable::new(scope, &host, out)?.with_context(self.context.merged(&other.context)))
    }

    /// Scales the table to total mass 1. A zero-mass table is returned as is.
    pub fn normalized(&self) -> PmfTable {
        let t = self.total();
        let mut out = self.clone();
        if t > 0.0 {
            out.probs.iter_mut().for_each(|p| *p /= t);
        }
        out
    }

    /// Largest absolute cell difference; the scopes must agree.
    pub fn max_abs_diff(&self, other: &PmfTable) -> Result<f64, TableError> {
        if self.vars != other.vars {
            return Err(TableError::ScopeMismatch {
                left: self.vars.clone(),
                right: other.vars.clone(),
            });
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}
