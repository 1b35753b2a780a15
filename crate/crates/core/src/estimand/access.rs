use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::EstimandError;
use crate::admg::{Symbol, VarId, VarSet};
use crate::samples::SampleSet;
use crate::table::PmfTable;

/// Read access to a distribution over a fixed set of variables.
pub trait DistAccess: Sync {
    fn scope(&self) -> VarSet;

    fn cardinality(&self, v: VarId) -> usize;

    /// The marginal over `keep ⊆ scope`.
    fn marginal(&self, keep: VarSet) -> Result<PmfTable, EstimandError>;

    /// Probability of the full-scope configuration read from a dense
    /// host-indexed value vector.
    fn point(&self, values: &[Symbol]) -> Result<f64, EstimandError>;
}

impl DistAccess for PmfTable {
    fn scope(&self) -> VarSet {
        PmfTable::scope(self)
    }

    fn cardinality(&self, v: VarId) -> usize {
        let i = self.vars().iter().position(|u| *u == v).expect("variable in table scope");
        self.cards()[i]
    }

    fn marginal(&self, keep: VarSet) -> Result<PmfTable, EstimandError> {
        Ok(self.marginalize(keep))
    }

    fn point(&self, values: &[Symbol]) -> Result<f64, EstimandError> {
        Ok(self.get_dense(values))
    }
}

/// The empirical distribution of a sample batch. Marginals are counted on
/// demand and cached.
pub struct EmpiricalAccess<'a> {
    samples: &'a SampleSet,
    cards: Vec<usize>,
    scope: VarSet,
    cache: Mutex<HashMap<VarSet, PmfTable>>,
    full: OnceLock<PmfTable>,
}

impl<'a> EmpiricalAccess<'a> {
    /// `cards` gives the cardinality of every sample column.
    pub fn new(samples: &'a SampleSet, cards: &[usize]) -> Self {
        EmpiricalAccess {
            samples,
            cards: cards.to_vec(),
            scope: VarSet::full(samples.n_vars()),
            cache: Mutex::new(HashMap::new()),
            full: OnceLock::new(),
        }
    }

    pub fn samples(&self) -> &SampleSet {
        self.samples
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    /// Raw joint counts over `vars`.
    pub fn counts(&self, vars: VarSet) -> Result<Vec<u64>, EstimandError> {
        Ok(self.samples.counts(vars, &self.cards)?)
    }
}

impl DistAccess for EmpiricalAccess<'_> {
    fn scope(&self) -> VarSet {
        self.scope
    }

    fn cardinality(&self, v: VarId) -> usize {
        self.cards[v.0]
    }

    fn marginal(&self, keep: VarSet) -> Result<PmfTable, EstimandError> {
        if let Some(t) = self.cache.lock().expect("cache lock").get(&keep) {
            return Ok(t.clone());
        }
        let t = self.samples.empirical(keep, &self.cards)?;
        self.cache.lock().expect("cache lock").insert(keep, t.clone());
        Ok(t)
    }

    fn point(&self, values: &[Symbol]) -> Result<f64, EstimandError> {
        if self.full.get().is_none() {
            let t = self.samples.empirical(self.scope, &self.cards)?;
            let _ = self.full.set(t);
        }
        Ok(self.full.get().expect("initialized above").get_dense(values))
    }
}
