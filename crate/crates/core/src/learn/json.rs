use serde::{Deserialize, Serialize};

use super::{ConditionalTable, FactorKind, LearnError, LearnMeta, LearnedFactor, LearnedInterventional};
use crate::admg::{AdmgDoc, Assignment, Symbol, VarId, VarSet};
use crate::identify::InterventionDoc;

/// One learned conditional. `rows[r]` is the distribution of `target` at the
/// `r`-th configuration of `given`, the last listed variable varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnedFactorDoc {
    pub target: String,
    #[serde(flatten)]
    pub kind: FactorKind,
    pub given: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<Vec<u64>>>,
}

/// The learned-model document.
///
/// ```json
/// { "graph": {...}, "intervene": [{"var": "X", "value": 1}],
///   "order": ["Z1", "Z2", "Y"],
///   "factors": [{"target": "Z1", "kind": "q", "given": ["X"],
///                "rows": [[0.3, 0.7], [0.6, 0.4]], "counts": [[29, 69], [61, 40]]}, ...],
///   "metadata": {...} }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnedDoc {
    pub graph: AdmgDoc,
    pub intervene: Vec<InterventionDoc>,
    pub order: Vec<String>,
    pub factors: Vec<LearnedFactorDoc>,
    pub metadata: LearnMeta,
}

impl LearnedDoc {
    pub fn from_learned(li: &LearnedInterventional) -> Self {
        let g = li.graph();
        let name = |v: &VarId| g.name(*v).to_string();
        LearnedDoc {
            graph: AdmgDoc::from_admg(g),
            intervene: li
                .intervention()
                .iter()
                .map(|(v, s)| InterventionDoc {
                    var: name(&v),
                    value: s as usize,
                })
                .collect(),
            order: li.order().iter().map(name).collect(),
            factors: li
                .factors()
                .iter()
                .map(|f| {
                    let t = &f.table;
                    LearnedFactorDoc {
                        target: name(&t.target()),
                        kind: f.kind,
                        given: t.given().iter().map(name).collect(),
                        rows: t.rows().chunks(t.cardinality()).map(<[f64]>::to_vec).collect(),
                        counts: t
                            .counts()
                            .map(|c| c.chunks(t.cardinality()).map(<[u64]>::to_vec).collect()),
                    }
                })
                .collect(),
            metadata: li.meta().clone(),
        }
    }

    pub fn into_learned(self) -> Result<LearnedInterventional, LearnError> {
        let g = self.graph.into_admg().map_err(|e| LearnError::Malformed(e.to_string()))?;
        let lookup = |n: &str| {
            g.var(n)
                .ok_or_else(|| LearnError::Malformed(format!("unknown variable `{n}`")))
        };
        let mut x = Assignment::empty();
        for iv in &self.intervene {
            x.set(lookup(&iv.var)?, iv.value as Symbol);
        }
        let order = self
            .order
            .iter()
            .map(|n| lookup(n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in self.factors {
            let target = lookup(&f.target)?;
            let mut given = VarSet::EMPTY;
            for n in &f.given {
                given.insert(lookup(n)?);
            }
            if given.len() != f.given.len() || given.to_vec() != f.given.iter().map(|n| g.var(n).unwrap()).collect::<Vec<_>>() {
                return Err(LearnError::Malformed(format!(
                    "conditioning variables of `{}` must be distinct and in declaration order",
                    f.target
                )));
            }
            let rows = f.rows.concat();
            let counts = f.counts.map(|c| c.concat());
            let table = ConditionalTable::new(target, given, g.cardinalities(), rows, counts)
                .map_err(|e| LearnError::Malformed(format!("factor for `{}`: {e}", f.target)))?;
            factors.push(LearnedFactor { kind: f.kind, table });
        }
        LearnedInterventional::new(g, x, order, factors, self.metadata)
    }
}

impl LearnedInterventional {
    pub fn to_json(&self) -> String {
        crate::jsonfmt::to_string_pretty(&LearnedDoc::from_learned(self))
    }

    pub fn from_json(text: &str) -> Result<Self, LearnError> {
        let doc: LearnedDoc = serde_json::from_str(text).map_err(|e| LearnError::Malformed(e.to_string()))?;
        doc.into_learned()
    }
}
