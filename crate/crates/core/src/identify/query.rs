use serde::{Deserialize, Serialize};

use super::{CausalQuery, IdentifyError};
use crate::admg::{Admg, Assignment, Symbol, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterventionDoc {
    pub var: String,
    pub value: usize,
}

/// The query document:
///
/// ```json
/// { "intervene": [{"var": "X", "value": 1}], "targets": ["Y"] }
/// ```
///
/// Omitting `targets` asks for every non-intervened variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryDoc {
    #[serde(default)]
    pub intervene: Vec<InterventionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<String>>,
}

impl QueryDoc {
    pub fn into_query(&self, g: &Admg) -> Result<CausalQuery, IdentifyError> {
        let lookup = |name: &str| {
            g.var(name)
                .ok_or_else(|| IdentifyError::InvalidQuery(format!("unknown variable `{name}`")))
        };
        let mut x = Assignment::empty();
        for iv in &self.intervene {
            let v = lookup(&iv.var)?;
            if x.domain().contains(v) {
                return Err(IdentifyError::InvalidQuery(format!("`{}` intervened on twice", iv.var)));
            }
            if iv.value >= g.cardinality(v) {
                return Err(IdentifyError::InvalidQuery(format!(
                    "value {} of `{}` is outside 0..{}",
                    iv.value,
                    iv.var,
                    g.cardinality(v)
                )));
            }
            x.set(v, iv.value as Symbol);
        }
        let y = match &self.targets {
            Some(names) => names.iter().map(|n| lookup(n)).collect::<Result<VarSet, _>>()?,
            None => g.vars().difference(x.domain()),
        };
        CausalQuery::new(g.clone(), x, y)
    }

    pub fn from_query(q: &CausalQuery) -> Self {
        QueryDoc {
            intervene: q
                .x
                .iter()
                .map(|(v, s)| InterventionDoc {
                    var: q.graph.name(v).to_string(),
                    value: s as usize,
                })
                .collect(),
            targets: Some(q.y.iter().map(|v| q.graph.name(v).to_string()).collect()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, IdentifyError> {
        serde_json::from_str(text).map_err(|e| IdentifyError::InvalidQuery(format!("malformed query document: {e}")))
    }
}
