use serde::{Deserialize, Serialize};

use super::{Admg, AdmgError};

/// One declared variable of the ADMG document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDoc {
    pub name: String,
    pub cardinality: usize,
}

/// An edge given as a `[from, to]` pair of names.
pub type EdgeDoc = [String; 2];

/// The ADMG interchange document:
///
/// ```json
/// { "vars": [{"name": "X", "cardinality": 2}, ...],
///   "directed": [["X", "Y"]],
///   "bidirected": [["X", "Y"]] }
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmgDoc {
    pub vars: Vec<VarDoc>,
    #[serde(default)]
    pub directed: Vec<EdgeDoc>,
    #[serde(default)]
    pub bidirected: Vec<EdgeDoc>,
}

impl AdmgDoc {
    pub fn into_admg(self) -> Result<Admg, AdmgError> {
        let names: Vec<&str> = self.vars.iter().map(|v| v.name.as_str()).collect();
        let idx = |s: &str| {
            names
                .iter()
                .position(|n| *n == s)
                .ok_or_else(|| AdmgError::UnknownVariable(s.to_string()))
        };
        let directed = self
            .directed
            .iter()
            .map(|[a, b]| Ok((idx(a)?, idx(b)?)))
            .collect::<Result<Vec<_>, AdmgError>>()?;
        let bidirected = self
            .bidirected
            .iter()
            .map(|[a, b]| Ok((idx(a)?, idx(b)?)))
            .collect::<Result<Vec<_>, AdmgError>>()?;
        let vars = self
            .vars
            .iter()
            .map(|v| (v.name.clone(), v.cardinality))
            .collect();
        Admg::new(vars, &directed, &bidirected)
    }

    pub fn from_admg(g: &Admg) -> Self {
        let pair = |(a, b): (super::VarId, super::VarId)| [g.name(a).to_string(), g.name(b).to_string()];
        AdmgDoc {
            vars: g
                .names()
                .iter()
                .zip(g.cardinalities())
                .map(|(n, c)| VarDoc {
                    name: n.clone(),
                    cardinality: *c,
                })
                .collect(),
            directed: g.directed_edges().into_iter().map(pair).collect(),
            bidirected: g.bidirected_edges().into_iter().map(pair).collect(),
        }
    }
}

impl Admg {
    pub fn from_json(text: &str) -> Result<Admg, AdmgError> {
        let doc: AdmgDoc = serde_json::from_str(text).map_err(|e| AdmgError::Malformed(e.to_string()))?;
        doc.into_admg()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&AdmgDoc::from_admg(self)).expect("ADMG document serializes")
    }
}
