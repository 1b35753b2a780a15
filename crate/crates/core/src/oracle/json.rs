use serde::{Deserialize, Serialize};

use super::{CausalBayesNet, Node, OracleError};

/// One node of the network document. `cpt` holds one row per parent
/// configuration, the first listed parent varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub name: String,
    pub cardinality: usize,
    #[serde(default)]
    pub hidden: bool,
    #[serde(default)]
    pub parents: Vec<String>,
    pub cpt: Vec<Vec<f64>>,
}

/// The causal Bayes net interchange document:
///
/// ```json
/// { "nodes": [
///     {"name": "U", "cardinality": 2, "hidden": true, "cpt": [[0.5, 0.5]]},
///     {"name": "X", "cardinality": 2, "parents": ["U"], "cpt": [[0.9, 0.1], [0.2, 0.8]]}
/// ] }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CbnDoc {
    pub nodes: Vec<NodeDoc>,
}

impl CbnDoc {
    pub fn into_net(self) -> Result<CausalBayesNet, OracleError> {
        let names: Vec<String> = self.nodes.iter().map(|n| n.name.clone()).collect();
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for nd in self.nodes {
            let parents = nd
                .parents
                .iter()
                .map(|p| {
                    names.iter().position(|n| n == p).ok_or_else(|| OracleError::UnknownParent {
                        node: nd.name.clone(),
                        parent: p.clone(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(r) = nd.cpt.iter().position(|row| row.len() != nd.cardinality) {
                return Err(OracleError::BadCpt {
                    node: nd.name.clone(),
                    reason: format!("row {r} has {} entries, expected {}", nd.cpt[r].len(), nd.cardinality),
                });
            }
            nodes.push(Node {
                name: nd.name,
                cardinality: nd.cardinality,
                hidden: nd.hidden,
                parents,
                cpt: nd.cpt.into_iter().flatten().collect(),
            });
        }
        CausalBayesNet::new(nodes)
    }

    pub fn from_net(net: &CausalBayesNet) -> Self {
        let all = net.nodes();
        CbnDoc {
            nodes: all
                .iter()
                .map(|nd| NodeDoc {
                    name: nd.name.clone(),
                    cardinality: nd.cardinality,
                    hidden: nd.hidden,
                    parents: nd.parents.iter().map(|&p| all[p].name.clone()).collect(),
                    cpt: nd.cpt.chunks(nd.cardinality).map(|r| r.to_vec()).collect(),
                })
                .collect(),
        }
    }
}

impl CausalBayesNet {
    pub fn from_json(text: &str) -> Result<CausalBayesNet, OracleError> {
        let doc: CbnDoc = serde_json::from_str(text).map_err(|e| OracleError::Malformed(e.to_string()))?;
        doc.into_net()
    }

    pub fn to_json(&self) -> String {
        crate::jsonfmt::to_string_pretty(&CbnDoc::from_net(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"nodes":[
            {"name":"U","cardinality":2,"hidden":true,"cpt":[[0.5,0.5]]},
            {"name":"X","cardinality":2,"parents":["U"],"cpt":[[0.9,0.1],[0.2,0.8]]},
            {"name":"Y","cardinality":3,"parents":["X","U"],
             "cpt":[[0.2,0.3,0.5],[1,0,0],[0,1,0],[0.1,0.1,0.8]]}]}"#;
        let net = CausalBayesNet::from_json(text).unwrap();
        assert_eq!(net.observable_names(), &["X".to_string(), "Y".to_string()]);
        assert_eq!(net.nodes()[2].row(3), &[0.1, 0.1, 0.8]);
        assert_eq!(CausalBayesNet::from_json(&net.to_json()).unwrap(), net);
    }

    #[test]
    fn rejects() {
        let unknown = r#"{"nodes":[{"name":"X","cardinality":2,"parents":["Q"],"cpt":[[0.5,0.5]]}]}"#;
        assert!(matches!(CausalBayesNet::from_json(unknown), Err(OracleError::UnknownParent { .. })));
        let ragged = r#"{"nodes":[{"name":"X","cardinality":2,"cpt":[[1.0]]}]}"#;
        assert!(matches!(CausalBayesNet::from_json(ragged), Err(OracleError::BadCpt { .. })));
    }
}
