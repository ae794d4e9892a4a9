//! JSON graph documents.
//!
//! ```text
//! {
//!   "name": "g",
//!   "nodes": [
//!     {"id": 0, "def_size": 1},
//!     {"id": 1, "def_size": 2, "label": "add"}
//!   ],
//!   "data_edges": [
//!     [0, 1]
//!   ],
//!   "order_edges": []
//! }
//! ```
//!
//! Node ids in a document may be any distinct non-negative integers; they are
//! renumbered densely in document order on ingestion. Writers always emit dense
//! ids, one node or edge per line.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::CorpusError;
use crate::graph::{DepGraph, GraphError, Node, NodeId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: u64,
    pub def_size: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub name: String,
    pub nodes: Vec<NodeDoc>,
    pub data_edges: Vec<[u64; 2]>,
    pub order_edges: Vec<[u64; 2]>,
}

impl GraphDocument {
    pub fn parse(bytes: &[u8]) -> Result<Self, CorpusError> {
        serde_json::from_slice(bytes).map_err(|e| CorpusError::Parse { line: e.line(), reason: e.to_string() })
    }

    pub fn from_graph(graph: &DepGraph) -> Self {
        let pair = |&(a, b): &(NodeId, NodeId)| [a.0 as u64, b.0 as u64];
        GraphDocument {
            name: graph.name().to_string(),
            nodes: graph
                .nodes()
                .iter()
                .map(|n| NodeDoc { id: n.id.0 as u64, def_size: n.def_size, label: n.label.clone() })
                .collect(),
            data_edges: graph.data_edges().iter().map(pair).collect(),
            order_edges: graph.order_edges().iter().map(pair).collect(),
        }
    }

    /// Densifies ids and validates the result.
    pub fn into_graph(self) -> Result<DepGraph, CorpusError> {
        let mut dense: HashMap<u64, NodeId> = HashMap::with_capacity(self.nodes.len());
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (position, doc) in self.nodes.into_iter().enumerate() {
            let id = NodeId::from_index(position);
            if dense.insert(doc.id, id).is_some() {
                return Err(CorpusError::Parse { line: 0, reason: format!("duplicate node id {}", doc.id) });
            }
            nodes.push(Node { id, def_size: doc.def_size, label: doc.label });
        }
        let map_edges = |edges: Vec<[u64; 2]>| -> Result<Vec<(NodeId, NodeId)>, CorpusError> {
            edges
                .into_iter()
                .map(|[a, b]| {
                    let look = |x: u64| dense.get(&x).copied().ok_or(GraphError::DanglingNode { id: x });
                    Ok((look(a)?, look(b)?))
                })
                .collect()
        };
        let data = map_edges(self.data_edges)?;
        let order = map_edges(self.order_edges)?;
        Ok(DepGraph::new(nodes, data, order)?.with_name(self.name))
    }

    /// Line-oriented rendering: one node or edge per line.
    pub fn to_text(&self) -> String {
        fn list<T: Serialize>(out: &mut String, key: &str, items: &[T], last: bool) {
            out.push_str(&format!("  \"{key}\": ["));
            if items.is_empty() {
                out.push(']');
            } else {
                out.push('\n');
                for (i, item) in items.iter().enumerate() {
                    out.push_str("    ");
                    out.push_str(&to_compact(item));
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str("  ]");
            }
            out.push_str(if last { "\n" } else { ",\n" });
        }
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"name\": {},\n", serde_json::to_string(&self.name).unwrap()));
        list(&mut out, "nodes", &self.nodes, false);
        list(&mut out, "data_edges", &self.data_edges, false);
        list(&mut out, "order_edges", &self.order_edges, true);
        out.push_str("}\n");
        out
    }
}

// serde_json's compact form without spaces is hard to read; add one after ':' and ','.
fn to_compact<T: Serialize>(item: &T) -> String {
    let raw = serde_json::to_string(item).unwrap();
    let mut out = String::with_capacity(raw.len() + 8);
    let mut in_str = false;
    let mut escaped = false;
    for ch in raw.chars() {
        out.push(ch);
        if in_str {
            match (escaped, ch) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_str = false,
                _ => {}
            }
        } else if ch == '"' {
            in_str = true;
        } else if ch == ':' || ch == ',' {
            out.push(' ');
        }
    }
    out
}

/// Parses and validates a graph document.
pub fn read_graph(bytes: &[u8]) -> Result<DepGraph, CorpusError> {
    GraphDocument::parse(bytes)?.into_graph()
}

pub fn write_graph(graph: &DepGraph) -> Vec<u8> {
    GraphDocument::from_graph(graph).to_text().into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_chain() {
        let doc = br#"{"name": "c", "nodes": [{"id": 0, "def_size": 1}, {"id": 1, "def_size": 1}, {"id": 2, "def_size": 1}],
                       "data_edges": [[0, 1], [1, 2]], "order_edges": []}"#;
        let g = read_graph(doc).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.name(), "c");
        let expected = DepGraph::from_sizes(&[1, 1, 1], &[(0, 1), (1, 2)], &[]).unwrap();
        assert_eq!(g, expected);
    }

    #[test]
    fn self_edge_is_cycle() {
        let doc = br#"{"name": "s", "nodes": [{"id": 0, "def_size": 1}], "data_edges": [[0, 0]], "order_edges": []}"#;
        assert!(matches!(read_graph(doc), Err(CorpusError::Graph(GraphError::CycleDetected { .. }))));
    }

    #[test]
    fn missing_def_size_names_field() {
        let doc = b"{\"name\": \"s\",\n \"nodes\": [{\"id\": 0}],\n \"data_edges\": [], \"order_edges\": []}";
        match read_graph(doc) {
            Err(CorpusError::Parse { line, reason }) => {
                assert!(reason.contains("def_size"), "{reason}");
                assert_eq!(line, 2);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn sparse_ids_are_densified_in_document_order() {
        let doc = br#"{"name": "x", "nodes": [{"id": 40, "def_size": 2}, {"id": 7, "def_size": 1, "label": "v"}],
                       "data_edges": [[40, 7]], "order_edges": []}"#;
        let g = read_graph(doc).unwrap();
        assert_eq!(g.def_size(NodeId(0)), 2);
        assert_eq!(g.node(NodeId(1)).label.as_deref(), Some("v"));
        assert_eq!(g.data_edges(), &[(NodeId(0), NodeId(1))]);
    }

    #[test]
    fn unknown_edge_endpoint() {
        let doc = br#"{"name": "x", "nodes": [{"id": 0, "def_size": 1}], "data_edges": [[0, 3]], "order_edges": []}"#;
        assert!(matches!(read_graph(doc), Err(CorpusError::Graph(GraphError::DanglingNode { id: 3 }))));
    }

    #[test]
    fn duplicate_node_id() {
        let doc = br#"{"name": "x", "nodes": [{"id": 0, "def_size": 1}, {"id": 0, "def_size": 1}], "data_edges": [], "order_edges": []}"#;
        assert!(matches!(read_graph(doc), Err(CorpusError::Parse { .. })));
    }

    #[test]
    fn empty_graph_text() {
        let g = DepGraph::from_sizes(&[], &[], &[]).unwrap();
        let text = String::from_utf8(write_graph(&g)).unwrap();
        assert_eq!(text, "{\n  \"name\": \"\",\n  \"nodes\": [],\n  \"data_edges\": [],\n  \"order_edges\": []\n}\n");
        assert_eq!(read_graph(text.as_bytes()).unwrap(), g);
    }

    #[test]
    fn diamond_text_round_trip() {
        let g = DepGraph::from_sizes(&[1, 2, 1, 1], &[(0, 1), (0, 2), (1, 3), (2, 3)], &[(1, 2)])
            .unwrap()
            .with_name("dia\"mond");
        let text = String::from_utf8(write_graph(&g)).unwrap();
        assert!(text.contains("    {\"id\": 1, \"def_size\": 2},\n"));
        assert!(text.contains("    [0, 1],\n"));
        let back = read_graph(text.as_bytes()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.name(), "dia\"mond");
    }
}
