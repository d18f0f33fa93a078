//! DOT and JSON renderings of the schema graph with optional highlighting.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::graph::{GraphPath, NodeKind, SchemaGraph};
use super::GraphError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown export format `{other}` (expected dot or json)")),
        }
    }
}

/// Node ids and undirected edges to flag in an export.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Highlight {
    pub nodes: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
}

fn edge_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl Highlight {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: impl Into<String>) {
        self.nodes.insert(id.into());
    }

    pub fn add_edge(&mut self, a: &str, b: &str) {
        self.edges.insert(edge_key(a, b));
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.edges.contains(&edge_key(a, b))
    }

    pub fn edges(&self) -> impl Iterator<Item = &(String, String)> {
        self.edges.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    /// Every node and edge lying on one of the paths.
    pub fn from_paths<'a>(paths: impl IntoIterator<Item = &'a GraphPath>) -> Self {
        let mut h = Highlight::new();
        for p in paths {
            for n in &p.nodes {
                h.add_node(n.clone());
            }
            for (a, b) in p.edges() {
                h.add_edge(a, b);
            }
        }
        h
    }

    fn check(&self, graph: &SchemaGraph) -> Result<(), GraphError> {
        for n in &self.nodes {
            if graph.node(n).is_none() {
                return Err(GraphError::UnknownHighlight(n.clone()));
            }
        }
        for (a, b) in &self.edges {
            if !graph.adjacent(a, b) {
                return Err(GraphError::UnknownHighlight(format!("{a} -- {b}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonNode {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    pub highlight: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonEdge {
    pub a: String,
    pub b: String,
    pub highlight: bool,
}

/// Wire shape of the graph JSON export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub nodes: Vec<JsonNode>,
    pub edges: Vec<JsonEdge>,
}

impl GraphJson {
    pub fn build(graph: &SchemaGraph, highlight: &Highlight) -> Result<Self, GraphError> {
        highlight.check(graph)?;
        let nodes = graph
            .nodes()
            .map(|n| JsonNode {
                id: n.id.clone(),
                kind: n.kind,
                label: n.label.clone(),
                highlight: highlight.nodes.contains(&n.id),
            })
            .collect();
        let edges = graph
            .edges()
            .map(|(a, b)| JsonEdge {
                a: a.to_string(),
                b: b.to_string(),
                highlight: highlight.has_edge(a, b),
            })
            .collect();
        Ok(GraphJson { nodes, edges })
    }

    /// Rebuilds the graph structure (nodes and edges only).
    pub fn to_graph(&self) -> Result<SchemaGraph, GraphError> {
        let mut g = SchemaGraph::new();
        for n in &self.nodes {
            let id = g.add_node(n.kind, &n.label);
            if id != n.id {
                return Err(GraphError::MalformedExport(format!(
                    "node id `{}` does not match its kind and label",
                    n.id
                )));
            }
        }
        for e in &self.edges {
            g.add_edge(&e.a, &e.b)?;
        }
        Ok(g)
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn export_graph(
    graph: &SchemaGraph,
    highlight: &Highlight,
    format: ExportFormat,
) -> Result<String, GraphError> {
    match format {
        ExportFormat::Json => {
            let doc = GraphJson::build(graph, highlight)?;
            Ok(serde_json::to_string_pretty(&doc).expect("graph json serializes"))
        }
        ExportFormat::Dot => {
            highlight.check(graph)?;
            let mut out = String::from("graph schema {\n");
            for n in graph.nodes() {
                let shape = match n.kind {
                    NodeKind::Table => "box",
                    NodeKind::Attr => "ellipse",
                };
                let _ = write!(
                    out,
                    "  {} [label={}, shape={shape}",
                    dot_quote(&n.id),
                    dot_quote(&n.label)
                );
                if highlight.nodes.contains(&n.id) {
                    out.push_str(", color=\"blue\"");
                }
                out.push_str("];\n");
            }
            for (a, b) in graph.edges() {
                let _ = write!(out, "  {} -- {}", dot_quote(a), dot_quote(b));
                if highlight.has_edge(a, b) {
                    out.push_str(" [color=\"blue\"]");
                }
                out.push_str(";\n");
            }
            out.push_str("}\n");
            Ok(out)
        }
    }
}

/// Parses a JSON export back into a graph.
pub fn parse_graph_json(text: &str) -> Result<SchemaGraph, GraphError> {
    let doc: GraphJson =
        serde_json::from_str(text).map_err(|e| GraphError::MalformedExport(e.to_string()))?;
    doc.to_graph()
}
