use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{GraphError, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Table,
    Attr,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
}

pub fn table_id(name: &str) -> String {
    format!("table:{name}")
}

pub fn attr_id(name: &str) -> String {
    format!("attr:{name}")
}

/// An alternating table/attribute walk through the schema graph, starting and
/// ending on table nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphPath {
    pub nodes: Vec<String>,
}

impl GraphPath {
    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.iter().any(|n| n == id)
    }

    /// Table node ids on the path, in order.
    pub fn tables<'a>(&'a self, graph: &'a SchemaGraph) -> impl Iterator<Item = &'a str> + 'a {
        self.nodes
            .iter()
            .filter(move |n| graph.kind(n) == Some(NodeKind::Table))
            .map(String::as_str)
    }

    /// Consecutive undirected edges along the path.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.nodes.windows(2).map(|w| (w[0].as_str(), w[1].as_str()))
    }
}

/// Undirected bipartite graph of table and attribute nodes.
///
/// Same-named columns share one attribute node, so two tables are joinable
/// through an attribute node whenever both have a column of that name. An
/// explicit foreign key between differently named columns adds an extra edge
/// from the referenced column's node to the referencing table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaGraph {
    nodes: BTreeMap<String, GraphNode>,
    adjacency: BTreeMap<String, BTreeSet<String>>,
    /// Local column name for edges whose attribute label differs from the
    /// table's own column (foreign-key relaxation). Keyed by (table, attribute) labels.
    edge_columns: BTreeMap<(String, String), String>,
    /// Tables declaring the attribute as their primary key.
    key_owners: BTreeMap<String, BTreeSet<String>>,
}

impl SchemaGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, kind: NodeKind, label: &str) -> String {
        let id = match kind {
            NodeKind::Table => table_id(label),
            NodeKind::Attr => attr_id(label),
        };
        self.nodes.entry(id.clone()).or_insert_with(|| GraphNode {
            id: id.clone(),
            kind,
            label: label.to_string(),
        });
        self.adjacency.entry(id.clone()).or_default();
        id
    }

    /// Adds an undirected edge. Both endpoints must exist and be of different kinds.
    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<(), GraphError> {
        let ka = self.kind(a).ok_or_else(|| GraphError::UnknownNode(a.to_string()))?;
        let kb = self.kind(b).ok_or_else(|| GraphError::UnknownNode(b.to_string()))?;
        if ka == kb {
            return Err(GraphError::NotBipartite(a.to_string(), b.to_string()));
        }
        self.adjacency.get_mut(a).expect("node exists").insert(b.to_string());
        self.adjacency.get_mut(b).expect("node exists").insert(a.to_string());
        Ok(())
    }

    pub fn node(&self, id: &str) -> Option<&GraphNode> {
        self.nodes.get(id)
    }

    pub fn kind(&self, id: &str) -> Option<NodeKind> {
        self.nodes.get(id).map(|n| n.kind)
    }

    pub fn label(&self, id: &str) -> Option<&str> {
        self.nodes.get(id).map(|n| n.label.as_str())
    }

    pub fn nodes(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.values()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Each undirected edge once, as (table id, attribute id).
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.adjacency.iter().flat_map(move |(a, ns)| {
            ns.iter()
                .filter(move |_| self.kind(a) == Some(NodeKind::Table))
                .map(move |b| (a.as_str(), b.as_str()))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, id: &str) -> impl Iterator<Item = &str> {
        self.adjacency
            .get(id)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    pub fn adjacent(&self, a: &str, b: &str) -> bool {
        self.adjacency.get(a).is_some_and(|s| s.contains(b))
    }

    /// Column of `table` that realises its edge to attribute node `attr`.
    pub fn column_for(&self, table: &str, attr: &str) -> String {
        self.edge_columns
            .get(&(table.to_string(), attr.to_string()))
            .cloned()
            .unwrap_or_else(|| attr.to_string())
    }

    pub fn key_owners(&self, attr: &str) -> impl Iterator<Item = &str> {
        self.key_owners
            .get(attr)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    /// Checks the bipartite and symmetry invariants.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        for (a, ns) in &self.adjacency {
            for b in ns {
                if a == b || self.kind(a) == self.kind(b) {
                    return Err(GraphError::NotBipartite(a.clone(), b.clone()));
                }
                if !self.adjacent(b, a) {
                    return Err(GraphError::Asymmetric(a.clone(), b.clone()));
                }
            }
        }
        Ok(())
    }

    fn require_table(&self, id: &str) -> Result<(), GraphError> {
        match self.kind(id) {
            None => Err(GraphError::UnknownNode(id.to_string())),
            Some(NodeKind::Attr) => Err(GraphError::NotATable(id.to_string())),
            Some(NodeKind::Table) => Ok(()),
        }
    }

    fn sort_key(&self, path: &GraphPath) -> Vec<String> {
        path.nodes
            .iter()
            .map(|n| self.label(n).unwrap_or_default().to_string())
            .collect()
    }

    /// All minimum-length paths between two table nodes.
    ///
    /// Edges have unit weight, so a BFS layering from `from` yields the
    /// predecessor DAG of all shortest paths; every root-to-`to` walk of that
    /// DAG is expanded. Output is ordered by node-label sequence, then ids.
    pub fn find_shortest_paths(&self, from: &str, to: &str) -> Result<Vec<GraphPath>, GraphError> {
        self.require_table(from)?;
        self.require_table(to)?;
        if from == to {
            return Ok(vec![GraphPath {
                nodes: vec![from.to_string()],
            }]);
        }

        let mut dist: BTreeMap<&str, usize> = BTreeMap::new();
        let mut preds: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        dist.insert(from, 0);
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if dist.get(to).is_some_and(|&dt| du >= dt) {
                break;
            }
            for v in self.neighbors(u) {
                match dist.get(v) {
                    None => {
                        dist.insert(v, du + 1);
                        preds.entry(v).or_default().push(u);
                        queue.push_back(v);
                    }
                    Some(&dv) if dv == du + 1 => preds.entry(v).or_default().push(u),
                    _ => {}
                }
            }
        }
        if !dist.contains_key(to) {
            return Ok(Vec::new());
        }

        let mut out = Vec::new();
        let mut stack = vec![to];
        self.expand(&preds, from, &mut stack, &mut out);
        let mut keyed: Vec<_> = out.into_iter().map(|p| (self.sort_key(&p), p)).collect();
        keyed.sort();
        keyed.dedup_by(|a, b| a.1 == b.1);
        Ok(keyed.into_iter().map(|(_, p)| p).collect())
    }

    fn expand<'a>(
        &self,
        preds: &BTreeMap<&'a str, Vec<&'a str>>,
        root: &str,
        stack: &mut Vec<&'a str>,
        out: &mut Vec<GraphPath>,
    ) {
        let last = *stack.last().expect("non-empty");
        if last == root {
            out.push(GraphPath {
                nodes: stack.iter().rev().map(|s| s.to_string()).collect(),
            });
            return;
        }
        for &p in preds.get(last).map(Vec::as_slice).unwrap_or_default() {
            stack.push(p);
            self.expand(preds, root, stack, out);
            stack.pop();
        }
    }
}

/// Builds the schema graph: one table node per table, one attribute node per
/// distinct column name, plus foreign-key edges for differently named key pairs.
pub fn extract_graph(schema: &Schema) -> SchemaGraph {
    let mut g = SchemaGraph::new();
    for table in &schema.tables {
        let t = g.add_node(NodeKind::Table, &table.name);
        for col in &table.columns {
            let a = g.add_node(NodeKind::Attr, &col.name);
            g.add_edge(&t, &a).expect("table-attribute edge is bipartite");
            if col.is_primary_key {
                g.key_owners
                    .entry(col.name.clone())
                    .or_default()
                    .insert(table.name.clone());
            }
        }
    }
    for fk in &schema.foreign_keys {
        if fk.column == fk.ref_column || fk.table == fk.ref_table {
            continue;
        }
        let t = table_id(&fk.table);
        let a = attr_id(&fk.ref_column);
        if g.adjacent(&t, &a) {
            continue;
        }
        g.add_edge(&t, &a).expect("table-attribute edge is bipartite");
        g.edge_columns
            .insert((fk.table.clone(), fk.ref_column.clone()), fk.column.clone());
    }
    debug_assert!(g.check_invariants().is_ok());
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema_graph::load_schema;

    fn schema(src: &str) -> Schema {
        load_schema(src).unwrap()
    }

    #[test]
    fn single_table_counts() {
        let s = schema(
            r#"{"name": "x", "tables": [{"name": "t", "columns": [
            {"name": "a", "type": "text"}, {"name": "b", "type": "integer"}]}]}"#,
        );
        let g = extract_graph(&s);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn identity_path() {
        let s = schema(r#"{"name": "x", "tables": [{"name": "t"}]}"#);
        let g = extract_graph(&s);
        let p = g.find_shortest_paths("table:t", "table:t").unwrap();
        assert_eq!(p, vec![GraphPath { nodes: vec!["table:t".into()] }]);
    }

    #[test]
    fn unknown_and_non_table_nodes() {
        let s = schema(
            r#"{"name": "x", "tables": [{"name": "t", "columns": [{"name": "a", "type": "text"}]}]}"#,
        );
        let g = extract_graph(&s);
        assert!(matches!(
            g.find_shortest_paths("table:zz", "table:t"),
            Err(GraphError::UnknownNode(_))
        ));
        assert!(matches!(
            g.find_shortest_paths("attr:a", "table:t"),
            Err(GraphError::NotATable(_))
        ));
    }

    #[test]
    fn disconnected_tables_have_no_path() {
        let s = schema(r#"{"name": "x", "tables": [{"name": "a"}, {"name": "b"}]}"#);
        let g = extract_graph(&s);
        assert!(g.find_shortest_paths("table:a", "table:b").unwrap().is_empty());
    }

    #[test]
    fn fk_with_different_names_adds_edge() {
        let s = schema(
            r#"{"name": "x", "tables": [
            {"name": "company", "columns": [{"name": "cid", "type": "integer", "pk": true}]},
            {"name": "movie", "columns": [{"name": "studio_id", "type": "integer"}]}],
            "foreign_keys": [{"table": "movie", "column": "studio_id", "ref_table": "company", "ref_column": "cid"}]}"#,
        );
        let g = extract_graph(&s);
        assert!(g.adjacent("table:movie", "attr:cid"));
        assert_eq!(g.column_for("movie", "cid"), "studio_id");
        assert_eq!(g.column_for("company", "cid"), "cid");
        let paths = g.find_shortest_paths("table:movie", "table:company").unwrap();
        assert_eq!(paths[0].nodes, vec!["table:movie", "attr:cid", "table:company"]);
        g.check_invariants().unwrap();
    }

    #[test]
    fn multiple_shortest_paths_are_sorted() {
        let s = schema(
            r#"{"name": "x", "tables": [
            {"name": "a", "columns": [{"name": "p", "type": "integer"}, {"name": "q", "type": "integer"}]},
            {"name": "b", "columns": [{"name": "q", "type": "integer"}, {"name": "p", "type": "integer"}]}]}"#,
        );
        let g = extract_graph(&s);
        let paths = g.find_shortest_paths("table:a", "table:b").unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].nodes[1], "attr:p");
        assert_eq!(paths[1].nodes[1], "attr:q");
    }
}
