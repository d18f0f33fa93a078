//! Join-path inference over the schema graph.

use std::collections::BTreeSet;

use serde::Serialize;

use super::tables::TableSet;
use super::TranslateError;
use crate::schema_graph::{table_id, GraphPath, NodeKind, SchemaGraph};

/// Equality join between two tables through a shared attribute node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct JoinCondition {
    pub left_table: String,
    pub left_column: String,
    pub right_table: String,
    pub right_column: String,
    /// Label of the attribute node the join passes through.
    pub attribute: String,
}

impl JoinCondition {
    pub fn left(&self) -> String {
        format!("{}.{}", self.left_table, self.left_column)
    }

    pub fn right(&self) -> String {
        format!("{}.{}", self.right_table, self.right_column)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JoinPlan {
    pub paths: Vec<GraphPath>,
    pub conditions: Vec<JoinCondition>,
    /// Tables on the paths that are not in the requested table set.
    pub intermediate_tables: Vec<String>,
}

impl JoinPlan {
    pub fn build(graph: &SchemaGraph, tables: &TableSet) -> Result<Self, TranslateError> {
        let paths = extract_join_relation(graph, tables)?;
        let conditions = derive_join_conditions(graph, &paths)?;
        let mut intermediate_tables: Vec<String> = Vec::new();
        for p in &paths {
            for id in p.tables(graph) {
                let label = graph.label(id).unwrap_or_default();
                if !tables.contains(label) && !intermediate_tables.iter().any(|t| t == label) {
                    intermediate_tables.push(label.to_string());
                }
            }
        }
        Ok(JoinPlan {
            paths,
            conditions,
            intermediate_tables,
        })
    }

    /// Distinct node ids over all paths, in path order.
    pub fn path_nodes(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.paths
            .iter()
            .flat_map(|p| p.nodes.iter())
            .filter(|n| seen.insert(n.as_str()))
            .cloned()
            .collect()
    }

    /// Table labels over all paths, in path order.
    pub fn path_tables(&self, graph: &SchemaGraph) -> Vec<String> {
        self.path_nodes()
            .into_iter()
            .filter(|n| graph.kind(n) == Some(NodeKind::Table))
            .filter_map(|n| graph.label(&n).map(str::to_string))
            .collect()
    }
}

fn reachable(graph: &SchemaGraph, from: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::from([from.to_string()]);
    let mut stack = vec![from.to_string()];
    while let Some(u) = stack.pop() {
        for v in graph.neighbors(&u) {
            if seen.insert(v.to_string()) {
                stack.push(v.to_string());
            }
        }
    }
    seen
}

/// Shortest join paths connecting every table of `tables`.
///
/// Every ordered pair is tried; a shortest path that already passes through
/// all tables is returned alone. Otherwise the path missing the fewest tables
/// becomes the candidate (the shorter path on ties, then the first found),
/// and for each table it misses, a shortest
/// path from the candidate's first table is appended. Among the shortest
/// patch paths the one picking up the most other missing tables is used.
pub fn extract_join_relation(
    graph: &SchemaGraph,
    tables: &TableSet,
) -> Result<Vec<GraphPath>, TranslateError> {
    let ids: Vec<String> = tables.iter().map(table_id).collect();
    for (id, name) in ids.iter().zip(tables.iter()) {
        if graph.kind(id) != Some(NodeKind::Table) {
            return Err(TranslateError::UnknownTable(name.to_string()));
        }
    }
    let Some(first) = ids.first() else {
        return Err(TranslateError::Untranslatable);
    };
    if ids.len() == 1 {
        return Ok(vec![GraphPath {
            nodes: vec![first.clone()],
        }]);
    }
    let reach = reachable(graph, first);
    let unreachable: Vec<String> = tables
        .iter()
        .zip(&ids)
        .filter(|(_, id)| !reach.contains(*id))
        .map(|(t, _)| t.to_string())
        .collect();
    if !unreachable.is_empty() {
        return Err(TranslateError::NoJoinPath { unreachable });
    }

    let mut candidate: Option<(GraphPath, Vec<String>)> = None;
    for a in &ids {
        for b in &ids {
            if a == b {
                continue;
            }
            for p in graph.find_shortest_paths(a, b)? {
                let missing: Vec<String> = ids.iter().filter(|t| !p.contains(t)).cloned().collect();
                if missing.is_empty() {
                    return Ok(vec![p]);
                }
                let better = candidate
                    .as_ref()
                    .is_none_or(|(c, m)| (missing.len(), p.len()) < (m.len(), c.len()));
                if better {
                    candidate = Some((p, missing));
                }
            }
        }
    }
    let (path, mut pending) = candidate.expect("connected pairs yield at least one path");
    let root = path.nodes[0].clone();
    let mut out = vec![path];
    while let Some(target) = pending.first().cloned() {
        let patches = graph.find_shortest_paths(&root, &target)?;
        let best = patches
            .into_iter()
            .enumerate()
            .max_by_key(|(i, p)| {
                let covered = pending.iter().filter(|t| p.contains(t)).count();
                (covered, std::cmp::Reverse(*i))
            })
            .map(|(_, p)| p)
            .expect("target is reachable");
        pending.retain(|t| !best.contains(t));
        if !out.contains(&best) {
            out.push(best);
        }
    }
    Ok(out)
}

fn check_path(graph: &SchemaGraph, path: &GraphPath) -> Result<(), TranslateError> {
    let malformed = |why: &str| TranslateError::MalformedPath(format!("{:?}: {why}", path.nodes));
    let (Some(first), Some(last)) = (path.nodes.first(), path.nodes.last()) else {
        return Err(malformed("empty path"));
    };
    if graph.kind(first) != Some(NodeKind::Table) || graph.kind(last) != Some(NodeKind::Table) {
        return Err(malformed("endpoints must be tables"));
    }
    for (a, b) in path.edges() {
        if graph.kind(a).is_none() || graph.kind(b).is_none() {
            return Err(malformed("unknown node"));
        }
        if graph.kind(a) == graph.kind(b) {
            return Err(malformed("node kinds must alternate"));
        }
        if !graph.adjacent(a, b) {
            return Err(malformed("consecutive nodes are not adjacent"));
        }
    }
    Ok(())
}

/// One equality condition per (table, attribute, table) step of the paths,
/// oriented as the path runs. A step joining the same two tables through the
/// same attribute as an earlier one, in either direction, is skipped.
pub fn derive_join_conditions(
    graph: &SchemaGraph,
    paths: &[GraphPath],
) -> Result<Vec<JoinCondition>, TranslateError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in paths {
        check_path(graph, p)?;
        for w in p.nodes.windows(3).step_by(2) {
            let label = |id: &str| graph.label(id).unwrap_or_default().to_string();
            let (left, attr, right) = (label(&w[0]), label(&w[1]), label(&w[2]));
            let key = if left <= right {
                (left.clone(), right.clone(), attr.clone())
            } else {
                (right.clone(), left.clone(), attr.clone())
            };
            if left == right || !seen.insert(key) {
                continue;
            }
            out.push(JoinCondition {
                left_column: graph.column_for(&left, &attr),
                right_column: graph.column_for(&right, &attr),
                left_table: left,
                right_table: right,
                attribute: attr,
            });
        }
    }
    Ok(out)
}
