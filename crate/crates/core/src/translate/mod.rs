//! Tagged query to SQL: table collection, join-path inference, WHERE and
//! aggregate extraction, assembly and part-by-part explanation.

mod aggregate;
mod join;
mod sql;
mod tables;
mod where_clause;

use serde::Serialize;
use thiserror::Error;

use crate::schema_graph::{GraphError, Schema, SchemaGraph};
use crate::tagging::TaggedQuery;

pub use aggregate::{
    extract_aggregate_clause, AggregateClause, AggregateFunc, AggregateLexicon, DEFAULT_PREV_WINDOW,
};
pub use join::{derive_join_conditions, extract_join_relation, JoinCondition, JoinPlan};
pub use sql::{
    assemble_sql, explain_sql, quote_literal, render_sql, AggregateReason, FromReason,
    PartExplanation, Provenance, SelectClause, SqlQuery, WhereReason,
};
pub use tables::{collect_table_set, TableSet};
pub use where_clause::{
    extract_where_conditions, merge_consecutive_mappings, Operator, OperatorLexicon, WhereCondition,
};

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("no token maps to a table, attribute or value")]
    Untranslatable,
    #[error("table `{0}` is not in the schema")]
    UnknownTable(String),
    #[error("no join path reaches {}", .unreachable.join(", "))]
    NoJoinPath { unreachable: Vec<String> },
    #[error("malformed join path {0}")]
    MalformedPath(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("inconsistent SQL parts: {0}")]
    Inconsistent(String),
    #[error("no provenance recorded for {0}")]
    MissingProvenance(String),
    #[error("aggregate look-back window must be at least 1")]
    InvalidWindow,
}

/// Pipeline stage a translation failure is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    CollectTableSet,
    ExtractJoinRelation,
    ExtractWhereConditions,
    ExtractAggregateClause,
    AssembleSql,
    ExplainSql,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::CollectTableSet => "collect_table_set",
            Stage::ExtractJoinRelation => "extract_join_relation",
            Stage::ExtractWhereConditions => "extract_where_conditions",
            Stage::ExtractAggregateClause => "extract_aggregate_clause",
            Stage::AssembleSql => "assemble_sql",
            Stage::ExplainSql => "explain_sql",
        }
    }
}

#[derive(Debug, Error)]
#[error("{}: {error}", .stage.as_str())]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub error: TranslateError,
}

#[derive(Debug, Clone)]
pub struct TranslateOptions {
    pub prev_window: usize,
    pub aggregates: AggregateLexicon,
    /// Comparison operators from condition words; `None` keeps every value predicate an equality.
    pub operators: Option<OperatorLexicon>,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            prev_window: DEFAULT_PREV_WINDOW,
            aggregates: AggregateLexicon::default(),
            operators: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Translation {
    pub tables: TableSet,
    pub plan: JoinPlan,
    pub query: SqlQuery,
    pub sql: String,
    pub explanations: Vec<PartExplanation>,
}

/// Runs every translation stage over an already tagged query.
pub fn translate(
    query: &TaggedQuery,
    schema: &Schema,
    graph: &SchemaGraph,
    opts: &TranslateOptions,
) -> Result<Translation, StageError> {
    let at = |stage| move |error| StageError { stage, error };
    let tables = collect_table_set(query, schema).map_err(at(Stage::CollectTableSet))?;
    let plan = JoinPlan::build(graph, &tables).map_err(at(Stage::ExtractJoinRelation))?;
    let merged = merge_consecutive_mappings(query);
    let mut values = extract_where_conditions(&merged, opts.operators.as_ref());
    // Spans refer to the unmerged tokens so explanations cite original positions.
    let spans = extract_where_conditions(query, opts.operators.as_ref());
    if spans.len() != values.len() {
        return Err(at(Stage::ExtractWhereConditions)(TranslateError::Inconsistent(
            "merging changed the number of value predicates".into(),
        )));
    }
    for (v, s) in values.iter_mut().zip(spans) {
        v.tokens = s.tokens;
    }
    let agg = extract_aggregate_clause(query, opts.prev_window, &opts.aggregates)
        .map_err(at(Stage::ExtractAggregateClause))?;
    let sql_query =
        assemble_sql(query, &tables, &plan, values, agg).map_err(at(Stage::AssembleSql))?;
    let explanations = explain_sql(&sql_query).map_err(at(Stage::ExplainSql))?;
    Ok(Translation {
        sql: render_sql(&sql_query),
        tables,
        plan,
        query: sql_query,
        explanations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhereJson {
    pub kind: &'static str,
    pub column: String,
    pub op: String,
    pub literal: Option<String>,
    pub left: Option<String>,
    pub right: Option<String>,
}

/// Wire shape of a successful translation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationJson {
    pub sql: String,
    pub select: String,
    pub from: Vec<String>,
    #[serde(rename = "where")]
    pub where_: Vec<WhereJson>,
    pub aggregate: Option<AggregateClause>,
    pub explanations: Vec<PartExplanation>,
    pub join_path_nodes: Vec<String>,
}

impl Translation {
    pub fn to_json(&self) -> TranslationJson {
        let q = &self.query;
        let joins = q.joins.iter().map(|j| WhereJson {
            kind: "join",
            column: j.attribute.clone(),
            op: "=".into(),
            literal: None,
            left: Some(j.left()),
            right: Some(j.right()),
        });
        let values = q.values.iter().map(|v| WhereJson {
            kind: "value",
            column: v.column.to_string(),
            op: v.operator.as_str().into(),
            literal: Some(v.literal.clone()),
            left: None,
            right: None,
        });
        TranslationJson {
            sql: self.sql.clone(),
            select: q.select.render(),
            from: q.from.clone(),
            where_: joins.chain(values).collect(),
            aggregate: q.aggregate.clone(),
            explanations: self.explanations.clone(),
            join_path_nodes: self.plan.path_nodes(),
        }
    }
}
