//! Structured SQL, its rendering and per-part provenance.

use std::fmt::Write as _;

use serde::Serialize;

use super::aggregate::{AggregateClause, AggregateFunc};
use super::join::{JoinCondition, JoinPlan};
use super::tables::TableSet;
use super::where_clause::WhereCondition;
use super::TranslateError;
use crate::tagging::{TaggedQuery, TypeTag};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectClause {
    Star,
    Aggregate {
        func: AggregateFunc,
        /// `table.column`, or `None` for `COUNT(*)`.
        column: Option<String>,
    },
}

impl SelectClause {
    pub fn render(&self) -> String {
        match self {
            SelectClause::Star => "*".into(),
            SelectClause::Aggregate { func, column: None } => format!("{func}(*)"),
            SelectClause::Aggregate {
                func,
                column: Some(c),
            } => format!("{func}({c})"),
        }
    }
}

/// Why a table is in the FROM clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FromReason {
    MappedFromToken {
        token: String,
        index: usize,
        type_tag: TypeTag,
    },
    TableOfMappedAttribute {
        tokens: String,
        index: usize,
        column: String,
    },
    RequiredIntermediate {
        connects: Vec<String>,
    },
}

/// Why a conjunct is in the WHERE clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WhereReason {
    JoinCondition {
        left_table: String,
        right_table: String,
        attribute: String,
    },
    ValueDetected {
        literal: String,
        first_token: usize,
        last_token: usize,
        column: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AggregateReason {
    pub func: AggregateFunc,
    pub keyword: String,
    pub window: usize,
    pub anchor: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub from: Vec<(String, FromReason)>,
    pub joins: Vec<WhereReason>,
    pub values: Vec<WhereReason>,
    pub aggregate: Option<AggregateReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqlQuery {
    pub select: SelectClause,
    pub from: Vec<String>,
    pub joins: Vec<JoinCondition>,
    pub values: Vec<WhereCondition>,
    pub aggregate: Option<AggregateClause>,
    pub provenance: Provenance,
}

/// Double-quoted SQL string literal with `\` and `"` backslash-escaped.
pub fn quote_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

impl SqlQuery {
    /// Rendered WHERE conjuncts without the enclosing parentheses: joins first, then values.
    pub fn conjuncts(&self) -> Vec<String> {
        let joins = self
            .joins
            .iter()
            .map(|j| format!("{} = {}", j.left(), j.right()));
        let values = self
            .values
            .iter()
            .map(|v| format!("{} {} {}", v.column, v.operator, quote_literal(&v.literal)));
        joins.chain(values).collect()
    }
}

pub fn render_sql(q: &SqlQuery) -> String {
    let mut out = format!("SELECT {} FROM {}", q.select.render(), q.from.join(", "));
    let conj = q.conjuncts();
    if !conj.is_empty() {
        out.push_str(" WHERE ");
        for (i, c) in conj.iter().enumerate() {
            if i > 0 {
                out.push_str(" AND ");
            }
            let _ = write!(out, "({c})");
        }
    }
    out
}

fn neighbours_in_joins(table: &str, joins: &[JoinCondition]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for j in joins {
        let other = if j.left_table == table {
            &j.right_table
        } else if j.right_table == table {
            &j.left_table
        } else {
            continue;
        };
        if !out.contains(other) {
            out.push(other.clone());
        }
    }
    out
}

/// Assembles the query and records a reason for every part.
pub fn assemble_sql(
    query: &TaggedQuery,
    tables: &TableSet,
    plan: &JoinPlan,
    values: Vec<WhereCondition>,
    aggregate: Option<AggregateClause>,
) -> Result<SqlQuery, TranslateError> {
    let mut from: Vec<String> = tables.as_slice().to_vec();
    for t in &plan.intermediate_tables {
        if !from.contains(t) {
            from.push(t.clone());
        }
    }
    for j in &plan.conditions {
        for t in [&j.left_table, &j.right_table] {
            if !from.contains(t) {
                return Err(TranslateError::Inconsistent(format!(
                    "join condition names table `{t}` outside FROM"
                )));
            }
        }
    }
    for v in &values {
        let t = v.column.table_name().unwrap_or_default();
        if !from.iter().any(|f| f == t) {
            return Err(TranslateError::Inconsistent(format!(
                "value predicate on `{}` names a table outside FROM",
                v.column
            )));
        }
    }

    let mut prov = Provenance::default();
    for t in &from {
        let mapped = query
            .type_tags
            .iter()
            .zip(&query.schema_tags)
            .position(|(ty, tag)| ty.is_table() && tag.as_str() == t);
        let via_column = query.type_tags.iter().zip(&query.schema_tags).position(|(ty, tag)| {
            (ty.is_attr() || *ty == TypeTag::Value) && tag.table_name() == Some(t.as_str())
        });
        let reason = if let Some(i) = mapped {
            FromReason::MappedFromToken {
                token: query.tokens[i].clone(),
                index: i,
                type_tag: query.type_tags[i],
            }
        } else if let Some(i) = via_column {
            let tag = &query.schema_tags[i];
            let mut end = i + 1;
            while end < query.len()
                && query.type_tags[end] == query.type_tags[i]
                && query.schema_tags[end] == *tag
            {
                end += 1;
            }
            FromReason::TableOfMappedAttribute {
                tokens: query.tokens[i..end].join(" "),
                index: i,
                column: tag.column_name().unwrap_or_default().to_string(),
            }
        } else {
            FromReason::RequiredIntermediate {
                connects: neighbours_in_joins(t, &plan.conditions),
            }
        };
        prov.from.push((t.clone(), reason));
    }
    prov.joins = plan
        .conditions
        .iter()
        .map(|j| WhereReason::JoinCondition {
            left_table: j.left_table.clone(),
            right_table: j.right_table.clone(),
            attribute: j.attribute.clone(),
        })
        .collect();
    prov.values = values
        .iter()
        .map(|v| WhereReason::ValueDetected {
            literal: v.literal.clone(),
            first_token: v.tokens.start,
            last_token: v.tokens.end - 1,
            column: v.column.to_string(),
        })
        .collect();

    let select = match &aggregate {
        None => SelectClause::Star,
        Some(a) if a.anchor_type.is_table() => SelectClause::Aggregate {
            func: a.func,
            column: None,
        },
        Some(a) => SelectClause::Aggregate {
            func: a.func,
            column: Some(a.anchor_schema.to_string()),
        },
    };
    prov.aggregate = aggregate.as_ref().map(|a| AggregateReason {
        func: a.func,
        keyword: a.keyword.clone(),
        window: a.window,
        anchor: a.anchor_token.clone(),
    });

    Ok(SqlQuery {
        select,
        from,
        joins: plan.conditions.clone(),
        values,
        aggregate,
        provenance: prov,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartExplanation {
    pub part: String,
    pub reason: String,
}

fn quoted_list(names: &[String]) -> String {
    let q: Vec<String> = names.iter().map(|n| format!("'{n}'")).collect();
    match q.len() {
        0 => String::new(),
        1 => q[0].clone(),
        n => format!("{} and {}", q[..n - 1].join(", "), q[n - 1]),
    }
}

fn from_text(table: &str, reason: &FromReason) -> String {
    match reason {
        FromReason::MappedFromToken { token, type_tag, .. } => {
            format!("table '{table}' is mapped from token '{token}' ({type_tag})")
        }
        FromReason::TableOfMappedAttribute { tokens, column, .. } => {
            format!("'{table}' table is included because token(s) '{tokens}' map to its '{column}' attribute")
        }
        FromReason::RequiredIntermediate { connects } => {
            format!("required table to connect {} through join", quoted_list(connects))
        }
    }
}

fn where_text(reason: &WhereReason) -> String {
    match reason {
        WhereReason::JoinCondition {
            left_table,
            right_table,
            attribute,
        } => format!(
            "join condition connecting '{left_table}' and '{right_table}' through attribute '{attribute}'"
        ),
        WhereReason::ValueDetected {
            literal,
            first_token,
            last_token,
            column,
        } => {
            let span = if first_token == last_token {
                format!("token {}", first_token + 1)
            } else {
                format!("tokens {}-{}", first_token + 1, last_token + 1)
            };
            format!("value '{literal}' detected in {span} for column {column}")
        }
    }
}

/// One human-readable reason per FROM table, WHERE conjunct and aggregate.
pub fn explain_sql(q: &SqlQuery) -> Result<Vec<PartExplanation>, TranslateError> {
    let prov = &q.provenance;
    let mut out = Vec::new();
    if let Some(agg) = &q.aggregate {
        let r = prov
            .aggregate
            .as_ref()
            .ok_or_else(|| TranslateError::MissingProvenance("aggregate".into()))?;
        out.push(PartExplanation {
            part: format!("SELECT {}", q.select.render()),
            reason: format!(
                "{} aggregate detected from keyword '{}' within {} tokens before '{}'",
                agg.func, r.keyword, r.window, r.anchor
            ),
        });
    }
    for t in &q.from {
        let reason = prov
            .from
            .iter()
            .find(|(name, _)| name == t)
            .map(|(_, r)| r)
            .ok_or_else(|| TranslateError::MissingProvenance(format!("FROM {t}")))?;
        out.push(PartExplanation {
            part: format!("FROM {t}"),
            reason: from_text(t, reason),
        });
    }
    let conj = q.conjuncts();
    if prov.joins.len() != q.joins.len() || prov.values.len() != q.values.len() {
        return Err(TranslateError::MissingProvenance("WHERE".into()));
    }
    for (c, r) in conj.iter().zip(prov.joins.iter().chain(&prov.values)) {
        out.push(PartExplanation {
            part: format!("WHERE {c}"),
            reason: where_text(r),
        });
    }
    Ok(out)
}
