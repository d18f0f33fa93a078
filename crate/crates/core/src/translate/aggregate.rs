use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::TranslateError;
use crate::tagging::{SchemaTag, TaggedQuery, TypeTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AggregateFunc {
    Sum,
    Count,
    Avg,
}

impl AggregateFunc {
    pub fn as_str(self) -> &'static str {
        match self {
            AggregateFunc::Sum => "SUM",
            AggregateFunc::Count => "COUNT",
            AggregateFunc::Avg => "AVG",
        }
    }
}

impl fmt::Display for AggregateFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateLexicon {
    pub sum: BTreeSet<String>,
    pub count: BTreeSet<String>,
    pub avg: BTreeSet<String>,
}

fn lower_set<S: AsRef<str>>(words: impl IntoIterator<Item = S>) -> BTreeSet<String> {
    words.into_iter().map(|w| w.as_ref().to_lowercase()).collect()
}

impl AggregateLexicon {
    pub fn new<S: AsRef<str>>(
        sum: impl IntoIterator<Item = S>,
        count: impl IntoIterator<Item = S>,
        avg: impl IntoIterator<Item = S>,
    ) -> Self {
        AggregateLexicon {
            sum: lower_set(sum),
            count: lower_set(count),
            avg: lower_set(avg),
        }
    }

    /// Function signalled by `word`, checking SUM, COUNT, AVG in that order.
    pub fn classify(&self, word: &str) -> Option<AggregateFunc> {
        let w = word.to_lowercase();
        if self.sum.contains(&w) {
            Some(AggregateFunc::Sum)
        } else if self.count.contains(&w) {
            Some(AggregateFunc::Count)
        } else if self.avg.contains(&w) {
            Some(AggregateFunc::Avg)
        } else {
            None
        }
    }
}

impl Default for AggregateLexicon {
    fn default() -> Self {
        AggregateLexicon::new(
            ["total", "sum"],
            ["many", "count", "number"],
            ["average", "avg", "mean"],
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AggregateClause {
    pub func: AggregateFunc,
    pub anchor_index: usize,
    pub anchor_token: String,
    pub anchor_type: TypeTag,
    pub anchor_schema: SchemaTag,
    pub keyword: String,
    pub keyword_index: usize,
    pub window: usize,
}

pub const DEFAULT_PREV_WINDOW: usize = 3;

/// First table or attribute token preceded, within `prev_window` tokens, by an
/// aggregate keyword.
pub fn extract_aggregate_clause(
    query: &TaggedQuery,
    prev_window: usize,
    lexicon: &AggregateLexicon,
) -> Result<Option<AggregateClause>, TranslateError> {
    if prev_window == 0 {
        return Err(TranslateError::InvalidWindow);
    }
    for (i, ty) in query.type_tags.iter().enumerate() {
        if !ty.is_relation() {
            continue;
        }
        for j in i.saturating_sub(prev_window)..i {
            if let Some(func) = lexicon.classify(&query.tokens[j]) {
                return Ok(Some(AggregateClause {
                    func,
                    anchor_index: i,
                    anchor_token: query.tokens[i].clone(),
                    anchor_type: *ty,
                    anchor_schema: query.schema_tags[i].clone(),
                    keyword: query.tokens[j].clone(),
                    keyword_index: j,
                    window: prev_window,
                }));
            }
        }
    }
    Ok(None)
}
