use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::tagging::{Distribution, SchemaTag, TaggedQuery, TypeTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
}

impl Operator {
    pub fn as_str(self) -> &'static str {
        match self {
            Operator::Eq => "=",
            Operator::Gt => ">",
            Operator::Lt => "<",
            Operator::Ge => ">=",
            Operator::Le => "<=",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Operator::Eq, Operator::Gt, Operator::Lt, Operator::Ge, Operator::Le]
            .into_iter()
            .find(|o| o.as_str() == s)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Phrases that turn a value predicate into a comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorLexicon(Vec<(String, Operator)>);

impl OperatorLexicon {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Operator)>,
        S: AsRef<str>,
    {
        OperatorLexicon(
            entries
                .into_iter()
                .map(|(p, o)| (p.as_ref().to_lowercase(), o))
                .collect(),
        )
    }

    pub fn lookup(&self, phrase: &str) -> Option<Operator> {
        let phrase = phrase.to_lowercase();
        self.0.iter().find(|(p, _)| *p == phrase).map(|(_, o)| *o)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, Operator)> {
        self.0.iter().map(|(p, o)| (p.as_str(), *o))
    }
}

impl Default for OperatorLexicon {
    fn default() -> Self {
        use Operator::*;
        OperatorLexicon::new([
            ("more than", Gt),
            ("greater than", Gt),
            ("more", Gt),
            ("greater", Gt),
            ("after", Gt),
            ("over", Gt),
            ("less than", Lt),
            ("fewer than", Lt),
            ("less", Lt),
            ("fewer", Lt),
            ("before", Lt),
            ("under", Lt),
            ("at least", Ge),
            ("at most", Le),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhereCondition {
    pub column: SchemaTag,
    pub operator: Operator,
    pub literal: String,
    /// Token positions of the value mention.
    pub tokens: Range<usize>,
    /// Condition words that set a non-equality operator.
    pub cond_phrase: Option<String>,
}

impl WhereCondition {
    /// The predicate without its source positions.
    pub fn key(&self) -> (&SchemaTag, Operator, &str) {
        (&self.column, self.operator, &self.literal)
    }
}

/// Collapses runs of consecutive `VALUE` tokens with the same schema tag into
/// a single space-joined token.
pub fn merge_consecutive_mappings(query: &TaggedQuery) -> TaggedQuery {
    let dists = query.distributions_or_point();
    let mut tokens = Vec::new();
    let mut types = Vec::new();
    let mut tags = Vec::new();
    let mut out_d: Vec<Distribution> = Vec::new();
    for (i, tok) in query.tokens.iter().enumerate() {
        let ty = query.type_tags[i];
        let tag = &query.schema_tags[i];
        if ty == TypeTag::Value && types.last() == Some(&TypeTag::Value) && tags.last() == Some(tag) {
            let last: &mut String = tokens.last_mut().expect("non-empty");
            last.push(' ');
            last.push_str(tok);
            continue;
        }
        tokens.push(tok.clone());
        types.push(ty);
        tags.push(tag.clone());
        out_d.push(dists[i].clone());
    }
    TaggedQuery {
        tokens,
        type_tags: types,
        schema_tags: tags,
        distributions: query.distributions.as_ref().map(|_| out_d),
    }
}

/// Value predicates: one per run of `VALUE` tokens sharing a column.
///
/// With an operator lexicon, a `COND` token directly before the run (read
/// together with the token before it when that forms a known phrase) sets
/// the comparison; otherwise every predicate is an equality.
pub fn extract_where_conditions(
    query: &TaggedQuery,
    operators: Option<&OperatorLexicon>,
) -> Vec<WhereCondition> {
    let n = query.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if query.type_tags[i] != TypeTag::Value {
            i += 1;
            continue;
        }
        let tag = &query.schema_tags[i];
        let mut end = i + 1;
        while end < n && query.type_tags[end] == TypeTag::Value && query.schema_tags[end] == *tag {
            end += 1;
        }
        let literal = query.tokens[i..end].join(" ");
        let (operator, cond_phrase) = operators
            .and_then(|lex| cond_operator(query, i, lex))
            .map(|(o, p)| (o, Some(p)))
            .unwrap_or((Operator::Eq, None));
        out.push(WhereCondition {
            column: tag.clone(),
            operator,
            literal,
            tokens: i..end,
            cond_phrase,
        });
        i = end;
    }
    out
}

fn cond_operator(query: &TaggedQuery, start: usize, lex: &OperatorLexicon) -> Option<(Operator, String)> {
    let prev = start.checked_sub(1)?;
    if query.type_tags[prev] != TypeTag::Cond {
        return None;
    }
    if let Some(before) = prev.checked_sub(1) {
        let phrase = format!("{} {}", query.tokens[before], query.tokens[prev]);
        if let Some(op) = lex.lookup(&phrase) {
            return Some((op, phrase));
        }
    }
    let word = &query.tokens[prev];
    lex.lookup(word).map(|op| (op, word.clone()))
}
