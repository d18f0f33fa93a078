//! Exact-match inverted index over database values and the tf-idf value mapper.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::tags::{Distribution, SchemaTag, TaggedQuery, TypeTag};
use super::tokenize::{is_placeholder, normalize_phrase};
use super::TagError;
use crate::schema_graph::Schema;

/// Longest value (in words) that can be matched by a query n-gram.
pub const MAX_NGRAM: usize = 3;

const HEADER: &str = "table\tcolumn\tvalue";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Posting {
    pub table: String,
    pub column: String,
    /// Occurrences of the value in this column.
    pub tf: usize,
    /// Number of columns holding the value.
    pub df: usize,
    pub tfidf: f64,
}

impl Posting {
    pub fn tag(&self) -> SchemaTag {
        SchemaTag::column(&self.table, &self.column)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IndexStats {
    pub rows: usize,
    pub keys: usize,
    pub columns: usize,
    /// Values longer than [`MAX_NGRAM`] words; stored nowhere since no query n-gram can reach them.
    pub unindexed_values: usize,
}

/// Normalized value n-gram to its postings, sorted by descending tf.
#[derive(Debug, Clone, Default)]
pub struct ValueIndex {
    postings: BTreeMap<String, Vec<Posting>>,
    stats: IndexStats,
}

impl ValueIndex {
    pub fn lookup(&self, key: &str) -> &[Posting] {
        self.postings.get(key).map(Vec::as_slice).unwrap_or_default()
    }

    pub fn stats(&self) -> &IndexStats {
        &self.stats
    }

    pub fn is_empty(&self) -> bool {
        self.postings.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &[Posting])> {
        self.postings.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Every posting must name a non-key column of the schema.
    pub fn validate_against(&self, schema: &Schema) -> Result<(), TagError> {
        for p in self.postings.values().flatten() {
            if !schema.has_column(&p.table, &p.column) || schema.is_key_column(&p.table, &p.column) {
                return Err(TagError::UnknownSchemaElement(p.tag()));
            }
        }
        Ok(())
    }
}

/// Builds the index from the value-corpus TSV.
pub fn build_value_index(corpus: &str) -> Result<ValueIndex, TagError> {
    let mut lines = corpus.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Ok(ValueIndex::default());
    };
    if header.trim_end_matches('\r') != HEADER {
        return Err(TagError::Corpus {
            row: 1,
            message: format!("expected header `{}`", HEADER.replace('\t', "\\t")),
        });
    }

    let mut counts: BTreeMap<String, BTreeMap<(String, String), usize>> = BTreeMap::new();
    let mut columns = BTreeSet::new();
    let mut stats = IndexStats::default();
    for (i, line) in lines {
        let fields: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
        let [table, column, value] = fields[..] else {
            return Err(TagError::Corpus {
                row: i + 1,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        };
        if table.is_empty() || column.is_empty() {
            return Err(TagError::Corpus {
                row: i + 1,
                message: "empty table or column".into(),
            });
        }
        stats.rows += 1;
        columns.insert((table.to_string(), column.to_string()));
        let key = normalize_phrase(value);
        let words = key.split(' ').filter(|w| !w.is_empty()).count();
        if words == 0 {
            continue;
        }
        if words > MAX_NGRAM {
            stats.unindexed_values += 1;
            continue;
        }
        *counts
            .entry(key)
            .or_default()
            .entry((table.to_string(), column.to_string()))
            .or_default() += 1;
    }

    let n_columns = columns.len().max(1) as f64;
    let postings = counts
        .into_iter()
        .map(|(key, per_col)| {
            let df = per_col.len();
            let idf = (n_columns / df as f64).ln() + 1.0;
            let mut list: Vec<Posting> = per_col
                .into_iter()
                .map(|((table, column), tf)| Posting {
                    table,
                    column,
                    tf,
                    df,
                    tfidf: tf as f64 * idf,
                })
                .collect();
            list.sort_by(|a, b| b.tf.cmp(&a.tf).then_with(|| a.tag().cmp(&b.tag())));
            (key, list)
        })
        .collect::<BTreeMap<_, _>>();
    stats.keys = postings.len();
    stats.columns = columns.len();
    Ok(ValueIndex { postings, stats })
}

/// Tags value mentions by exact n-gram lookup.
///
/// Query n-grams are scanned longest first and left to right; a hit claims
/// its tokens so no shorter hit can overlap it. Column ambiguity goes to the
/// largest tf, and the distribution is the tf share of each candidate column.
pub fn map_values_tfidf(index: &ValueIndex, tokens: &[String]) -> TaggedQuery {
    let mut out = TaggedQuery::untagged(tokens.to_vec());
    let dists = out.distributions.as_mut().expect("untagged has distributions");
    let mut claimed = vec![false; tokens.len()];
    for n in (1..=MAX_NGRAM).rev() {
        if n > tokens.len() {
            continue;
        }
        for start in 0..=tokens.len() - n {
            let span = start..start + n;
            if claimed[span.clone()].iter().any(|&c| c)
                || tokens[span.clone()].iter().any(|t| is_placeholder(t))
            {
                continue;
            }
            let key = normalize_phrase(&tokens[span.clone()].join(" "));
            if key.split(' ').count() != n {
                continue;
            }
            let postings = index.lookup(&key);
            let Some(dist) =
                Distribution::from_scores(postings.iter().map(|p| (p.tag(), p.tf as f64)))
            else {
                continue;
            };
            let winner = dist.argmax().expect("non-empty").clone();
            for i in span {
                claimed[i] = true;
                out.type_tags[i] = TypeTag::Value;
                out.schema_tags[i] = winner.clone();
                dists[i] = dist.clone();
            }
        }
    }
    out
}
