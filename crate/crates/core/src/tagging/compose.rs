use std::collections::{BTreeSet, HashSet};

use super::tags::{Distribution, SchemaTag, TaggedQuery, TypeTag};
use super::tokenize::is_placeholder;
use super::TagError;

/// Words that mark a comparison condition when nothing else claims them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondLexicon(BTreeSet<String>);

impl CondLexicon {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        CondLexicon(words.into_iter().map(|w| w.as_ref().to_lowercase()).collect())
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(&token.to_lowercase())
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl Default for CondLexicon {
    fn default() -> Self {
        CondLexicon::new([
            "more", "than", "least", "most", "after", "before", "greater", "less", "fewer",
            "over", "under",
        ])
    }
}

/// Merges mapper layers: per token, the first layer with a non-`O` tag wins.
/// Tokens still untagged that appear in the lexicon become `COND`.
pub fn compose_tag_sequence(
    layers: &[TaggedQuery],
    cond_lexicon: &CondLexicon,
) -> Result<TaggedQuery, TagError> {
    let Some(first) = layers.first() else {
        return Err(TagError::LayerMismatch);
    };
    if layers.iter().any(|l| l.tokens != first.tokens) {
        return Err(TagError::LayerMismatch);
    }
    let mut out = TaggedQuery::untagged(first.tokens.clone());
    let dists = out.distributions.as_mut().expect("untagged has distributions");
    for i in 0..first.len() {
        if let Some(layer) = layers.iter().find(|l| l.type_tags[i] != TypeTag::Other) {
            out.type_tags[i] = layer.type_tags[i];
            out.schema_tags[i] = layer.schema_tags[i].clone();
            dists[i] = layer
                .distributions
                .as_ref()
                .map(|d| d[i].clone())
                .unwrap_or_else(|| Distribution::point(layer.schema_tags[i].clone()));
        } else if !is_placeholder(&first.tokens[i]) && cond_lexicon.contains(&first.tokens[i]) {
            out.type_tags[i] = TypeTag::Cond;
            out.schema_tags[i] = SchemaTag::cond();
            dists[i] = Distribution::point(SchemaTag::cond());
        }
    }
    out.check()?;
    Ok(out)
}

/// Re-ranks ambiguous value spans toward columns of tables mentioned
/// elsewhere in the query. Each candidate column whose table is referenced by
/// a table or attribute token outside the span has its probability multiplied
/// by `boost` before renormalization. `boost == 1` leaves the query unchanged.
pub fn disambiguate_by_context(query: &mut TaggedQuery, boost: f64) {
    if boost == 1.0 || !boost.is_finite() || boost <= 0.0 {
        return;
    }
    let Some(dists) = query.distributions.as_mut() else {
        return;
    };
    let n = query.tokens.len();
    let mut i = 0;
    while i < n {
        if query.type_tags[i] != TypeTag::Value {
            i += 1;
            continue;
        }
        let mut end = i + 1;
        while end < n
            && query.type_tags[end] == TypeTag::Value
            && query.schema_tags[end] == query.schema_tags[i]
        {
            end += 1;
        }
        if dists[i].len() > 1 {
            let context: HashSet<&str> = (0..n)
                .filter(|&j| (j < i || j >= end) && query.type_tags[j].is_relation())
                .filter_map(|j| query.schema_tags[j].table_name())
                .collect();
            let rescored = Distribution::from_scores(dists[i].iter().map(|(t, p)| {
                let hit = t.table_name().is_some_and(|tb| context.contains(tb));
                (t.clone(), if hit { p * boost } else { p })
            }));
            if let Some(d) = rescored {
                let winner = d.argmax().expect("non-empty").clone();
                dists[i..end].fill(d);
                query.schema_tags[i..end].fill(winner);
            }
        }
        i = end;
    }
}
