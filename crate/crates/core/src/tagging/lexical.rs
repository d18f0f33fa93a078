use super::tags::{Distribution, SchemaTag, TaggedQuery, TypeTag};
use super::tokenize::is_placeholder;
use super::TagError;
use crate::schema_graph::Schema;

/// `1 - levenshtein(a, b) / max_len`, computed over characters.
pub fn name_similarity(a: &str, b: &str) -> f64 {
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return 1.0;
    }
    1.0 - strsim::levenshtein(a, b) as f64 / max_len as f64
}

pub(crate) fn check_threshold(threshold: f64, open_at_zero: bool) -> Result<(), TagError> {
    let ok = if open_at_zero {
        threshold > 0.0 && threshold <= 1.0
    } else {
        (0.0..=1.0).contains(&threshold)
    };
    if ok {
        Ok(())
    } else {
        Err(TagError::InvalidThreshold(threshold))
    }
}

/// Candidate names for relation matching: every table, and every non-key column.
pub(crate) fn relation_candidates(schema: &Schema) -> Vec<(String, TypeTag, SchemaTag)> {
    let mut out: Vec<_> = schema
        .tables
        .iter()
        .map(|t| (t.name.clone(), TypeTag::Table, SchemaTag::table(&t.name)))
        .collect();
    out.extend(schema.semantic_columns().map(|(t, c)| {
        (c.name.clone(), TypeTag::Attr, SchemaTag::column(&t.name, &c.name))
    }));
    out
}

/// Tags tokens whose spelling is close to a table or column name.
pub fn map_relations_lexical(
    schema: &Schema,
    tokens: &[String],
    threshold: f64,
) -> Result<TaggedQuery, TagError> {
    check_threshold(threshold, false)?;
    let candidates = relation_candidates(schema);
    let mut out = TaggedQuery::untagged(tokens.to_vec());
    let dists = out.distributions.as_mut().expect("untagged has distributions");
    for (i, tok) in tokens.iter().enumerate() {
        if is_placeholder(tok) {
            continue;
        }
        let lower = tok.to_lowercase();
        let scored: Vec<_> = candidates
            .iter()
            .map(|(name, ty, tag)| (name_similarity(&lower, &name.to_lowercase()), *ty, tag))
            .filter(|(s, _, _)| *s >= threshold)
            .collect();
        let Some(dist) = Distribution::from_scores(scored.iter().map(|(s, _, t)| ((*t).clone(), *s)))
        else {
            continue;
        };
        let winner = dist.argmax().expect("non-empty").clone();
        let ty = scored
            .iter()
            .find(|(_, _, t)| **t == winner)
            .map(|(_, ty, _)| *ty)
            .expect("winner is a candidate");
        out.type_tags[i] = ty;
        out.schema_tags[i] = winner;
        dists[i] = dist;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema_graph::load_schema;

    fn schema() -> Schema {
        load_schema(
            r#"{"name": "m", "tables": [
            {"name": "director", "columns": [{"name": "did", "type": "integer", "pk": true}, {"name": "nationality", "type": "text"}]},
            {"name": "tv_series", "columns": [{"name": "msid", "type": "integer", "pk": true}, {"name": "title", "type": "text"}]}]}"#,
        )
        .unwrap()
    }

    fn tag(tokens: &[&str], threshold: f64) -> TaggedQuery {
        let toks: Vec<String> = tokens.iter().map(|s| s.to_string()).collect();
        map_relations_lexical(&schema(), &toks, threshold).unwrap()
    }

    #[test]
    fn exact_table_name() {
        let q = tag(&["director"], 0.8);
        assert_eq!(q.type_tags[0], TypeTag::Table);
        assert_eq!(q.schema_tags[0].as_str(), "director");
    }

    #[test]
    fn misspelling_within_threshold() {
        assert!((name_similarity("directr", "director") - 0.875).abs() < 1e-12);
        let q = tag(&["Directr"], 0.8);
        assert_eq!(q.schema_tags[0].as_str(), "director");
    }

    #[test]
    fn far_tokens_stay_other() {
        let q = tag(&["xyzq"], 0.8);
        assert_eq!(q.type_tags[0], TypeTag::Other);
    }

    #[test]
    fn columns_map_to_attr() {
        let q = tag(&["title"], 0.8);
        assert_eq!(q.type_tags[0], TypeTag::Attr);
        assert_eq!(q.schema_tags[0].as_str(), "tv_series.title");
        // key columns are never targets
        let q = tag(&["did"], 0.8);
        assert_eq!(q.type_tags[0], TypeTag::Other);
    }

    #[test]
    fn threshold_out_of_range() {
        let toks = vec!["x".to_string()];
        assert!(map_relations_lexical(&schema(), &toks, 1.5).is_err());
    }
}
