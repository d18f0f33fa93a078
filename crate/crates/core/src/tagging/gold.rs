//! Hand-annotated tag files.
//!
//! One `token<TAB>type_tag<TAB>schema_tag` line per token, a blank line
//! between queries, and an optional `# sql: <gold SQL>` line before a block.

use super::tags::{Distribution, SchemaTag, TaggedQuery, TypeTag};
use super::TagError;

#[derive(Debug, Clone, PartialEq)]
pub struct GoldQuery {
    pub tagged: TaggedQuery,
    pub sql: Option<String>,
}

impl GoldQuery {
    pub fn text(&self) -> String {
        self.tagged.tokens.join(" ")
    }
}

const SQL_PREFIX: &str = "# sql:";

pub fn load_gold_tags(text: &str) -> Result<Vec<GoldQuery>, TagError> {
    let mut out = Vec::new();
    let mut sql: Option<String> = None;
    let mut block: Vec<(String, TypeTag, SchemaTag)> = Vec::new();
    let mut block_start = 0;

    let mut flush = |block: &mut Vec<(String, TypeTag, SchemaTag)>,
                     sql: &mut Option<String>,
                     start: usize|
     -> Result<(), TagError> {
        if block.is_empty() {
            if sql.is_some() {
                return Err(TagError::Gold {
                    line: start,
                    message: "sql comment without a token block".into(),
                });
            }
            return Ok(());
        }
        let (tokens, (types, tags)): (Vec<_>, (Vec<_>, Vec<_>)) =
            block.drain(..).map(|(a, b, c)| (a, (b, c))).unzip();
        let dists = tags.iter().cloned().map(Distribution::point).collect();
        let tagged = TaggedQuery::new(tokens, types, tags, Some(dists)).map_err(|e| TagError::Gold {
            line: start,
            message: e.to_string(),
        })?;
        out.push(GoldQuery {
            tagged,
            sql: sql.take(),
        });
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut block, &mut sql, block_start)?;
            continue;
        }
        if block.is_empty() && sql.is_none() {
            block_start = line_no;
        }
        if let Some(rest) = line.strip_prefix(SQL_PREFIX) {
            if !block.is_empty() || sql.is_some() {
                return Err(TagError::Gold {
                    line: line_no,
                    message: "sql comment must precede its token block".into(),
                });
            }
            sql = Some(rest.trim().to_string());
            continue;
        }
        if line.starts_with('#') && !line.contains('\t') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [token, ty, tag] = fields[..] else {
            return Err(TagError::Gold {
                line: line_no,
                message: format!("ragged line: expected 3 tab-separated fields, found {}", fields.len()),
            });
        };
        let wrap = |e: TagError| TagError::Gold {
            line: line_no,
            message: e.to_string(),
        };
        let ty: TypeTag = ty.parse().map_err(wrap)?;
        let tag = SchemaTag::parse(tag).map_err(wrap)?;
        block.push((token.to_string(), ty, tag));
    }
    flush(&mut block, &mut sql, block_start)?;
    Ok(out)
}

/// Serializes queries in the tag-file format; inverse of [`load_gold_tags`].
pub fn write_gold_tags(queries: &[GoldQuery]) -> String {
    let mut out = String::new();
    for (i, q) in queries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if let Some(sql) = &q.sql {
            out.push_str(SQL_PREFIX);
            out.push(' ');
            out.push_str(sql);
            out.push('\n');
        }
        let t = &q.tagged;
        for ((tok, ty), tag) in t.tokens.iter().zip(&t.type_tags).zip(&t.schema_tags) {
            out.push_str(&format!("{tok}\t{ty}\t{tag}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file() {
        assert!(load_gold_tags("").unwrap().is_empty());
        assert!(load_gold_tags("\n\n").unwrap().is_empty());
    }

    #[test]
    fn value_with_table_tag_is_inconsistent() {
        let err = load_gold_tags("Netflix\tVALUE\tcompany\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn unknown_type_tag() {
        assert!(load_gold_tags("x\tNOUN\tO\n").is_err());
    }

    #[test]
    fn ragged_block() {
        assert!(load_gold_tags("x\tO\n").is_err());
    }

    #[test]
    fn sql_comment_and_blocks() {
        let text = "# sql: SELECT * FROM director\ndirector\tTABLE\tdirector\n\nwho\tO\tO\n";
        let qs = load_gold_tags(text).unwrap();
        assert_eq!(qs.len(), 2);
        assert_eq!(qs[0].sql.as_deref(), Some("SELECT * FROM director"));
        assert_eq!(qs[1].sql, None);
        assert_eq!(write_gold_tags(&qs), text);
    }
}
