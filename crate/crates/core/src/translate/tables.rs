use serde::Serialize;

use super::TranslateError;
use crate::schema_graph::Schema;
use crate::tagging::{TaggedQuery, TypeTag};

/// Tables referenced by a query, in order of first mention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct TableSet(Vec<String>);

impl TableSet {
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v: Vec<String> = Vec::new();
        for n in names {
            let n = n.into();
            if !v.contains(&n) {
                v.push(n);
            }
        }
        TableSet(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn contains(&self, table: &str) -> bool {
        self.0.iter().any(|t| t == table)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }
}

/// Tables of table-tagged tokens plus the tables owning attribute- and
/// value-tagged columns.
pub fn collect_table_set(query: &TaggedQuery, schema: &Schema) -> Result<TableSet, TranslateError> {
    let names = query
        .type_tags
        .iter()
        .zip(&query.schema_tags)
        .filter(|(ty, _)| ty.is_relation() || **ty == TypeTag::Value)
        .filter_map(|(_, tag)| tag.table_name());
    let set = TableSet::from_names(names);
    if set.is_empty() {
        return Err(TranslateError::Untranslatable);
    }
    if let Some(bad) = set.iter().find(|t| schema.table(t).is_none()) {
        return Err(TranslateError::UnknownTable(bad.to_string()));
    }
    Ok(set)
}
