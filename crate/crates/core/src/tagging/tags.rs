use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TagError;
use crate::schema_graph::Schema;

/// Coarse token class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeTag {
    #[serde(rename = "TABLE")]
    Table,
    #[serde(rename = "TABLEREF")]
    TableRef,
    #[serde(rename = "ATTR")]
    Attr,
    #[serde(rename = "ATTRREF")]
    AttrRef,
    #[serde(rename = "VALUE")]
    Value,
    #[serde(rename = "COND")]
    Cond,
    #[serde(rename = "O")]
    Other,
}

impl TypeTag {
    pub const ALL: [TypeTag; 7] = [
        TypeTag::Table,
        TypeTag::TableRef,
        TypeTag::Attr,
        TypeTag::AttrRef,
        TypeTag::Value,
        TypeTag::Cond,
        TypeTag::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TypeTag::Table => "TABLE",
            TypeTag::TableRef => "TABLEREF",
            TypeTag::Attr => "ATTR",
            TypeTag::AttrRef => "ATTRREF",
            TypeTag::Value => "VALUE",
            TypeTag::Cond => "COND",
            TypeTag::Other => "O",
        }
    }

    pub fn is_table(self) -> bool {
        matches!(self, TypeTag::Table | TypeTag::TableRef)
    }

    pub fn is_attr(self) -> bool {
        matches!(self, TypeTag::Attr | TypeTag::AttrRef)
    }

    /// Table and attribute references (the "relation matching" split).
    pub fn is_relation(self) -> bool {
        self.is_table() || self.is_attr()
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TypeTag {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TypeTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| TagError::UnknownTypeTag(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagForm {
    Table,
    Column,
    Cond,
    Other,
}

/// Fine token class: a table name, `table.column`, `COND` or `O`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SchemaTag(String);

impl SchemaTag {
    pub fn other() -> Self {
        SchemaTag("O".into())
    }

    pub fn cond() -> Self {
        SchemaTag("COND".into())
    }

    pub fn table(name: &str) -> Self {
        SchemaTag(name.to_string())
    }

    pub fn column(table: &str, column: &str) -> Self {
        SchemaTag(format!("{table}.{column}"))
    }

    pub fn parse(s: &str) -> Result<Self, TagError> {
        let s = s.trim();
        if s.is_empty() || s.chars().any(char::is_whitespace) {
            return Err(TagError::MalformedSchemaTag(s.to_string()));
        }
        if s.contains('.') {
            let (t, c) = s.split_once('.').expect("contains dot");
            if t.is_empty() || c.is_empty() || c.contains('.') {
                return Err(TagError::MalformedSchemaTag(s.to_string()));
            }
        }
        Ok(SchemaTag(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn form(&self) -> TagForm {
        match self.0.as_str() {
            "O" => TagForm::Other,
            "COND" => TagForm::Cond,
            s if s.contains('.') => TagForm::Column,
            _ => TagForm::Table,
        }
    }

    pub fn is_other(&self) -> bool {
        self.form() == TagForm::Other
    }

    /// Table referenced by a table or dotted tag.
    pub fn table_name(&self) -> Option<&str> {
        match self.form() {
            TagForm::Table => Some(&self.0),
            TagForm::Column => self.0.split_once('.').map(|(t, _)| t),
            _ => None,
        }
    }

    pub fn column_name(&self) -> Option<&str> {
        match self.form() {
            TagForm::Column => self.0.split_once('.').map(|(_, c)| c),
            _ => None,
        }
    }
}

impl fmt::Display for SchemaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for SchemaTag {
    type Error = TagError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        SchemaTag::parse(&value)
    }
}

impl From<SchemaTag> for String {
    fn from(t: SchemaTag) -> Self {
        t.0
    }
}

/// Whether a type tag and a schema tag may be emitted together.
pub fn consistent(ty: TypeTag, tag: &SchemaTag) -> bool {
    match tag.form() {
        TagForm::Table => ty.is_table(),
        TagForm::Column => matches!(ty, TypeTag::Value | TypeTag::Attr | TypeTag::AttrRef),
        TagForm::Cond => ty == TypeTag::Cond,
        TagForm::Other => ty == TypeTag::Other,
    }
}

pub const SUM_TOLERANCE: f64 = 1e-9;

/// Probability distribution over schema tags for one token.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Distribution(BTreeMap<SchemaTag, f64>);

impl Distribution {
    pub fn point(tag: SchemaTag) -> Self {
        Distribution(BTreeMap::from([(tag, 1.0)]))
    }

    /// Normalizes non-negative scores by their sum. Returns `None` when the
    /// total mass is not positive.
    pub fn from_scores(scores: impl IntoIterator<Item = (SchemaTag, f64)>) -> Option<Self> {
        let mut map: BTreeMap<SchemaTag, f64> = BTreeMap::new();
        for (t, s) in scores {
            if s > 0.0 {
                *map.entry(t).or_default() += s;
            }
        }
        let total: f64 = map.values().sum();
        if total <= 0.0 || !total.is_finite() {
            return None;
        }
        map.values_mut().for_each(|v| *v /= total);
        Some(Distribution(map))
    }

    pub fn prob(&self, tag: &SchemaTag) -> f64 {
        self.0.get(tag).copied().unwrap_or(0.0)
    }

    /// Most probable tag; ties go to the lexicographically smallest tag.
    pub fn argmax(&self) -> Option<&SchemaTag> {
        let mut best: Option<(&SchemaTag, f64)> = None;
        for (t, &p) in &self.0 {
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((t, p));
            }
        }
        best.map(|(t, _)| t)
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SchemaTag, f64)> {
        self.0.iter().map(|(t, &p)| (t, p))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Tokens paired with their type and schema tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedQuery {
    pub tokens: Vec<String>,
    pub type_tags: Vec<TypeTag>,
    pub schema_tags: Vec<SchemaTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distributions: Option<Vec<Distribution>>,
}

impl TaggedQuery {
    pub fn new(
        tokens: Vec<String>,
        type_tags: Vec<TypeTag>,
        schema_tags: Vec<SchemaTag>,
        distributions: Option<Vec<Distribution>>,
    ) -> Result<Self, TagError> {
        let q = TaggedQuery {
            tokens,
            type_tags,
            schema_tags,
            distributions,
        };
        q.check()?;
        Ok(q)
    }

    /// All tokens tagged `O` with point-mass distributions.
    pub fn untagged(tokens: Vec<String>) -> Self {
        let n = tokens.len();
        TaggedQuery {
            tokens,
            type_tags: vec![TypeTag::Other; n],
            schema_tags: vec![SchemaTag::other(); n],
            distributions: Some(vec![Distribution::point(SchemaTag::other()); n]),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Distributions, or point masses on the emitted tags when none are attached.
    pub fn distributions_or_point(&self) -> Vec<Distribution> {
        match &self.distributions {
            Some(d) => d.clone(),
            None => self.schema_tags.iter().cloned().map(Distribution::point).collect(),
        }
    }

    pub fn check(&self) -> Result<(), TagError> {
        let n = self.tokens.len();
        if self.type_tags.len() != n
            || self.schema_tags.len() != n
            || self.distributions.as_ref().is_some_and(|d| d.len() != n)
        {
            return Err(TagError::LengthMismatch);
        }
        for (i, (ty, tag)) in self.type_tags.iter().zip(&self.schema_tags).enumerate() {
            if !consistent(*ty, tag) {
                return Err(TagError::Inconsistent {
                    index: i,
                    type_tag: *ty,
                    schema_tag: tag.clone(),
                });
            }
        }
        if let Some(ds) = &self.distributions {
            for (i, (d, tag)) in ds.iter().zip(&self.schema_tags).enumerate() {
                if (d.total() - 1.0).abs() > SUM_TOLERANCE || d.argmax() != Some(tag) {
                    return Err(TagError::BadDistribution(i));
                }
            }
        }
        Ok(())
    }

    /// Checks that every table and dotted tag names a table or a non-key column of `schema`.
    pub fn validate_against(&self, schema: &Schema) -> Result<(), TagError> {
        for tag in &self.schema_tags {
            let ok = match tag.form() {
                TagForm::Table => schema.table(tag.as_str()).is_some(),
                TagForm::Column => {
                    let t = tag.table_name().unwrap_or_default();
                    let c = tag.column_name().unwrap_or_default();
                    schema.has_column(t, c) && !schema.is_key_column(t, c)
                }
                _ => true,
            };
            if !ok {
                return Err(TagError::UnknownSchemaElement(tag.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_type_tags_round_trip() {
        for t in TypeTag::ALL {
            assert_eq!(t.as_str().parse::<TypeTag>().unwrap(), t);
        }
        assert!("NOUN".parse::<TypeTag>().is_err());
    }

    #[test]
    fn consistency_table() {
        let col = SchemaTag::column("tv_series", "title");
        let tab = SchemaTag::table("director");
        assert!(consistent(TypeTag::Value, &col));
        assert!(consistent(TypeTag::Attr, &col));
        assert!(!consistent(TypeTag::Value, &tab));
        assert!(consistent(TypeTag::TableRef, &tab));
        assert!(!consistent(TypeTag::Table, &col));
        assert!(consistent(TypeTag::Cond, &SchemaTag::cond()));
        assert!(!consistent(TypeTag::Cond, &SchemaTag::other()));
        assert!(consistent(TypeTag::Other, &SchemaTag::other()));
    }

    #[test]
    fn argmax_tie_breaks_lexicographically() {
        let d = Distribution::from_scores([
            (SchemaTag::column("b", "x"), 1.0),
            (SchemaTag::column("a", "x"), 1.0),
        ])
        .unwrap();
        assert_eq!(d.argmax().unwrap().as_str(), "a.x");
        assert!(Distribution::from_scores([(SchemaTag::other(), 0.0)]).is_none());
    }

    #[test]
    fn malformed_schema_tags() {
        assert!(SchemaTag::parse("a.b.c").is_err());
        assert!(SchemaTag::parse(".b").is_err());
        assert!(SchemaTag::parse("").is_err());
        assert_eq!(SchemaTag::parse("tv_series.title").unwrap().table_name(), Some("tv_series"));
    }

    #[test]
    fn ragged_query_is_rejected() {
        let r = TaggedQuery::new(vec!["a".into()], vec![], vec![SchemaTag::other()], None);
        assert!(matches!(r, Err(TagError::LengthMismatch)));
    }
}
