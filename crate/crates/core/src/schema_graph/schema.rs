//! Relational schema description and its JSON file format.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::SchemaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataType {
    Text,
    Integer,
    Real,
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataType::Text => "text",
            DataType::Integer => "integer",
            DataType::Real => "real",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(rename = "type")]
    pub data_type: DataType,
    #[serde(rename = "pk", default)]
    pub is_primary_key: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    #[serde(default)]
    pub columns: Vec<Column>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForeignKey {
    pub table: String,
    pub column: String,
    pub ref_table: String,
    pub ref_column: String,
}

/// A validated relational schema.
///
/// Construct through [`Schema::new`] or [`load_schema`]; both enforce unique
/// table names, unique column names per table and resolvable foreign keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schema {
    pub name: String,
    pub tables: Vec<Table>,
    pub foreign_keys: Vec<ForeignKey>,
}

#[derive(Deserialize)]
struct RawSchema {
    name: String,
    #[serde(default)]
    tables: Vec<Table>,
    #[serde(default)]
    foreign_keys: Vec<ForeignKey>,
}

impl Schema {
    pub fn new(
        name: impl Into<String>,
        tables: Vec<Table>,
        foreign_keys: Vec<ForeignKey>,
    ) -> Result<Self, SchemaError> {
        let schema = Schema {
            name: name.into(),
            tables,
            foreign_keys,
        };
        schema.validate()?;
        Ok(schema)
    }

    fn validate(&self) -> Result<(), SchemaError> {
        let mut seen = HashSet::new();
        for table in &self.tables {
            if !seen.insert(table.name.as_str()) {
                return Err(SchemaError::DuplicateTable(table.name.clone()));
            }
            let mut cols = HashSet::new();
            for col in &table.columns {
                if !cols.insert(col.name.as_str()) {
                    return Err(SchemaError::DuplicateColumn {
                        table: table.name.clone(),
                        column: col.name.clone(),
                    });
                }
            }
        }
        for fk in &self.foreign_keys {
            for (t, c) in [(&fk.table, &fk.column), (&fk.ref_table, &fk.ref_column)] {
                let ok = self.table(t).is_some_and(|tab| tab.column(c).is_some());
                if !ok {
                    return Err(SchemaError::DanglingForeignKey {
                        table: t.clone(),
                        column: c.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn has_column(&self, table: &str, column: &str) -> bool {
        self.table(table).is_some_and(|t| t.column(column).is_some())
    }

    /// Whether `table.column` takes part in a join: a primary key, an explicit
    /// foreign-key endpoint, or a name shared with a column of another table.
    pub fn is_key_column(&self, table: &str, column: &str) -> bool {
        let Some(t) = self.table(table) else {
            return false;
        };
        let Some(c) = t.column(column) else {
            return false;
        };
        if c.is_primary_key {
            return true;
        }
        let in_fk = self.foreign_keys.iter().any(|fk| {
            (fk.table == table && fk.column == column)
                || (fk.ref_table == table && fk.ref_column == column)
        });
        in_fk
            || self
                .tables
                .iter()
                .any(|other| other.name != table && other.column(column).is_some())
    }

    /// Non-key columns, i.e. the attributes that carry semantics and can be
    /// the target of an attribute or value mapping.
    pub fn semantic_columns(&self) -> impl Iterator<Item = (&Table, &Column)> + '_ {
        self.tables.iter().flat_map(move |t| {
            t.columns
                .iter()
                .filter(move |c| !self.is_key_column(&t.name, &c.name))
                .map(move |c| (t, c))
        })
    }

    pub fn table_names(&self) -> BTreeSet<&str> {
        self.tables.iter().map(|t| t.name.as_str()).collect()
    }
}

/// Parses and validates a schema description in the JSON file format.
pub fn load_schema(source: &str) -> Result<Schema, SchemaError> {
    let raw: RawSchema = serde_json::from_str(source).map_err(|e| SchemaError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Schema::new(raw.name, raw.tables, raw.foreign_keys)
}
