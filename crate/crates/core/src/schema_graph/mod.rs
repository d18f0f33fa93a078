//! Schema ingestion, the table/attribute schema graph, shortest join paths
//! and graph export.

mod export;
mod graph;
mod schema;

use thiserror::Error;

pub use export::{export_graph, parse_graph_json, ExportFormat, GraphJson, Highlight, JsonEdge, JsonNode};
pub use graph::{attr_id, extract_graph, table_id, GraphNode, GraphPath, NodeKind, SchemaGraph};
pub use schema::{load_schema, Column, DataType, ForeignKey, Schema, Table};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("schema parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate table `{0}`")]
    DuplicateTable(String),
    #[error("duplicate column `{column}` in table `{table}`")]
    DuplicateColumn { table: String, column: String },
    #[error("foreign key references unknown column `{table}.{column}`")]
    DanglingForeignKey { table: String, column: String },
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("unknown graph node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` is not a table node")]
    NotATable(String),
    #[error("edge {0} -- {1} would join two nodes of the same kind")]
    NotBipartite(String, String),
    #[error("edge {0} -- {1} is not symmetric")]
    Asymmetric(String, String),
    #[error("highlight references unknown element `{0}`")]
    UnknownHighlight(String),
    #[error("malformed graph export: {0}")]
    MalformedExport(String),
}
