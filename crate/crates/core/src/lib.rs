//! Explainable natural-language-to-SQL translation.
//!
//! A question is tokenized, each token is tagged with a type and a schema
//! element, and the tags are turned into SQL by walking a bipartite
//! table/attribute graph of the schema. Every tag can be explained by local
//! perturbation, and every SQL part carries the reason it was emitted.

pub mod explain;
pub mod schema_graph;
pub mod service;
pub mod tagging;
pub mod translate;
