//! Workspace loading, request handling, the HTTP router and the evaluation
//! harness.

mod api;
mod canonical;
mod config;
mod eval;
mod workspace;

use std::path::PathBuf;

use thiserror::Error;

use crate::schema_graph::{GraphError, SchemaError};
use crate::tagging::TagError;

pub use api::{
    handle_explain, handle_graph, handle_translate, router, tag_query, ApiError, DbList,
    ExplainRequest, GoldLookup, TaggerMode, TokenRow, TranslateRequest, TranslateResponse,
};
pub use canonical::{canonicalize_sql, categorize_gold_sql, sql_matches, CanonError, Category};
pub use config::{LimeSection, TaggerSection, TranslateSection, WorkspaceConfig};
pub use eval::{bench, run_eval, BenchReport, BenchRow, EvalReport, Score, StageFailure, Verdict, MATCH_NOTE};
pub use workspace::{
    Registry, WorkspaceBundle, CONFIG_FILE, CORPUS_FILE, EMBEDDINGS_FILE, SCHEMA_FILE, VALUES_FILE,
};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", .path.display())]
    File { path: PathBuf, message: String },
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Tag(#[from] TagError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("unknown database `{0}`")]
    UnknownDb(String),
    #[error("two workspace directories define database `{0}`")]
    DuplicateDb(String),
}
