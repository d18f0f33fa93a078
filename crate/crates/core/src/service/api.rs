//! Request handling shared by the HTTP server and the command line.

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use super::workspace::{Registry, WorkspaceBundle};
use super::ServiceError;
use crate::explain::{explain_query, explain_token, BlackBox, ExplainError, Explanation, LimeConfig};
use crate::schema_graph::{GraphJson, Highlight};
use crate::tagging::{is_placeholder, AutoTagger, token_texts, Distribution, SchemaTag, TaggedQuery, TypeTag};
use crate::translate::{translate, TranslationJson};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaggerMode {
    /// Hand-annotated tags from the workspace corpus.
    Gold,
    #[default]
    Auto,
}

impl TaggerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TaggerMode::Gold => "gold",
            TaggerMode::Auto => "auto",
        }
    }
}

impl std::str::FromStr for TaggerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gold" => Ok(TaggerMode::Gold),
            "auto" => Ok(TaggerMode::Auto),
            other => Err(format!("unknown tagger `{other}` (expected gold or auto)")),
        }
    }
}

/// Failure of one pipeline stage, as sent to clients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    pub stage: String,
    pub message: String,
}

impl ApiError {
    pub fn new(stage: &str, message: impl ToString) -> Self {
        ApiError {
            stage: stage.into(),
            message: message.to_string(),
        }
    }

    fn status(&self) -> StatusCode {
        match self.stage.as_str() {
            "workspace" => StatusCode::NOT_FOUND,
            "request" => StatusCode::BAD_REQUEST,
            "internal" => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError::new("workspace", e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self)).into_response()
    }
}

/// Point mass on the gold tag for kept tokens and on `O` for masked ones.
pub struct GoldLookup {
    pub tags: Vec<SchemaTag>,
}

impl BlackBox for GoldLookup {
    fn predict(&self, tokens: &[String]) -> Result<Vec<Distribution>, ExplainError> {
        if tokens.len() != self.tags.len() {
            return Err(ExplainError::OutputLength {
                expected: tokens.len(),
                found: self.tags.len(),
            });
        }
        Ok(tokens
            .iter()
            .zip(&self.tags)
            .map(|(t, tag)| {
                Distribution::point(if is_placeholder(t) {
                    SchemaTag::other()
                } else {
                    tag.clone()
                })
            })
            .collect())
    }
}

/// Tokenizes and tags `query`. Gold mode looks the tokens up in the corpus.
pub fn tag_query(
    bundle: &WorkspaceBundle,
    query: &str,
    mode: TaggerMode,
) -> Result<(Vec<String>, TaggedQuery), ApiError> {
    let tokens = token_texts(query);
    if tokens.is_empty() {
        return Err(ApiError::new("tokenize", "query has no tokens"));
    }
    let tagged = match mode {
        TaggerMode::Gold => bundle
            .gold_for(query)
            .map(|g| g.tagged.clone())
            .ok_or_else(|| ApiError::new("tag", "no gold tags for this query in the workspace corpus"))?,
        TaggerMode::Auto => bundle.tagger.tag(&tokens).map_err(|e| ApiError::new("tag", e))?,
    };
    Ok((tokens, tagged))
}

enum Probe<'a> {
    Gold(GoldLookup),
    Auto(&'a AutoTagger),
}

impl BlackBox for Probe<'_> {
    fn predict(&self, tokens: &[String]) -> Result<Vec<Distribution>, ExplainError> {
        match self {
            Probe::Gold(g) => g.predict(tokens),
            Probe::Auto(t) => t.predict(tokens),
        }
    }
}

fn black_box<'a>(bundle: &'a WorkspaceBundle, tagged: &TaggedQuery, mode: TaggerMode) -> Probe<'a> {
    match mode {
        TaggerMode::Gold => Probe::Gold(GoldLookup {
            tags: tagged.schema_tags.clone(),
        }),
        TaggerMode::Auto => Probe::Auto(&bundle.tagger),
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct TranslateRequest {
    pub db: String,
    pub query: String,
    #[serde(default)]
    pub tagger: TaggerMode,
    #[serde(default)]
    pub explain: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenRow {
    pub index: usize,
    pub token: String,
    pub type_tag: TypeTag,
    pub schema_tag: SchemaTag,
    /// Tokens tagged `O` are not explained.
    pub explainable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslateResponse {
    pub db: String,
    pub query: String,
    pub tagger: TaggerMode,
    pub tokens: Vec<TokenRow>,
    pub translation: TranslationJson,
    pub graph: GraphJson,
    /// Present only when explanations were requested; one per explainable token.
    pub token_explanations: Option<Vec<Explanation>>,
}

fn token_rows(q: &TaggedQuery) -> Vec<TokenRow> {
    (0..q.len())
        .map(|i| TokenRow {
            index: i,
            token: q.tokens[i].clone(),
            type_tag: q.type_tags[i],
            schema_tag: q.schema_tags[i].clone(),
            explainable: q.type_tags[i] != TypeTag::Other,
        })
        .collect()
}

pub fn handle_translate(reg: &Registry, req: &TranslateRequest) -> Result<TranslateResponse, ApiError> {
    let bundle = reg.get(&req.db)?;
    let (_, tagged) = tag_query(&bundle, &req.query, req.tagger)?;
    let t = translate(&tagged, &bundle.schema, &bundle.graph, &bundle.translate_options())
        .map_err(|e| ApiError::new(e.stage.as_str(), e.error))?;
    let graph = GraphJson::build(&bundle.graph, &Highlight::from_paths(&t.plan.paths))
        .map_err(|e| ApiError::new("internal", e))?;
    let token_explanations = if req.explain {
        let bb = black_box(&bundle, &tagged, req.tagger);
        let out = explain_query(&bb, &tagged, &bundle.lime_config())
            .into_iter()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ApiError::new("explain", e))?;
        Some(out)
    } else {
        None
    };
    Ok(TranslateResponse {
        db: req.db.clone(),
        query: req.query.clone(),
        tagger: req.tagger,
        tokens: token_rows(&tagged),
        translation: t.to_json(),
        graph,
        token_explanations,
    })
}

#[derive(Debug, Clone, Deserialize)]
pub struct ExplainRequest {
    pub db: String,
    pub query: String,
    pub token_index: usize,
    #[serde(default)]
    pub tagger: TaggerMode,
}

/// Explains one token. Uses the same per-token seed as the explanations
/// returned with a translation, so both agree exactly.
pub fn handle_explain(reg: &Registry, req: &ExplainRequest) -> Result<Explanation, ApiError> {
    let bundle = reg.get(&req.db)?;
    let (_, tagged) = tag_query(&bundle, &req.query, req.tagger)?;
    let base = bundle.lime_config();
    let cfg = LimeConfig {
        seed: base.seed ^ req.token_index as u64,
        ..base
    };
    let bb = black_box(&bundle, &tagged, req.tagger);
    explain_token(&bb, &tagged, req.token_index, &cfg).map_err(|e| match e {
        ExplainError::TokenIndex { .. } | ExplainError::NotExplainable(_) => ApiError::new("request", e),
        other => ApiError::new("explain", other),
    })
}

pub fn handle_graph(reg: &Registry, db: &str) -> Result<GraphJson, ApiError> {
    let bundle = reg.get(db)?;
    GraphJson::build(&bundle.graph, &Highlight::new()).map_err(|e| ApiError::new("internal", e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DbList {
    pub dbs: Vec<String>,
}

async fn blocking<T, F>(f: F) -> Result<Json<T>, ApiError>
where
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new("internal", e))?
        .map(Json)
}

async fn translate_route(
    State(reg): State<Arc<Registry>>,
    Json(req): Json<TranslateRequest>,
) -> Result<Json<TranslateResponse>, ApiError> {
    blocking(move || handle_translate(&reg, &req)).await
}

async fn explain_route(
    State(reg): State<Arc<Registry>>,
    Json(req): Json<ExplainRequest>,
) -> Result<Json<Explanation>, ApiError> {
    blocking(move || handle_explain(&reg, &req)).await
}

async fn graph_route(
    State(reg): State<Arc<Registry>>,
    Path(db): Path<String>,
) -> Result<Json<GraphJson>, ApiError> {
    handle_graph(&reg, &db).map(Json)
}

async fn dbs_route(State(reg): State<Arc<Registry>>) -> Json<DbList> {
    Json(DbList { dbs: reg.names() })
}

pub fn router(reg: Arc<Registry>) -> Router {
    Router::new()
        .route("/api/translate", post(translate_route))
        .route("/api/explain", post(explain_route))
        .route("/api/schema/{db}/graph", get(graph_route))
        .route("/api/dbs", get(dbs_route))
        .with_state(reg)
}
