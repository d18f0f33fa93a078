//! Serves the JSON API over the bundled workspace on port 8080.
//!
//! cargo run --example http_service
//! curl -s localhost:8080/api/translate -H 'content-type: application/json' \
//!   -d '{"db": "movie", "query": "Which movies did Martin Scorsese direct?", "explain": true}'

use std::path::Path;
use std::sync::Arc;

use nlidb::service::{router, Registry};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let registry = Registry::open(&root)?;
    println!("databases: {}", registry.names().join(", "));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:8080").await?;
    axum::serve(listener, router(Arc::new(registry))).await?;
    Ok(())
}
