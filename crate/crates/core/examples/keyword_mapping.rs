//! Runs each unsupervised mapper on its own, then the composed tagger, over
//! one question.
//!
//! cargo run --example keyword_mapping -- "Which series did Netflix produce after 2015?"

use std::path::Path;

use nlidb::service::WorkspaceBundle;
use nlidb::tagging::{map_relations_lexical, map_values_tfidf, token_texts, TaggedQuery};

fn show(name: &str, q: &TaggedQuery) {
    println!("{name}");
    for i in 0..q.len() {
        println!("  {:<12} {:<9} {}", q.tokens[i], q.type_tags[i], q.schema_tags[i]);
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let query = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "How many movies did Alfonso Cuaron direct?".into());
    let bundle = WorkspaceBundle::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/movie"))?;
    let tokens = token_texts(&query);

    show("values (tf-idf)", &map_values_tfidf(&bundle.index, &tokens));
    let lexical = map_relations_lexical(&bundle.schema, &tokens, bundle.tagger.config().lexical_threshold)?;
    show("relations (edit distance)", &lexical);
    show("composed", &bundle.tagger.tag(&tokens)?);
    Ok(())
}
