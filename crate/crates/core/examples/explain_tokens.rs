//! Explains every tagged token of a question with the local surrogate and
//! prints the three strongest context words for each.
//!
//! cargo run --example explain_tokens -- "Who directed the movie House of Cards"

use std::path::Path;

use nlidb::explain::explain_query;
use nlidb::service::WorkspaceBundle;
use nlidb::tagging::token_texts;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let query = std::env::args().nth(1).unwrap_or_else(|| {
        "Who is the director of the series House of Cards produced by Netflix?".into()
    });
    let bundle = WorkspaceBundle::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/movie"))?;
    let tagged = bundle.tagger.tag(&token_texts(&query))?;

    for e in explain_query(&bundle.tagger, &tagged, &bundle.lime_config()) {
        let e = e?;
        let top: Vec<String> = e
            .ranked()
            .into_iter()
            .filter(|c| c.index != e.token_index)
            .take(3)
            .map(|c| format!("{} {:+.3}", c.token, c.score))
            .collect();
        println!(
            "{:<10} -> {:<22} self {:+.3} | {}",
            tagged.tokens[e.token_index],
            e.target_tag.as_str(),
            e.score_of(e.token_index).unwrap_or(0.0),
            top.join(", ")
        );
    }
    Ok(())
}
