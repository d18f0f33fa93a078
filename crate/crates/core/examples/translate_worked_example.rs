//! Translates the hand-tagged director/House of Cards question and prints
//! the SQL with a reason for every FROM table and WHERE conjunct.
//!
//! cargo run --example translate_worked_example

use std::path::Path;

use nlidb::service::WorkspaceBundle;
use nlidb::translate::translate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bundle = WorkspaceBundle::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/movie"))?;
    let gold = bundle
        .gold_for("Who is the director of the series House of Cards produced by Netflix?")
        .ok_or("question missing from corpus.tags")?;

    let t = translate(&gold.tagged, &bundle.schema, &bundle.graph, &bundle.translate_options())
        .map_err(|e| format!("{}: {}", e.stage.as_str(), e.error))?;
    for p in &t.plan.paths {
        println!("path  {}", p.nodes.join(" - "));
    }
    println!("\n{}\n", t.sql);
    for e in &t.explanations {
        println!("{:<48} {}", e.part, e.reason);
    }
    Ok(())
}
