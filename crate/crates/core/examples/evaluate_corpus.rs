//! Scores the bundled movie corpus with gold tags and with the unsupervised tagger.
//!
//! cargo run --example evaluate_corpus

use std::path::Path;

use nlidb::service::{run_eval, TaggerMode, WorkspaceBundle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/movie");
    let bundle = WorkspaceBundle::load(&dir)?;
    for mode in [TaggerMode::Gold, TaggerMode::Auto] {
        let report = run_eval(&bundle, &bundle.corpus, mode);
        print!("{}", report.summary());
        for v in report.verdicts.iter().filter(|v| v.attempted && !v.correct) {
            println!("  miss #{} {}", v.index, v.query);
            if let Some(e) = &v.error {
                println!("    {}: {}", e.stage, e.message);
            }
            if let (Some(p), Some(g)) = (&v.canonical_predicted, &v.canonical_gold) {
                println!("    got  {p}\n    want {g}");
            }
        }
        println!();
    }
    Ok(())
}
