//! Builds the schema graph of the bundled movie database, lists the shortest
//! join paths between two tables and prints the graph as DOT with one of them
//! highlighted.
//!
//! cargo run --example schema_graph | dot -Tsvg > movie.svg

use std::path::Path;

use nlidb::schema_graph::{export_graph, extract_graph, load_schema, ExportFormat, Highlight};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/movie/schema.json");
    let schema = load_schema(&std::fs::read_to_string(path)?)?;
    let graph = extract_graph(&schema);
    eprintln!("{} nodes, {} edges", graph.node_count(), graph.edge_count());

    let paths = graph.find_shortest_paths("table:actor", "table:director")?;
    for p in &paths {
        eprintln!("  {}", p.nodes.join(" - "));
    }
    let highlight = Highlight::from_paths(paths.first());
    print!("{}", export_graph(&graph, &highlight, ExportFormat::Dot)?);
    Ok(())
}
