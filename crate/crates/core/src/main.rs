use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;

use nlidb::schema_graph::{export_graph, ExportFormat, Highlight};
use nlidb::service::{
    bench, handle_translate, router, run_eval, ApiError, Registry, TaggerMode, TranslateRequest,
    WorkspaceBundle,
};
use nlidb::tagging::{build_value_index, load_gold_tags, GoldQuery};
use nlidb::translate::translate;

#[derive(Parser)]
#[command(name = "nlidb", version, about = "Explainable natural-language-to-SQL translation")]
struct Cli {
    /// Directory holding one subdirectory per database. NLIDB_WORKSPACE takes precedence.
    #[arg(long, global = true, default_value = ".")]
    workspace: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the JSON API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Translate one question and print the full response.
    Translate {
        #[arg(long)]
        db: String,
        #[arg(long)]
        query: String,
        /// Gold tag file to take the query's tags from.
        #[arg(long)]
        tags: Option<PathBuf>,
        #[arg(long)]
        explain: bool,
        #[arg(long, default_value = "auto")]
        tagger: TaggerMode,
    },
    Graph {
        #[command(subcommand)]
        command: GraphCommand,
    },
    Index {
        #[command(subcommand)]
        command: IndexCommand,
    },
    /// Score a gold corpus.
    Eval {
        #[arg(long)]
        db: String,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "gold")]
        tagger: TaggerMode,
        /// Print the table summary instead of the JSON report.
        #[arg(long)]
        summary: bool,
    },
    /// Median tagging and translation time per corpus query.
    Bench {
        #[arg(long)]
        db: String,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "auto")]
        tagger: TaggerMode,
        #[arg(long, default_value_t = 100)]
        runs: usize,
    },
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Print the schema graph as DOT or JSON.
    Export {
        #[arg(long)]
        db: String,
        #[arg(long, default_value = "dot")]
        format: ExportFormat,
        /// Highlight the join path of this question's translation.
        #[arg(long)]
        highlight_from_query: Option<String>,
        #[arg(long, default_value = "auto")]
        tagger: TaggerMode,
    },
}

#[derive(Subcommand)]
enum IndexCommand {
    /// Build the value index from a TSV corpus and print its statistics.
    Build {
        #[arg(long)]
        db: String,
        #[arg(long)]
        values: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, ApiError> {
    std::fs::read_to_string(path).map_err(|e| ApiError::new("request", format!("{}: {e}", path.display())))
}

fn load_corpus(path: &Path) -> Result<Vec<GoldQuery>, ApiError> {
    load_gold_tags(&read(path)?).map_err(|e| ApiError::new("request", e))
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("response types serialize")
}

/// A fresh copy of `db`'s bundle whose corpus is replaced by `corpus`.
fn with_corpus(reg: &Registry, db: &str, corpus: Vec<GoldQuery>) -> Result<WorkspaceBundle, ApiError> {
    let dir = reg.get(db)?.dir.clone();
    let mut b = WorkspaceBundle::load(&dir)?;
    b.corpus = corpus;
    Ok(b)
}

fn run(cli: Cli) -> Result<String, ApiError> {
    let root = std::env::var_os("NLIDB_WORKSPACE").map_or(cli.workspace, PathBuf::from);
    let reg = Registry::open(&root)?;
    match cli.command {
        Command::Serve { port } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| ApiError::new("internal", e))?;
            rt.block_on(async move {
                let addr = std::net::SocketAddr::from(([127, 0, 0, 1], port));
                let listener = tokio::net::TcpListener::bind(addr).await?;
                eprintln!("serving {} database(s) on http://{addr}", reg.names().len());
                axum::serve(listener, router(Arc::new(reg))).await
            })
            .map_err(|e| ApiError::new("internal", e))?;
            Ok(String::new())
        }
        Command::Translate {
            db,
            query,
            tags,
            explain,
            tagger,
        } => {
            let (reg, tagger) = match tags {
                Some(path) => {
                    let b = with_corpus(&reg, &db, load_corpus(&path)?)?;
                    (Registry::from_bundles([b]), TaggerMode::Gold)
                }
                None => (reg, tagger),
            };
            let req = TranslateRequest {
                db,
                query,
                tagger,
                explain,
            };
            handle_translate(&reg, &req).map(|r| json(&r))
        }
        Command::Graph {
            command:
                GraphCommand::Export {
                    db,
                    format,
                    highlight_from_query,
                    tagger,
                },
        } => {
            let bundle = reg.get(&db)?;
            let highlight = match highlight_from_query {
                Some(q) => {
                    let (_, tagged) = nlidb::service::tag_query(&bundle, &q, tagger)?;
                    let t = translate(&tagged, &bundle.schema, &bundle.graph, &bundle.translate_options())
                        .map_err(|e| ApiError::new(e.stage.as_str(), e.error))?;
                    Highlight::from_paths(&t.plan.paths)
                }
                None => Highlight::new(),
            };
            export_graph(&bundle.graph, &highlight, format).map_err(|e| ApiError::new("internal", e))
        }
        Command::Index {
            command: IndexCommand::Build { db, values },
        } => {
            let bundle = reg.get(&db)?;
            let index = build_value_index(&read(&values)?).map_err(|e| ApiError::new("index", e))?;
            index
                .validate_against(&bundle.schema)
                .map_err(|e| ApiError::new("index", e))?;
            Ok(json(index.stats()))
        }
        Command::Eval {
            db,
            corpus,
            tagger,
            summary,
        } => {
            let bundle = reg.get(&db)?;
            let corpus = load_corpus(&corpus)?;
            let report = run_eval(&bundle, &corpus, tagger);
            Ok(if summary { report.summary() } else { json(&report) })
        }
        Command::Bench {
            db,
            corpus,
            tagger,
            runs,
        } => {
            let bundle = reg.get(&db)?;
            let corpus = load_corpus(&corpus)?;
            Ok(json(&bench(&bundle, &corpus, tagger, runs)))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            if !out.is_empty() {
                println!("{}", out.trim_end());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", json(&e));
            ExitCode::FAILURE
        }
    }
}
