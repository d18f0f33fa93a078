//! On-disk database bundles and the shared registry the server reads from.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use super::config::WorkspaceConfig;
use super::ServiceError;
use crate::explain::LimeConfig;
use crate::schema_graph::{extract_graph, load_schema, Schema, SchemaGraph};
use crate::tagging::{
    build_value_index, load_gold_tags, token_texts, AutoTagger, EmbeddingStore, GoldQuery,
    ValueIndex,
};
use crate::translate::TranslateOptions;

pub const SCHEMA_FILE: &str = "schema.json";
pub const VALUES_FILE: &str = "values.tsv";
pub const EMBEDDINGS_FILE: &str = "embeddings.txt";
pub const CORPUS_FILE: &str = "corpus.tags";
pub const CONFIG_FILE: &str = "config.toml";

fn read(path: &Path) -> Result<String, ServiceError> {
    fs::read_to_string(path).map_err(|source| ServiceError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_optional(path: &Path) -> Result<Option<String>, ServiceError> {
    if path.exists() {
        read(path).map(Some)
    } else {
        Ok(None)
    }
}

/// Everything needed to tag, explain and translate queries against one database.
#[derive(Debug)]
pub struct WorkspaceBundle {
    pub dir: PathBuf,
    pub schema: Arc<Schema>,
    pub graph: Arc<SchemaGraph>,
    pub index: Arc<ValueIndex>,
    pub embeddings: Option<Arc<EmbeddingStore>>,
    pub corpus: Vec<GoldQuery>,
    pub config: WorkspaceConfig,
    pub tagger: AutoTagger,
}

impl WorkspaceBundle {
    /// Loads a bundle directory. `schema.json` and `values.tsv` are required.
    pub fn load(dir: &Path) -> Result<Self, ServiceError> {
        let at = |f: &str| dir.join(f);
        let schema = load_schema(&read(&at(SCHEMA_FILE))?)?;
        let index = build_value_index(&read(&at(VALUES_FILE))?).map_err(|e| ServiceError::File {
            path: at(VALUES_FILE),
            message: e.to_string(),
        })?;
        index.validate_against(&schema)?;
        let embeddings = read_optional(&at(EMBEDDINGS_FILE))?
            .map(|t| EmbeddingStore::parse(&t))
            .transpose()
            .map_err(|e| ServiceError::File {
                path: at(EMBEDDINGS_FILE),
                message: e.to_string(),
            })?
            .map(Arc::new);
        let corpus = match read_optional(&at(CORPUS_FILE))? {
            Some(t) => load_gold_tags(&t).map_err(|e| ServiceError::File {
                path: at(CORPUS_FILE),
                message: e.to_string(),
            })?,
            None => Vec::new(),
        };
        for q in &corpus {
            q.tagged.validate_against(&schema)?;
        }
        let config = match read_optional(&at(CONFIG_FILE))? {
            Some(t) => WorkspaceConfig::parse(&t).map_err(|e| ServiceError::File {
                path: at(CONFIG_FILE),
                message: e.to_string(),
            })?,
            None => WorkspaceConfig::default(),
        };
        Self::from_parts(dir.to_path_buf(), schema, index, embeddings, corpus, config)
    }

    pub fn from_parts(
        dir: PathBuf,
        schema: Schema,
        index: ValueIndex,
        embeddings: Option<Arc<EmbeddingStore>>,
        corpus: Vec<GoldQuery>,
        config: WorkspaceConfig,
    ) -> Result<Self, ServiceError> {
        let graph = Arc::new(extract_graph(&schema));
        let schema = Arc::new(schema);
        let index = Arc::new(index);
        let tagger = AutoTagger::new(
            schema.clone(),
            index.clone(),
            embeddings.clone(),
            config.tagger_config(),
        )?;
        Ok(WorkspaceBundle {
            dir,
            schema,
            graph,
            index,
            embeddings,
            corpus,
            config,
            tagger,
        })
    }

    pub fn name(&self) -> &str {
        &self.schema.name
    }

    pub fn translate_options(&self) -> TranslateOptions {
        self.config.translate_options()
    }

    pub fn lime_config(&self) -> LimeConfig {
        self.config.lime_config()
    }

    /// Gold entry whose tokens equal the tokenized query text.
    pub fn gold_for(&self, query: &str) -> Option<&GoldQuery> {
        let tokens = token_texts(query);
        self.corpus.iter().find(|g| g.tagged.tokens == tokens)
    }
}

/// Loaded bundles keyed by schema name. Reloading swaps the whole map under
/// the write lock, so readers never observe a partially loaded workspace.
#[derive(Debug, Default)]
pub struct Registry {
    root: Option<PathBuf>,
    dbs: RwLock<BTreeMap<String, Arc<WorkspaceBundle>>>,
}

impl Registry {
    /// Loads every subdirectory of `root` that contains a schema file.
    pub fn open(root: &Path) -> Result<Self, ServiceError> {
        let reg = Registry {
            root: Some(root.to_path_buf()),
            dbs: RwLock::default(),
        };
        reg.reload()?;
        Ok(reg)
    }

    pub fn from_bundles(bundles: impl IntoIterator<Item = WorkspaceBundle>) -> Self {
        let dbs = bundles
            .into_iter()
            .map(|b| (b.name().to_string(), Arc::new(b)))
            .collect();
        Registry {
            root: None,
            dbs: RwLock::new(dbs),
        }
    }

    pub fn reload(&self) -> Result<(), ServiceError> {
        let Some(root) = &self.root else {
            return Ok(());
        };
        let entries = fs::read_dir(root).map_err(|source| ServiceError::Io {
            path: root.clone(),
            source,
        })?;
        let mut dirs: Vec<PathBuf> = entries
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.join(SCHEMA_FILE).is_file())
            .collect();
        if root.join(SCHEMA_FILE).is_file() {
            dirs.push(root.clone());
        }
        let mut map = BTreeMap::new();
        for d in dirs {
            let b = WorkspaceBundle::load(&d)?;
            if let Some(prev) = map.insert(b.name().to_string(), Arc::new(b)) {
                return Err(ServiceError::DuplicateDb(prev.name().to_string()));
            }
        }
        *self.dbs.write().expect("registry lock poisoned") = map;
        Ok(())
    }

    pub fn get(&self, db: &str) -> Result<Arc<WorkspaceBundle>, ServiceError> {
        self.dbs
            .read()
            .expect("registry lock poisoned")
            .get(db)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownDb(db.to_string()))
    }

    pub fn names(&self) -> Vec<String> {
        self.dbs.read().expect("registry lock poisoned").keys().cloned().collect()
    }
}
