//! Tokenization and keyword mapping: type tags, schema tags and per-token
//! tag distributions.

mod auto;
mod compose;
mod embedding;
mod gold;
mod lexical;
mod tags;
mod tokenize;
mod value_index;

use thiserror::Error;

pub use auto::{AutoTagger, TaggerConfig};
pub use compose::{compose_tag_sequence, disambiguate_by_context, CondLexicon};
pub use embedding::{cosine, map_with_embeddings, EmbeddingMapper, EmbeddingStore};
pub use gold::{load_gold_tags, write_gold_tags, GoldQuery};
pub use lexical::{map_relations_lexical, name_similarity};
pub use tags::{consistent, Distribution, SchemaTag, TagForm, TaggedQuery, TypeTag, SUM_TOLERANCE};
pub use tokenize::{is_placeholder, normalize_phrase, preprocess_and_tokenize, token_texts, Token, PLACEHOLDER};
pub use value_index::{build_value_index, map_values_tfidf, IndexStats, Posting, ValueIndex, MAX_NGRAM};

#[derive(Debug, Error)]
pub enum TagError {
    #[error("unknown type tag `{0}`")]
    UnknownTypeTag(String),
    #[error("malformed schema tag `{0}`")]
    MalformedSchemaTag(String),
    #[error("token {index}: type tag {type_tag} cannot carry schema tag `{schema_tag}`")]
    Inconsistent {
        index: usize,
        type_tag: TypeTag,
        schema_tag: SchemaTag,
    },
    #[error("schema tag `{0}` does not name a table or non-key column of the schema")]
    UnknownSchemaElement(SchemaTag),
    #[error("parallel tag lists differ in length")]
    LengthMismatch,
    #[error("distribution for token {0} does not sum to 1 or disagrees with its tag")]
    BadDistribution(usize),
    #[error("layers disagree on the token sequence")]
    LayerMismatch,
    #[error("value corpus row {row}: {message}")]
    Corpus { row: usize, message: String },
    #[error("embedding file line {line}: {message}")]
    Embedding { line: usize, message: String },
    #[error("vector dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("threshold {0} out of range")]
    InvalidThreshold(f64),
    #[error("gold tag file line {line}: {message}")]
    Gold { line: usize, message: String },
}
