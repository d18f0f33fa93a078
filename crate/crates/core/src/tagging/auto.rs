use std::sync::Arc;

use super::compose::{compose_tag_sequence, disambiguate_by_context, CondLexicon};
use super::embedding::{EmbeddingMapper, EmbeddingStore};
use super::lexical::map_relations_lexical;
use super::tags::TaggedQuery;
use super::value_index::{map_values_tfidf, ValueIndex};
use super::TagError;
use crate::schema_graph::Schema;

#[derive(Debug, Clone, PartialEq)]
pub struct TaggerConfig {
    pub lexical_threshold: f64,
    pub embedding_threshold: f64,
    pub cond_lexicon: CondLexicon,
    /// Multiplier for value candidates whose table is mentioned elsewhere; 1 disables.
    pub context_boost: f64,
}

impl Default for TaggerConfig {
    fn default() -> Self {
        TaggerConfig {
            lexical_threshold: 0.8,
            embedding_threshold: 0.6,
            cond_lexicon: CondLexicon::default(),
            context_boost: 2.0,
        }
    }
}

/// Unsupervised keyword mapper: value index, then lexical relation
/// matching, then embeddings, composed by priority.
#[derive(Debug, Clone)]
pub struct AutoTagger {
    schema: Arc<Schema>,
    index: Arc<ValueIndex>,
    embedding: Option<EmbeddingMapper>,
    config: TaggerConfig,
}

impl AutoTagger {
    pub fn new(
        schema: Arc<Schema>,
        index: Arc<ValueIndex>,
        store: Option<Arc<EmbeddingStore>>,
        config: TaggerConfig,
    ) -> Result<Self, TagError> {
        let embedding = store
            .map(|s| EmbeddingMapper::new(s, &schema, &index, config.embedding_threshold))
            .transpose()?;
        Ok(AutoTagger {
            schema,
            index,
            embedding,
            config,
        })
    }

    pub fn config(&self) -> &TaggerConfig {
        &self.config
    }

    pub fn tag(&self, tokens: &[String]) -> Result<TaggedQuery, TagError> {
        let mut layers = vec![
            map_values_tfidf(&self.index, tokens),
            map_relations_lexical(&self.schema, tokens, self.config.lexical_threshold)?,
        ];
        if let Some(e) = &self.embedding {
            layers.push(e.map(tokens)?);
        }
        let mut q = compose_tag_sequence(&layers, &self.config.cond_lexicon)?;
        disambiguate_by_context(&mut q, self.config.context_boost);
        Ok(q)
    }
}
