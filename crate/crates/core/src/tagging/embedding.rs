//! Word-vector store and the cosine-similarity keyword mapper.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::lexical::{check_threshold, relation_candidates};
use super::tags::{Distribution, SchemaTag, TaggedQuery, TypeTag};
use super::tokenize::is_placeholder;
use super::value_index::{ValueIndex, MAX_NGRAM};
use super::TagError;
use crate::schema_graph::Schema;

#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingStore {
    pub fn new(dim: usize) -> Result<Self, TagError> {
        if dim == 0 {
            return Err(TagError::Embedding {
                line: 0,
                message: "dimension must be positive".into(),
            });
        }
        Ok(EmbeddingStore {
            dim,
            vectors: HashMap::new(),
        })
    }

    pub fn insert(&mut self, word: impl Into<String>, vector: Vec<f64>) -> Result<(), TagError> {
        if vector.len() != self.dim {
            return Err(TagError::DimensionMismatch {
                expected: self.dim,
                found: vector.len(),
            });
        }
        self.vectors.insert(word.into(), vector);
        Ok(())
    }

    /// Parses the word2vec text format: a `<count> <dim>` header then one
    /// `word v1 .. vdim` line per word.
    pub fn parse(text: &str) -> Result<Self, TagError> {
        let err = |line: usize, message: String| TagError::Embedding { line, message };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        let [count, dim] = head[..] else {
            return Err(err(1, "header must be `<count> <dim>`".into()));
        };
        let count: usize = count.parse().map_err(|_| err(1, format!("bad count `{count}`")))?;
        let dim: usize = dim.parse().map_err(|_| err(1, format!("bad dimension `{dim}`")))?;
        let mut store = EmbeddingStore::new(dim)?;
        for (i, line) in lines {
            let mut parts = line.split_whitespace();
            let word = parts.next().expect("non-blank line");
            let vector = parts
                .map(|p| p.parse::<f64>().map_err(|_| err(i + 1, format!("bad float `{p}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            if vector.len() != dim {
                return Err(err(i + 1, format!("expected {dim} components, found {}", vector.len())));
            }
            store.vectors.insert(word.to_string(), vector);
        }
        if store.vectors.len() != count {
            return Err(err(
                1,
                format!("header announces {count} words, found {}", store.vectors.len()),
            ));
        }
        Ok(store)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Exact lookup, falling back to the lower-cased word.
    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors
            .get(word)
            .or_else(|| self.vectors.get(&word.to_lowercase()))
            .map(Vec::as_slice)
    }

    /// Mean vector of the words; `None` if any word is out of vocabulary.
    pub fn phrase_vector<S: AsRef<str>>(&self, words: &[S]) -> Option<Vec<f64>> {
        if words.is_empty() {
            return None;
        }
        let mut acc = vec![0.0; self.dim];
        for w in words {
            let v = self.get(w.as_ref())?;
            acc.iter_mut().zip(v).for_each(|(a, x)| *a += x);
        }
        let n = words.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Some(acc)
    }

    /// Vector for a schema identifier: the identifier itself if known,
    /// otherwise the mean of its underscore-separated parts.
    pub fn name_vector(&self, name: &str) -> Option<Vec<f64>> {
        if let Some(v) = self.get(name) {
            return Some(v.to_vec());
        }
        let parts: Vec<&str> = name.split('_').filter(|p| !p.is_empty()).collect();
        if parts.len() > 1 {
            self.phrase_vector(&parts)
        } else {
            None
        }
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, TagError> {
    if a.len() != b.len() {
        return Err(TagError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok(dot / (na * nb))
}

#[derive(Debug, Clone)]
struct Candidate {
    words: usize,
    type_tag: TypeTag,
    tag: SchemaTag,
    vector: Vec<f64>,
}

/// Embedding mapper with candidate vectors precomputed for one schema and index.
#[derive(Debug, Clone)]
pub struct EmbeddingMapper {
    store: Arc<EmbeddingStore>,
    candidates: Vec<Candidate>,
    threshold: f64,
}

impl EmbeddingMapper {
    pub fn new(
        store: Arc<EmbeddingStore>,
        schema: &Schema,
        index: &ValueIndex,
        threshold: f64,
    ) -> Result<Self, TagError> {
        check_threshold(threshold, true)?;
        let mut candidates = Vec::new();
        for (name, type_tag, tag) in relation_candidates(schema) {
            if let Some(vector) = store.name_vector(&name) {
                candidates.push(Candidate {
                    words: 1,
                    type_tag,
                    tag,
                    vector,
                });
            }
        }
        for (key, postings) in index.entries() {
            let words: Vec<&str> = key.split(' ').collect();
            let Some(vector) = store.phrase_vector(&words) else {
                continue;
            };
            for p in postings {
                candidates.push(Candidate {
                    words: words.len(),
                    type_tag: TypeTag::Value,
                    tag: p.tag(),
                    vector: vector.clone(),
                });
            }
        }
        Ok(EmbeddingMapper {
            store,
            candidates,
            threshold,
        })
    }

    pub fn map(&self, tokens: &[String]) -> Result<TaggedQuery, TagError> {
        let mut out = TaggedQuery::untagged(tokens.to_vec());
        let dists = out.distributions.as_mut().expect("untagged has distributions");
        let mut claimed = vec![false; tokens.len()];
        for n in (1..=MAX_NGRAM.min(tokens.len())).rev() {
            for start in 0..=tokens.len() - n {
                let span = start..start + n;
                if claimed[span.clone()].iter().any(|&c| c)
                    || tokens[span.clone()].iter().any(|t| is_placeholder(t))
                {
                    continue;
                }
                let Some(query_vec) = self.store.phrase_vector(&tokens[span.clone()]) else {
                    continue;
                };
                let mut best: BTreeMap<&SchemaTag, (f64, TypeTag)> = BTreeMap::new();
                for c in self.candidates.iter().filter(|c| c.words == n) {
                    let sim = cosine(&query_vec, &c.vector)?;
                    if sim < self.threshold {
                        continue;
                    }
                    let e = best.entry(&c.tag).or_insert((f64::NEG_INFINITY, c.type_tag));
                    if sim > e.0 {
                        *e = (sim, c.type_tag);
                    }
                }
                let Some(dist) =
                    Distribution::from_scores(best.iter().map(|(t, (s, _))| ((*t).clone(), *s)))
                else {
                    continue;
                };
                let winner = dist.argmax().expect("non-empty").clone();
                let ty = best[&winner].1;
                for i in span {
                    claimed[i] = true;
                    out.type_tags[i] = ty;
                    out.schema_tags[i] = winner.clone();
                    dists[i] = dist.clone();
                }
            }
        }
        Ok(out)
    }
}

/// One-shot form of [`EmbeddingMapper::map`].
pub fn map_with_embeddings(
    store: Arc<EmbeddingStore>,
    schema: &Schema,
    index: &ValueIndex,
    tokens: &[String],
    threshold: f64,
) -> Result<TaggedQuery, TagError> {
    EmbeddingMapper::new(store, schema, index, threshold)?.map(tokens)
}
