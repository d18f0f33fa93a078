use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::perturb::{generate_perturbations, Mask, PerturbationMode};
use super::surrogate::fit_weighted_ridge;
use super::{BlackBox, ExplainError};
use crate::tagging::{SchemaTag, TaggedQuery, TypeTag, PLACEHOLDER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimeConfig {
    pub samples: usize,
    pub seed: u64,
    /// Width of the exponential kernel over the masked-token fraction.
    pub kernel_width: f64,
    pub ridge: f64,
    pub mode: PerturbationMode,
    /// Explain tokens tagged `O` as well.
    pub include_other: bool,
}

impl Default for LimeConfig {
    fn default() -> Self {
        LimeConfig {
            samples: 1000,
            seed: 0,
            kernel_width: 0.25,
            ridge: 1e-3,
            mode: PerturbationMode::Auto,
            include_other: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitStatus {
    Ok,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub index: usize,
    pub token: String,
    pub score: f64,
}

/// Signed per-token evidence for one token's predicted schema tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub token_index: usize,
    pub target_tag: SchemaTag,
    pub contributions: Vec<Contribution>,
    pub intercept: f64,
    pub samples: usize,
    pub seed: u64,
    pub status: FitStatus,
}

impl Explanation {
    /// Contributions ordered by decreasing absolute score.
    pub fn ranked(&self) -> Vec<&Contribution> {
        let mut v: Vec<_> = self.contributions.iter().collect();
        v.sort_by(|a, b| b.score.abs().total_cmp(&a.score.abs()).then(a.index.cmp(&b.index)));
        v
    }

    pub fn score_of(&self, index: usize) -> Option<f64> {
        self.contributions.iter().find(|c| c.index == index).map(|c| c.score)
    }
}

/// Exponential kernel `exp(-d^2 / width^2)` on the masked fraction `d`.
pub fn kernel_weight(mask: &[bool], width: f64) -> f64 {
    let masked = mask.iter().filter(|&&m| !m).count() as f64;
    let d = masked / mask.len() as f64;
    (-(d * d) / (width * width)).exp()
}

/// Tokens with masked positions replaced in place by the placeholder.
pub fn apply_mask(tokens: &[String], mask: &[bool]) -> Vec<String> {
    tokens
        .iter()
        .zip(mask)
        .map(|(t, &keep)| if keep { t.clone() } else { PLACEHOLDER.to_string() })
        .collect()
}

/// Target-tag probability at `index` for every mask, with duplicate masks
/// evaluated once.
pub(crate) fn probe<B: BlackBox + ?Sized>(
    bb: &B,
    tokens: &[String],
    index: usize,
    target: &SchemaTag,
    masks: &[Mask],
) -> Result<Vec<f64>, ExplainError> {
    let mut cache: HashMap<&Mask, f64> = HashMap::new();
    let mut out = Vec::with_capacity(masks.len());
    for m in masks {
        if let Some(&y) = cache.get(m) {
            out.push(y);
            continue;
        }
        let dists = bb.predict(&apply_mask(tokens, m))?;
        if dists.len() != tokens.len() {
            return Err(ExplainError::OutputLength {
                expected: tokens.len(),
                found: dists.len(),
            });
        }
        let y = dists[index].prob(target);
        cache.insert(m, y);
        out.push(y);
    }
    Ok(out)
}

/// Explains why the black box assigns `query`'s schema tag to one token.
pub fn explain_token<B: BlackBox + ?Sized>(
    bb: &B,
    query: &TaggedQuery,
    token_index: usize,
    config: &LimeConfig,
) -> Result<Explanation, ExplainError> {
    let n = query.len();
    if token_index >= n {
        return Err(ExplainError::TokenIndex { index: token_index, len: n });
    }
    if query.type_tags[token_index] == TypeTag::Other && !config.include_other {
        return Err(ExplainError::NotExplainable(token_index));
    }
    let target = query.schema_tags[token_index].clone();
    let masks = generate_perturbations(n, config.samples, config.seed, config.mode)?;
    let ys = probe(bb, &query.tokens, token_index, &target, &masks)?;
    let weights: Vec<f64> = masks.iter().map(|m| kernel_weight(m, config.kernel_width)).collect();
    let features: Vec<Vec<f64>> = masks
        .iter()
        .map(|m| m.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
        .collect();

    let spread = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - ys.iter().copied().fold(f64::INFINITY, f64::min);
    let fit = if spread.abs() < 1e-12 {
        None
    } else {
        fit_weighted_ridge(&features, &ys, &weights, config.ridge)
    };
    let (status, intercept, scores) = match fit {
        Some(f) => (FitStatus::Ok, f.intercept, f.coefficients),
        None => (FitStatus::Degenerate, ys[0], vec![0.0; n]),
    };
    let contributions = scores
        .into_iter()
        .enumerate()
        .map(|(i, score)| Contribution {
            index: i,
            token: query.tokens[i].clone(),
            score,
        })
        .collect();
    Ok(Explanation {
        token_index,
        target_tag: target,
        contributions,
        intercept,
        samples: masks.len(),
        seed: config.seed,
        status,
    })
}

/// Explains every token not tagged `O`, in token order. Token `i` uses seed
/// `config.seed ^ i`; a failure on one token does not stop the others.
pub fn explain_query<B: BlackBox + ?Sized>(
    bb: &B,
    query: &TaggedQuery,
    config: &LimeConfig,
) -> Vec<Result<Explanation, ExplainError>> {
    (0..query.len())
        .filter(|&i| query.type_tags[i] != TypeTag::Other)
        .map(|i| {
            let cfg = LimeConfig {
                seed: config.seed ^ i as u64,
                ..config.clone()
            };
            explain_token(bb, query, i, &cfg)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagging::{is_placeholder, Distribution};

    fn query(tokens: &[&str], tagged: &[usize]) -> TaggedQuery {
        let mut q = TaggedQuery::untagged(tokens.iter().map(|s| s.to_string()).collect());
        for &i in tagged {
            q.type_tags[i] = TypeTag::Table;
            q.schema_tags[i] = SchemaTag::table("t");
        }
        q.distributions = None;
        q
    }

    fn presence_box(tokens: &[String]) -> Vec<Distribution> {
        // P(t) at every position equals the share of tokens present
        let present = tokens.iter().filter(|t| !is_placeholder(t)).count() as f64 / tokens.len() as f64;
        tokens
            .iter()
            .map(|_| {
                Distribution::from_scores([
                    (SchemaTag::table("t"), present),
                    (SchemaTag::other(), 1.0 - present + 1e-9),
                ])
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn single_token_self_evidence() {
        let q = query(&["director"], &[0]);
        let bb = |toks: &[String]| {
            let tag = if is_placeholder(&toks[0]) { SchemaTag::other() } else { SchemaTag::table("t") };
            vec![Distribution::point(tag)]
        };
        let cfg = LimeConfig { mode: PerturbationMode::Exhaustive, ..LimeConfig::default() };
        let e = explain_token(&bb, &q, 0, &cfg).unwrap();
        assert_eq!(e.contributions.len(), 1);
        assert!(e.contributions[0].score > 0.0);
        assert_eq!(e.status, FitStatus::Ok);
    }

    #[test]
    fn other_tokens_need_override() {
        let q = query(&["a", "b"], &[0]);
        let cfg = LimeConfig::default();
        assert!(matches!(
            explain_token(&presence_box, &q, 1, &cfg),
            Err(ExplainError::NotExplainable(1))
        ));
        let cfg = LimeConfig { include_other: true, ..cfg };
        assert!(explain_token(&presence_box, &q, 1, &cfg).is_ok());
        assert!(matches!(
            explain_token(&presence_box, &q, 5, &cfg),
            Err(ExplainError::TokenIndex { .. })
        ));
    }

    #[test]
    fn constant_box_is_degenerate() {
        let q = query(&["a", "b", "c"], &[1]);
        let bb = |toks: &[String]| vec![Distribution::point(SchemaTag::table("t")); toks.len()];
        let e = explain_token(&bb, &q, 1, &LimeConfig::default()).unwrap();
        assert_eq!(e.status, FitStatus::Degenerate);
        assert!(e.contributions.iter().all(|c| c.score == 0.0));
    }

    #[test]
    fn wrong_output_length() {
        let q = query(&["a", "b"], &[0]);
        let bb = |_: &[String]| vec![Distribution::point(SchemaTag::other())];
        assert!(matches!(
            explain_token(&bb, &q, 0, &LimeConfig::default()),
            Err(ExplainError::OutputLength { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn query_batch_skips_other_and_keeps_going() {
        let q = query(&["a", "b", "c"], &[0, 2]);
        let res = explain_query(&presence_box, &q, &LimeConfig::default());
        assert_eq!(res.len(), 2);
        let e0 = res[0].as_ref().unwrap();
        let e2 = res[1].as_ref().unwrap();
        assert_eq!(e0.token_index, 0);
        assert_eq!(e2.token_index, 2);
        assert_eq!(e2.seed, 2);
        assert!(explain_query(&presence_box, &query(&["a"], &[]), &LimeConfig::default()).is_empty());
    }

    #[test]
    fn kernel_values() {
        assert_eq!(kernel_weight(&[true, true], 0.25), 1.0);
        let w = kernel_weight(&[true, false], 0.25);
        assert!((w - (-4.0f64).exp()).abs() < 1e-15);
    }
}
