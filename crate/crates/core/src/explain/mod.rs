//! Perturbation-based explanations of per-token tag predictions.
//!
//! Masked tokens are replaced in place by [`PLACEHOLDER`](crate::tagging::PLACEHOLDER)
//! so positions never shift; the probability of the explained token's tag is
//! then regressed on the presence mask with an exponential locality kernel.

mod lime;
mod perturb;
mod surrogate;

use thiserror::Error;

use crate::tagging::{AutoTagger, Distribution, TagError};

pub use lime::{
    apply_mask, explain_query, explain_token, kernel_weight, Contribution, Explanation, FitStatus,
    LimeConfig,
};
pub use perturb::{generate_perturbations, resolve_mode, Mask, PerturbationMode, MAX_EXHAUSTIVE};
pub use surrogate::{fit_weighted_ridge, LinearFit};

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("cannot explain an empty query")]
    EmptyQuery,
    #[error("sampled mode needs at least one sample")]
    NoSamples,
    #[error("exhaustive perturbation supports at most 16 tokens, got {0}")]
    TooManyTokensForExhaustive(usize),
    #[error("token index {index} out of range for {len} tokens")]
    TokenIndex { index: usize, len: usize },
    #[error("token {0} is tagged O and is not explained")]
    NotExplainable(usize),
    #[error("black box returned {found} distributions for {expected} tokens")]
    OutputLength { expected: usize, found: usize },
    #[error("black box failed: {0}")]
    BlackBox(#[from] TagError),
}

/// A tagger seen only through its per-token tag probabilities.
///
/// Implementations must return one distribution per input token, be
/// deterministic, and treat the placeholder token as carrying no evidence.
pub trait BlackBox: Sync {
    fn predict(&self, tokens: &[String]) -> Result<Vec<Distribution>, ExplainError>;
}

impl<F> BlackBox for F
where
    F: Fn(&[String]) -> Vec<Distribution> + Sync,
{
    fn predict(&self, tokens: &[String]) -> Result<Vec<Distribution>, ExplainError> {
        Ok(self(tokens))
    }
}

impl BlackBox for AutoTagger {
    fn predict(&self, tokens: &[String]) -> Result<Vec<Distribution>, ExplainError> {
        Ok(self.tag(tokens)?.distributions_or_point())
    }
}
