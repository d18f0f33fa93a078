use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ExplainError;

/// Largest token count for which every mask can be enumerated.
pub const MAX_EXHAUSTIVE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationMode {
    /// Random removal count, then a random subset of that size.
    Sampled,
    /// All `2^n` masks.
    Exhaustive,
    /// Exhaustive when `2^n` does not exceed the sample budget, sampled otherwise.
    Auto,
}

impl std::str::FromStr for PerturbationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sampled" => Ok(PerturbationMode::Sampled),
            "exhaustive" => Ok(PerturbationMode::Exhaustive),
            "auto" => Ok(PerturbationMode::Auto),
            other => Err(format!("unknown perturbation mode `{other}`")),
        }
    }
}

/// Presence mask: `true` keeps the token, `false` masks it.
pub type Mask = Vec<bool>;

pub fn resolve_mode(mode: PerturbationMode, n: usize, samples: usize) -> PerturbationMode {
    match mode {
        PerturbationMode::Auto if n <= MAX_EXHAUSTIVE && (1usize << n) <= samples => {
            PerturbationMode::Exhaustive
        }
        PerturbationMode::Auto => PerturbationMode::Sampled,
        m => m,
    }
}

/// Masks for `n` tokens. The all-ones mask always comes first.
pub fn generate_perturbations(
    n: usize,
    samples: usize,
    seed: u64,
    mode: PerturbationMode,
) -> Result<Vec<Mask>, ExplainError> {
    if n == 0 {
        return Err(ExplainError::EmptyQuery);
    }
    match resolve_mode(mode, n, samples) {
        PerturbationMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE {
                return Err(ExplainError::TooManyTokensForExhaustive(n));
            }
            let total = 1usize << n;
            Ok((0..total)
                .rev()
                .map(|k| (0..n).map(|j| (k >> j) & 1 == 1).collect())
                .collect())
        }
        _ => {
            if samples == 0 {
                return Err(ExplainError::NoSamples);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(samples);
            out.push(vec![true; n]);
            while out.len() < samples {
                let removed = rng.random_range(0..n);
                let mut mask = vec![true; n];
                for i in index::sample(&mut rng, n, removed) {
                    mask[i] = false;
                }
                out.push(mask);
            }
            Ok(out)
        }
    }
}
