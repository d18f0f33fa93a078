//! Per-database `config.toml`. Every key is optional and falls back to the
//! library defaults.

use serde::Deserialize;

use crate::explain::{LimeConfig, PerturbationMode};
use crate::tagging::{CondLexicon, TaggerConfig};
use crate::translate::{AggregateLexicon, OperatorLexicon, TranslateOptions, DEFAULT_PREV_WINDOW};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkspaceConfig {
    pub tagger: TaggerSection,
    pub translate: TranslateSection,
    pub lime: LimeSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaggerSection {
    pub lexical_threshold: f64,
    pub embedding_threshold: f64,
    pub context_boost: f64,
    pub cond_words: Option<Vec<String>>,
}

impl Default for TaggerSection {
    fn default() -> Self {
        let d = TaggerConfig::default();
        TaggerSection {
            lexical_threshold: d.lexical_threshold,
            embedding_threshold: d.embedding_threshold,
            context_boost: d.context_boost,
            cond_words: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TranslateSection {
    pub prev_window: usize,
    pub cond_operators: bool,
    pub sum_keywords: Option<Vec<String>>,
    pub count_keywords: Option<Vec<String>>,
    pub avg_keywords: Option<Vec<String>>,
}

impl Default for TranslateSection {
    fn default() -> Self {
        TranslateSection {
            prev_window: DEFAULT_PREV_WINDOW,
            cond_operators: false,
            sum_keywords: None,
            count_keywords: None,
            avg_keywords: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimeSection {
    pub samples: usize,
    pub seed: u64,
    pub kernel_width: f64,
    pub ridge: f64,
    pub mode: PerturbationMode,
}

impl Default for LimeSection {
    fn default() -> Self {
        let d = LimeConfig::default();
        LimeSection {
            samples: d.samples,
            seed: d.seed,
            kernel_width: d.kernel_width,
            ridge: d.ridge,
            mode: d.mode,
        }
    }
}

impl WorkspaceConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn tagger_config(&self) -> TaggerConfig {
        let t = &self.tagger;
        TaggerConfig {
            lexical_threshold: t.lexical_threshold,
            embedding_threshold: t.embedding_threshold,
            cond_lexicon: t
                .cond_words
                .as_ref()
                .map(CondLexicon::new)
                .unwrap_or_default(),
            context_boost: t.context_boost,
        }
    }

    pub fn translate_options(&self) -> TranslateOptions {
        let t = &self.translate;
        let d = AggregateLexicon::default();
        let pick = |words: &Option<Vec<String>>, fallback: &std::collections::BTreeSet<String>| {
            words.clone().unwrap_or_else(|| fallback.iter().cloned().collect())
        };
        TranslateOptions {
            prev_window: t.prev_window,
            aggregates: AggregateLexicon::new(
                pick(&t.sum_keywords, &d.sum),
                pick(&t.count_keywords, &d.count),
                pick(&t.avg_keywords, &d.avg),
            ),
            operators: t.cond_operators.then(OperatorLexicon::default),
        }
    }

    pub fn lime_config(&self) -> LimeConfig {
        let l = &self.lime;
        LimeConfig {
            samples: l.samples,
            seed: l.seed,
            kernel_width: l.kernel_width,
            ridge: l.ridge,
            mode: l.mode,
            include_other: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = WorkspaceConfig::parse("").unwrap();
        assert_eq!(c.tagger_config(), TaggerConfig::default());
        assert_eq!(c.lime_config(), LimeConfig::default());
        let t = c.translate_options();
        assert_eq!(t.prev_window, 3);
        assert_eq!(t.aggregates, AggregateLexicon::default());
        assert!(t.operators.is_none());
    }

    #[test]
    fn overrides_and_unknown_keys() {
        let c = WorkspaceConfig::parse(
            "[translate]\nprev_window = 5\ncond_operators = true\ncount_keywords = [\"Tally\"]\n",
        )
        .unwrap();
        let t = c.translate_options();
        assert_eq!(t.prev_window, 5);
        assert!(t.operators.is_some());
        assert!(t.aggregates.count.contains("tally"));
        assert!(WorkspaceConfig::parse("[lime]\nsample = 3\n").is_err());
    }
}
