use serde::{Deserialize, Serialize};

/// Stand-in for a masked token. Every mapper treats it as a guaranteed miss.
pub const PLACEHOLDER: &str = "\u{2400}";

const STRIPPED: &[char] = &[',', '\'', '"', '?', '.', '!', ';', ':', '(', ')'];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    /// Character offset of the token's first character in the raw query.
    pub offset: usize,
}

/// Removes punctuation and splits on whitespace, preserving case.
pub fn preprocess_and_tokenize(raw: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current: Option<Token> = None;
    for (i, ch) in raw.chars().enumerate() {
        if ch.is_whitespace() {
            tokens.extend(current.take());
        } else if STRIPPED.contains(&ch) {
            continue;
        } else {
            current
                .get_or_insert_with(|| Token {
                    text: String::new(),
                    offset: i,
                })
                .text
                .push(ch);
        }
    }
    tokens.extend(current);
    tokens
}

pub fn token_texts(raw: &str) -> Vec<String> {
    preprocess_and_tokenize(raw).into_iter().map(|t| t.text).collect()
}

/// Lower-cased, punctuation-free, single-space-joined form used as an index key.
pub fn normalize_phrase(text: &str) -> String {
    token_texts(text)
        .iter()
        .map(|t| t.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn is_placeholder(token: &str) -> bool {
    token == PLACEHOLDER
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_query() {
        let toks = preprocess_and_tokenize(
            "Who is the director of the series House of Cards produced by Netflix?",
        );
        assert_eq!(toks.len(), 13);
        assert_eq!(toks.last().unwrap().text, "Netflix");
        assert_eq!(toks[3].text, "director");
        assert_eq!(toks[3].offset, 11);
    }

    #[test]
    fn whitespace_only() {
        assert!(preprocess_and_tokenize("   ").is_empty());
        assert!(preprocess_and_tokenize("?! ,").is_empty());
    }

    #[test]
    fn quoted_title() {
        let toks = preprocess_and_tokenize("'House of Cards'");
        let texts: Vec<_> = toks.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, ["House", "of", "Cards"]);
        assert_eq!(toks[0].offset, 1);
        assert_eq!(toks[2].offset, 10);
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_phrase("  House of  Cards! "), "house of cards");
    }
}
