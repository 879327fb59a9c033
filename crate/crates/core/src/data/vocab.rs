use std::collections::HashMap;

use crate::encoder::OOV_ID;

pub const PAD_TOKEN: &str = "<pad>";
pub const OOV_TOKEN: &str = "<unk>";

/// Lowercases and splits on whitespace; ASCII punctuation becomes its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut word = String::new();
        for ch in chunk.chars() {
            if ch.is_ascii_punctuation() {
                if !word.is_empty() {
                    out.push(std::mem::take(&mut word));
                }
                out.push(ch.to_string());
            } else {
                word.extend(ch.to_lowercase());
            }
        }
        if !word.is_empty() {
            out.push(word);
        }
    }
    out
}

/// Frozen token ↔ id map. Ids 0 and 1 are reserved for padding and unknown
/// tokens; the rest follow corpus frequency, ties broken lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn build<'a, I, D>(docs: I) -> Self
    where
        I: IntoIterator<Item = D>,
        D: IntoIterator<Item = &'a String>,
    {
        let mut counts: HashMap<&'a str, usize> = HashMap::new();
        for doc in docs {
            for tok in doc {
                *counts.entry(tok.as_str()).or_default() += 1;
            }
        }
        let mut ranked: Vec<(&str, usize)> = counts
            .into_iter()
            .filter(|(t, _)| *t != PAD_TOKEN && *t != OOV_TOKEN)
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Vocabulary::from_tokens(ranked.into_iter().map(|(t, _)| t.to_string()))
    }

    /// Rebuilds a vocabulary from its non-reserved tokens in id order.
    pub fn from_tokens(tokens: impl IntoIterator<Item = String>) -> Self {
        let mut all = vec![PAD_TOKEN.to_string(), OOV_TOKEN.to_string()];
        all.extend(tokens);
        let index = all
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocabulary { tokens: all, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    /// Always false: the reserved entries are present.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> u32 {
        self.index.get(token).copied().unwrap_or(OOV_ID)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn encode(&self, tokens: &[String]) -> Vec<u32> {
        tokens.iter().map(|t| self.id(t)).collect()
    }

    pub fn decode(&self, ids: &[u32]) -> Vec<String> {
        ids.iter()
            .map(|&id| self.token(id).unwrap_or(OOV_TOKEN).to_string())
            .collect()
    }

    /// Tokens with id ≥ 2, in id order.
    pub fn regular_tokens(&self) -> &[String] {
        &self.tokens[2..]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> {
        self.tokens.iter().enumerate().map(|(i, t)| (i as u32, t.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::PAD_ID;
    use proptest::prelude::*;

    #[test]
    fn tokenizer_splits_punctuation() {
        assert_eq!(
            tokenize("What's  the Capital?"),
            vec!["what", "'", "s", "the", "capital", "?"]
        );
        assert!(tokenize("   ").is_empty());
    }

    #[test]
    fn ordering_by_frequency_then_lexicographic() {
        let docs: Vec<Vec<String>> = vec![
            tokenize("b a c"),
            tokenize("c b"),
            tokenize("c"),
        ];
        let v = Vocabulary::build(&docs);
        assert_eq!(v.regular_tokens(), &["c", "b", "a"]);
        assert_eq!(v.id("c"), 2);
        assert_eq!(v.id("zzz"), OOV_ID);
        assert_eq!(v.token(PAD_ID), Some(PAD_TOKEN));
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(words in prop::collection::vec("[a-z]{1,6}", 1..20)) {
            let text = words.join(" ");
            let toks = tokenize(&text);
            let v = Vocabulary::build([&toks]);
            prop_assert_eq!(v.decode(&v.encode(&toks)), toks);
        }
    }
}
