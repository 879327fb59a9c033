use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use crate::Result;

/// Inverse document frequencies, `ln(N / df)`. Unseen tokens get `ln(N)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdfTable {
    n_docs: usize,
    df: HashMap<String, usize>,
}

impl IdfTable {
    pub fn from_documents<'a, I, D>(docs: I) -> Self
    where
        I: IntoIterator<Item = D>,
        D: IntoIterator<Item = &'a String>,
    {
        let mut df: HashMap<String, usize> = HashMap::new();
        let mut n_docs = 0;
        for doc in docs {
            n_docs += 1;
            let uniq: HashSet<&String> = doc.into_iter().collect();
            for tok in uniq {
                *df.entry(tok.clone()).or_default() += 1;
            }
        }
        IdfTable { n_docs, df }
    }

    pub fn from_parts(n_docs: usize, df: HashMap<String, usize>) -> Self {
        IdfTable { n_docs, df }
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn document_frequencies(&self) -> &HashMap<String, usize> {
        &self.df
    }

    pub fn idf(&self, token: &str) -> f64 {
        let n = self.n_docs.max(1) as f64;
        match self.df.get(token) {
            Some(&df) if df > 0 => (n / df as f64).ln(),
            _ => n.ln(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Stopwords(HashSet<String>);

const ENGLISH: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "did", "do", "does", "for", "from", "had",
    "has", "have", "he", "her", "his", "how", "i", "in", "is", "it", "its", "of", "on", "or",
    "she", "that", "the", "their", "they", "this", "to", "was", "were", "what", "when", "where",
    "which", "who", "whom", "why", "will", "with", "you",
];

impl Stopwords {
    /// One token per line; blank lines are skipped and tokens lowercased.
    pub fn from_text(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect(),
        )
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::from_text(&std::fs::read_to_string(path)?))
    }

    pub fn english() -> Self {
        Stopwords(ENGLISH.iter().map(|s| s.to_string()).collect())
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sorted for stable serialization.
    pub fn to_sorted_vec(&self) -> Vec<String> {
        let mut v: Vec<String> = self.0.iter().cloned().collect();
        v.sort();
        v
    }
}

fn mass(tokens: &BTreeSet<&str>, idf: &IdfTable) -> f64 {
    // fold from +0.0: an empty float sum is -0.0
    tokens.iter().fold(0.0, |acc, t| acc + idf.idf(t))
}

fn ratios(q: &BTreeSet<&str>, a: &BTreeSet<&str>, idf: &IdfTable) -> (f64, f64) {
    let denom = (q.len() + a.len()) as f64;
    if denom == 0.0 {
        return (0.0, 0.0);
    }
    let shared: BTreeSet<&str> = q.intersection(a).copied().collect();
    let plain = shared.len() as f64 / denom;
    let w_denom = mass(q, idf) + mass(a, idf);
    let weighted = if w_denom > 0.0 { mass(&shared, idf) / w_denom } else { 0.0 };
    (plain, weighted)
}

/// `[overlap, idf-weighted overlap, overlap without stopwords, idf-weighted
/// overlap without stopwords]`, each `|Q ∩ A|`-style mass divided by the
/// summed mass of both token sets, so every value lies in `[0, 0.5]`.
/// Sets are walked in sorted order so the sums are reproducible.
pub fn overlap_features(q: &[String], a: &[String], idf: &IdfTable, stop: &Stopwords) -> [f64; 4] {
    let qs: BTreeSet<&str> = q.iter().map(String::as_str).collect();
    let as_: BTreeSet<&str> = a.iter().map(String::as_str).collect();
    let (o, wo) = ratios(&qs, &as_, idf);
    let qf: BTreeSet<&str> = qs.iter().copied().filter(|t| !stop.contains(t)).collect();
    let af: BTreeSet<&str> = as_.iter().copied().filter(|t| !stop.contains(t)).collect();
    let (os, wos) = ratios(&qf, &af, idf);
    [o, wo, os, wos]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn idf() -> IdfTable {
        let docs = [toks("the cat sat"), toks("the dog ran"), toks("a bird flew")];
        IdfTable::from_documents(docs.iter())
    }

    #[test]
    fn identical_sequences() {
        let q = toks("cat sat dog");
        let f = overlap_features(&q, &q, &idf(), &Stopwords::default());
        assert_eq!(f, [0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn disjoint_sequences() {
        let f = overlap_features(&toks("cat sat"), &toks("dog ran"), &idf(), &Stopwords::english());
        assert_eq!(f, [0.0; 4]);
        assert!(f.iter().all(|v| v.is_sign_positive()));
    }

    #[test]
    fn stopwords_only() {
        let q = toks("the a of");
        let f = overlap_features(&q, &q, &idf(), &Stopwords::english());
        assert_eq!(f[0], 0.5);
        assert_eq!(f[1], 0.5);
        assert_eq!(f[2], 0.0);
        assert_eq!(f[3], 0.0);
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(overlap_features(&[], &[], &idf(), &Stopwords::english()), [0.0; 4]);
    }

    #[test]
    fn idf_values() {
        let t = idf();
        assert!((t.idf("the") - (3.0f64 / 2.0).ln()).abs() < 1e-15);
        assert!((t.idf("never-seen") - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn stopword_file_format() {
        let s = Stopwords::from_text("The\n\n  of \nand\n");
        assert_eq!(s.to_sorted_vec(), vec!["and", "of", "the"]);
    }
}
