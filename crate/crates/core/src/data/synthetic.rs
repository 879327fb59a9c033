use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sample_negatives_with, PoolEntry, QAInstance};

/// A separable keyword-matching corpus: every query belongs to one topic,
/// its question and its positive answer both contain that topic's keyword
/// among random filler words, and negatives are answers drawn from queries
/// of other topics.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub queries: usize,
    pub topics: usize,
    pub filler_vocab: usize,
    /// Filler words per question, inclusive range.
    pub question_filler: (usize, usize),
    pub answer_filler: (usize, usize),
    /// Copies of the keyword inserted into each question and positive answer.
    pub keyword_repeats: usize,
    pub negatives: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            queries: 500,
            topics: 8,
            filler_vocab: 200,
            question_filler: (4, 8),
            answer_filler: (5, 10),
            keyword_repeats: 5,
            negatives: 4,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn keyword(topic: usize) -> String {
        format!("topic{topic}")
    }

    fn sentence(&self, rng: &mut ChaCha8Rng, filler: (usize, usize), keyword: &str) -> Vec<String> {
        let n = rng.gen_range(filler.0..=filler.1);
        let mut words: Vec<String> = (0..n)
            .map(|_| format!("w{}", rng.gen_range(0..self.filler_vocab)))
            .collect();
        for _ in 0..self.keyword_repeats.max(1) {
            let at = rng.gen_range(0..=words.len());
            words.insert(at, keyword.to_string());
        }
        words
    }

    fn positives(&self) -> (Vec<QAInstance>, HashMap<String, usize>) {
        assert!(self.topics >= 2, "need at least two topics");
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut topic_of = HashMap::new();
        let mut positives = Vec::with_capacity(self.queries);
        for i in 0..self.queries {
            let topic = rng.gen_range(0..self.topics);
            let kw = Self::keyword(topic);
            let query_id = format!("q{i:04}");
            topic_of.insert(query_id.clone(), topic);
            positives.push(QAInstance {
                question: self.sentence(&mut rng, self.question_filler, &kw),
                answer: self.sentence(&mut rng, self.answer_filler, &kw),
                query_id,
                label: 1,
            });
        }
        (positives, topic_of)
    }

    fn with_negatives(&self, positives: &[QAInstance], topic_of: &HashMap<String, usize>, salt: u64) -> Vec<QAInstance> {
        let pool: Vec<PoolEntry> = positives
            .iter()
            .map(|p| PoolEntry {
                query_id: p.query_id.clone(),
                answer: p.answer.clone(),
            })
            .collect();
        sample_negatives_with(positives, &pool, self.negatives, self.seed ^ salt, |p, e| {
            topic_of[&p.query_id] != topic_of[&e.query_id]
        })
    }

    /// Query ids are `q0000`, `q0001`, …; each positive is followed by its
    /// negatives, drawn from the answers of the whole corpus.
    pub fn generate(&self) -> Vec<QAInstance> {
        let (positives, topic_of) = self.positives();
        self.with_negatives(&positives, &topic_of, 0x5eed)
    }

    /// Splits the queries first (the first `train_queries` go to training)
    /// and samples each side's negatives only from answers on that side, so
    /// no dev answer is ever seen during training.
    pub fn generate_split(&self, train_queries: usize) -> (Vec<QAInstance>, Vec<QAInstance>) {
        let (positives, topic_of) = self.positives();
        let cut = train_queries.min(positives.len());
        (
            self.with_negatives(&positives[..cut], &topic_of, 0x5eed),
            self.with_negatives(&positives[cut..], &topic_of, 0xde5),
        )
    }
}

/// Splits by query: the first `train_queries` distinct query ids (in order of
/// appearance) go to the first set, the rest to the second.
pub fn split_by_query(instances: &[QAInstance], train_queries: usize) -> (Vec<QAInstance>, Vec<QAInstance>) {
    let mut seen = HashSet::new();
    let mut train = Vec::new();
    let mut rest = Vec::new();
    for inst in instances {
        if !seen.contains(&inst.query_id) && seen.len() < train_queries {
            seen.insert(inst.query_id.clone());
        }
        if seen.contains(&inst.query_id) {
            train.push(inst.clone());
        } else {
            rest.push(inst.clone());
        }
    }
    (train, rest)
}
