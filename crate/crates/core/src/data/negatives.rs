use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::QAInstance;

/// A candidate answer available for negative sampling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolEntry {
    pub query_id: String,
    pub answer: Vec<String>,
}

/// Follows each positive with `count` label-0 pairs whose answers come from
/// other queries in `pool`. See [`sample_negatives_with`].
pub fn sample_negatives(positives: &[QAInstance], pool: &[PoolEntry], count: usize, seed: u64) -> Vec<QAInstance> {
    sample_negatives_with(positives, pool, count, seed, |p, e| p.query_id != e.query_id)
}

/// Like [`sample_negatives`] with a custom eligibility test. Draws are
/// without replacement from the eligible pool; when fewer than `count`
/// entries are eligible the draws fall back to sampling with replacement and
/// a warning is logged. Non-positive inputs pass through untouched.
pub fn sample_negatives_with(
    positives: &[QAInstance],
    pool: &[PoolEntry],
    count: usize,
    seed: u64,
    eligible: impl Fn(&QAInstance, &PoolEntry) -> bool,
) -> Vec<QAInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(positives.len() * (count + 1));
    for pos in positives {
        out.push(pos.clone());
        if count == 0 || pos.label != 1 {
            continue;
        }
        let candidates: Vec<&PoolEntry> = pool.iter().filter(|e| eligible(pos, e)).collect();
        if candidates.is_empty() {
            log::warn!("no eligible negatives for query {}", pos.query_id);
            continue;
        }
        let drawn: Vec<&PoolEntry> = if candidates.len() >= count {
            candidates.choose_multiple(&mut rng, count).copied().collect()
        } else {
            log::warn!(
                "query {}: only {} eligible negatives for {count} draws, sampling with replacement",
                pos.query_id,
                candidates.len()
            );
            (0..count)
                .map(|_| candidates[rng.gen_range(0..candidates.len())])
                .collect()
        };
        for e in drawn {
            out.push(QAInstance {
                query_id: pos.query_id.clone(),
                question: pos.question.clone(),
                answer: e.answer.clone(),
                label: 0,
            });
        }
    }
    out
}
