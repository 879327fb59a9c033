use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{QAInstance, Vocabulary};
use crate::encoder::PAD_ID;
use crate::head::{overlap_features, IdfTable, Stopwords};
use crate::model::PairExample;

/// A QA pair mapped to token ids, with overlap features when enabled.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedInstance {
    pub query_id: String,
    pub question: Vec<u32>,
    pub answer: Vec<u32>,
    pub label: u8,
    pub extra: Option<[f64; 4]>,
}

impl EncodedInstance {
    pub fn example(&self) -> PairExample<'_> {
        PairExample {
            question: &self.question,
            answer: &self.answer,
            extra: self.extra,
        }
    }
}

/// Maps tokens to ids; computes overlap features when `overlap` is given.
pub fn encode_instances(
    instances: &[QAInstance],
    vocab: &Vocabulary,
    overlap: Option<(&IdfTable, &Stopwords)>,
) -> Vec<EncodedInstance> {
    instances
        .iter()
        .map(|inst| EncodedInstance {
            query_id: inst.query_id.clone(),
            question: vocab.encode(&inst.question),
            answer: vocab.encode(&inst.answer),
            label: inst.label,
            extra: overlap.map(|(idf, stop)| overlap_features(&inst.question, &inst.answer, idf, stop)),
        })
        .collect()
}

/// Padded id matrices for a batch of pairs. Row `i` of `q_ids` holds the
/// question followed by `PAD` up to the batch maximum; `q_mask[i][t]` is true
/// exactly for `t < q_len[i]`. Same for answers.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceBatch {
    pub q_ids: Vec<Vec<u32>>,
    pub a_ids: Vec<Vec<u32>>,
    pub q_len: Vec<usize>,
    pub a_len: Vec<usize>,
    pub q_mask: Vec<Vec<bool>>,
    pub a_mask: Vec<Vec<bool>>,
    pub labels: Vec<u8>,
    pub extras: Vec<Option<[f64; 4]>>,
    /// Position of each row in the instance list the batch was cut from.
    pub indices: Vec<usize>,
}

fn pad(seqs: &[&[u32]]) -> (Vec<Vec<u32>>, Vec<usize>, Vec<Vec<bool>>) {
    let max = seqs.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut ids = Vec::with_capacity(seqs.len());
    let mut masks = Vec::with_capacity(seqs.len());
    for s in seqs {
        let mut row = s.to_vec();
        row.resize(max, PAD_ID);
        ids.push(row);
        masks.push((0..max).map(|t| t < s.len()).collect());
    }
    (ids, seqs.iter().map(|s| s.len()).collect(), masks)
}

impl SequenceBatch {
    pub fn from_instances(instances: &[EncodedInstance], indices: &[usize]) -> Self {
        let rows: Vec<&EncodedInstance> = indices.iter().map(|&i| &instances[i]).collect();
        let qs: Vec<&[u32]> = rows.iter().map(|r| r.question.as_slice()).collect();
        let as_: Vec<&[u32]> = rows.iter().map(|r| r.answer.as_slice()).collect();
        let (q_ids, q_len, q_mask) = pad(&qs);
        let (a_ids, a_len, a_mask) = pad(&as_);
        SequenceBatch {
            q_ids,
            a_ids,
            q_len,
            a_len,
            q_mask,
            a_mask,
            labels: rows.iter().map(|r| r.label).collect(),
            extras: rows.iter().map(|r| r.extra).collect(),
            indices: indices.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn max_q_len(&self) -> usize {
        self.q_ids.first().map_or(0, Vec::len)
    }

    pub fn max_a_len(&self) -> usize {
        self.a_ids.first().map_or(0, Vec::len)
    }

    /// Row `i` cut back to its true lengths.
    pub fn example(&self, i: usize) -> PairExample<'_> {
        PairExample {
            question: &self.q_ids[i][..self.q_len[i]],
            answer: &self.a_ids[i][..self.a_len[i]],
            extra: self.extras[i],
        }
    }
}

/// Cuts a seeded permutation of `instances` into batches of `batch_size`;
/// the last batch may be smaller.
pub fn make_batches(instances: &[EncodedInstance], batch_size: usize, seed: u64) -> Vec<SequenceBatch> {
    assert!(batch_size > 0, "batch size must be positive");
    let mut order: Vec<usize> = (0..instances.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
        .chunks(batch_size)
        .map(|idx| SequenceBatch::from_instances(instances, idx))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(q: usize, a: usize) -> EncodedInstance {
        EncodedInstance {
            query_id: format!("q{q}{a}"),
            question: (0..q as u32).map(|i| i + 2).collect(),
            answer: (0..a as u32).map(|i| i + 2).collect(),
            label: 1,
            extra: None,
        }
    }

    #[test]
    fn single_row_batch_has_own_length() {
        let b = SequenceBatch::from_instances(&[inst(4, 2)], &[0]);
        assert_eq!(b.max_q_len(), 4);
        assert_eq!(b.q_mask[0], vec![true; 4]);
    }

    #[test]
    fn shorter_row_is_padded_and_masked() {
        let b = SequenceBatch::from_instances(&[inst(3, 1), inst(5, 1)], &[0, 1]);
        assert_eq!(b.q_ids[0], vec![2, 3, 4, PAD_ID, PAD_ID]);
        assert_eq!(b.q_mask[0], vec![true, true, true, false, false]);
        assert_eq!(b.example(0).question, &[2, 3, 4]);
    }

    #[test]
    fn seeded_composition() {
        let data: Vec<_> = (1..12).map(|i| inst(i, i)).collect();
        assert_eq!(make_batches(&data, 4, 5), make_batches(&data, 4, 5));
        assert_eq!(make_batches(&data, 4, 5).last().unwrap().len(), 3);
    }

    proptest! {
        #[test]
        fn every_instance_once_per_epoch(n in 1usize..60, size in 1usize..17, seed: u64) {
            let data: Vec<_> = (0..n).map(|i| inst(i % 7 + 1, i % 5 + 1)).collect();
            let mut seen: Vec<usize> = make_batches(&data, size, seed)
                .iter()
                .flat_map(|b| {
                    for i in 0..b.len() {
                        let ex = b.example(i);
                        let orig = &data[b.indices[i]];
                        assert_eq!(ex.question, orig.question.as_slice());
                        assert_eq!(ex.answer, orig.answer.as_slice());
                    }
                    b.indices.clone()
                })
                .collect();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
        }
    }
}
