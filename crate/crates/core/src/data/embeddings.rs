use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Vocabulary;
use crate::encoder::{EmbeddingTable, PAD_ID};
use crate::numkit::Tensor;
use crate::{Error, Result};

/// Reads a text embedding file (`token v1 … vn` per line) into a table
/// aligned with `vocab`. See [`parse_embeddings`].
pub fn load_embeddings(path: impl AsRef<Path>, n: usize, vocab: &Vocabulary, seed: u64) -> Result<EmbeddingTable> {
    let text = fs::read_to_string(path)?;
    parse_embeddings(&text, n, vocab, seed)
}

/// Vocabulary tokens found in the text get their file vector; every other
/// row except padding is drawn uniformly from `±0.25/√n` by a generator
/// seeded with `seed`, walking ids in order. Padding stays zero.
///
/// Blank lines are skipped, as is a leading `count dim` header line.
/// Any line whose value count differs from `n` is a parse error.
pub fn parse_embeddings(text: &str, n: usize, vocab: &Vocabulary, seed: u64) -> Result<EmbeddingTable> {
    if n == 0 {
        return Err(Error::config("embedding_dim", "must be positive"));
    }
    let mut found: HashMap<u32, Vec<f64>> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let mut fields = line.split_whitespace();
        let Some(token) = fields.next() else { continue };
        let rest: Vec<&str> = fields.collect();
        if lineno == 1 && rest.len() == 1 && n != 1 && token.parse::<usize>().is_ok() && rest[0].parse::<usize>().is_ok() {
            continue;
        }
        if rest.len() != n {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {n} values after `{token}`, found {}", rest.len()),
            });
        }
        let values = rest
            .iter()
            .map(|v| match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(Error::Parse {
                    line: lineno,
                    msg: format!("bad value `{v}`"),
                }),
            })
            .collect::<Result<Vec<f64>>>()?;
        if vocab.contains(token) {
            found.entry(vocab.id(token)).or_insert(values);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 0.25 / (n as f64).sqrt();
    let mut data = Vec::with_capacity(vocab.len() * n);
    for (id, _) in vocab.iter() {
        if id == PAD_ID {
            data.extend(std::iter::repeat(0.0).take(n));
        } else if let Some(v) = found.get(&id) {
            data.extend_from_slice(v);
        } else {
            data.extend((0..n).map(|_| rng.gen_range(-bound..=bound)));
        }
    }
    EmbeddingTable::from_tensor(Tensor::from_vec(&[vocab.len(), n], data)?)
}
