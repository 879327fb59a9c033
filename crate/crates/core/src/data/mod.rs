//! Corpus ingestion: tokenization, vocabularies, embedding files, QA TSV
//! corpora, negative sampling, padded batches and a synthetic keyword corpus.

mod batch;
mod embeddings;
mod negatives;
mod synthetic;
mod tsv;
mod vocab;

pub use batch::{encode_instances, make_batches, EncodedInstance, SequenceBatch};
pub use embeddings::{load_embeddings, parse_embeddings};
pub use negatives::{sample_negatives, sample_negatives_with, PoolEntry};
pub use synthetic::{split_by_query, SyntheticConfig};
pub use tsv::{parse_tsv, read_tsv, write_tsv, LengthFilter, QAInstance};
pub use vocab::{tokenize, Vocabulary, OOV_TOKEN, PAD_TOKEN};
