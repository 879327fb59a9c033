//! From raw text (`query_id, label, question, answer` TSV) to model input: TSV parsing, vocabulary, an embedding file,
//! word-overlap features and a padded batch.
//!
//!     cargo run --example ingest_overlap

use ctrn::data::{encode_instances, parse_embeddings, parse_tsv, SequenceBatch, Vocabulary};
use ctrn::head::{IdfTable, Stopwords};
use ctrn::{Model, ModelConfig};

const CORPUS: &str = "\
q1\t1\twhat is the capital of france ?\tparis is the capital of france .
q1\t0\twhat is the capital of france ?\tberlin is a large city .
q2\t1\twho wrote hamlet ?\thamlet was written by shakespeare .
q2\t0\twho wrote hamlet ?\tthe globe is a theatre in london .
";

const VECTORS: &str = "\
4 3
paris 0.9 0.1 0.0
france 0.8 0.2 0.1
hamlet 0.0 0.9 0.3
shakespeare 0.1 0.8 0.4
";

fn main() -> ctrn::Result<()> {
    let instances = parse_tsv(CORPUS, None)?;
    let vocab = Vocabulary::build(instances.iter().flat_map(|i| [&i.question, &i.answer]));
    println!("{} pairs, vocabulary of {} (PAD and OOV included)", instances.len(), vocab.len());

    // Words missing from the file get small seeded random vectors.
    let table = parse_embeddings(VECTORS, 3, &vocab, 0)?;

    let idf = IdfTable::from_documents(instances.iter().flat_map(|i| [&i.question, &i.answer]));
    let stop = Stopwords::english();
    let encoded = encode_instances(&instances, &vocab, Some((&idf, &stop)));
    for e in &encoded {
        println!("{} label {}  overlap {:.3?}", e.query_id, e.label, e.extra.unwrap());
    }

    let batch = SequenceBatch::from_instances(&encoded, &[0, 1, 2, 3]);
    println!("\npadded question ids:");
    for (ids, len) in batch.q_ids.iter().zip(&batch.q_len) {
        println!("  {ids:?} (true length {len})");
    }

    let cfg = ModelConfig {
        m: 4,
        d: 8,
        h: 6,
        overlap_features: true,
        ..ModelConfig::default()
    };
    let model = Model::new(cfg, table, 0)?;
    println!("\nuntrained scores {:.4?}", model.score_batch(&batch)?);
    Ok(())
}
