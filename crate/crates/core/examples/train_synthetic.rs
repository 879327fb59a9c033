//! Trains a crossed ranker on the synthetic keyword corpus and reports dev
//! ranking quality per epoch.
//!
//!     cargo run --release --example train_synthetic

use std::sync::Arc;
use std::time::Instant;

use ctrn::data::{encode_instances, SyntheticConfig, Vocabulary};
use ctrn::encoder::EmbeddingTable;
use ctrn::optim::{train_with, TrainConfig};

fn main() -> ctrn::Result<()> {
    // Negatives are drawn within each split, so no dev answer is ever a
    // training negative.
    let (train_raw, dev_raw) = SyntheticConfig::default().generate_split(400);
    let vocab = Vocabulary::build(train_raw.iter().chain(&dev_raw).flat_map(|i| [&i.question, &i.answer]));
    let table = Arc::new(EmbeddingTable::random(vocab.len(), 32, 1.0, 7));
    let train = encode_instances(&train_raw, &vocab, None);
    let dev = encode_instances(&dev_raw, &vocab, None);

    let cfg = TrainConfig {
        d: 128,
        m: 32,
        h: 64,
        epochs: 30,
        ..TrainConfig::default()
    };
    println!(
        "{} train pairs, {} dev pairs, vocabulary {}",
        train.len(),
        dev.len(),
        vocab.len()
    );
    let start = Instant::now();
    let outcome = train_with(&train, &dev, table, &cfg, |e| {
        println!(
            "epoch {:>2}  loss {:.4}  dev MAP {:.4}  ({:.1}s)",
            e.epoch, e.train_loss, e.dev_metric, e.seconds
        );
    })?;
    println!(
        "best epoch {}: {}  [{:.1}s total]",
        outcome.best_epoch,
        outcome.best_dev,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
