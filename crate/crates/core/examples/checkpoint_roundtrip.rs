//! Trains briefly, saves a checkpoint, reloads it and confirms the scores are
//! bit-identical.
//!
//!     cargo run --release --example checkpoint_roundtrip

use std::sync::Arc;

use ctrn::checkpoint::Checkpoint;
use ctrn::data::{encode_instances, SyntheticConfig, Vocabulary};
use ctrn::encoder::EmbeddingTable;
use ctrn::optim::{evaluate, train_with, TrainConfig};

fn main() -> ctrn::Result<()> {
    let synth = SyntheticConfig {
        queries: 60,
        ..SyntheticConfig::default()
    };
    let (train_raw, dev_raw) = synth.generate_split(50);
    let vocab = Vocabulary::build(train_raw.iter().chain(&dev_raw).flat_map(|i| [&i.question, &i.answer]));
    let table = Arc::new(EmbeddingTable::random(vocab.len(), 16, 1.0, 0));
    let train = encode_instances(&train_raw, &vocab, None);
    let dev = encode_instances(&dev_raw, &vocab, None);
    let cfg = TrainConfig {
        d: 128,
        m: 16,
        h: 32,
        epochs: 3,
        ..TrainConfig::default()
    };
    let outcome = train_with(&train, &dev, table, &cfg, |_| {})?;
    let (before, _) = evaluate(&outcome.model, &dev)?;

    let path = std::env::temp_dir().join("ctrn-example.ckpt");
    Checkpoint {
        config: cfg,
        vocab,
        model: outcome.model,
        overlap: None,
    }
    .save(&path)?;
    let restored = Checkpoint::load(&path)?;
    let (after, _) = evaluate(&restored.model, &dev)?;
    println!("before save: {before}");
    println!("after load:  {after}");
    println!("{} bytes at {}", std::fs::metadata(&path)?.len(), path.display());
    Ok(())
}
