//! Parameter budgets of the compared encoders, checked against instantiated
//! models.
//!
//!     cargo run --example param_accounting

use std::sync::Arc;

use ctrn::bench::{budget_table, param_count, Dims, LstmBaseline, ModelKind};
use ctrn::encoder::EmbeddingTable;
use ctrn::{EncoderKind, Model, ModelConfig};

fn main() -> ctrn::Result<()> {
    let dims = Dims::default();
    print!("{}", budget_table(&ModelKind::ALL, dims)?);

    // The table counts gate banks and the composing layer; the model also
    // carries a projection and a 2-way softmax, which are reported apart.
    let emb = Arc::new(EmbeddingTable::random(10, 300, 0.1, 0));
    for kind in [EncoderKind::Qrnn, EncoderKind::Ctrn] {
        let cfg = ModelConfig {
            m: 300,
            d: 512,
            h: 128,
            k: 2,
            kind,
            conv_bias: false,
            ..ModelConfig::default()
        };
        let model = Model::new(cfg, Arc::clone(&emb), 0)?;
        println!(
            "{kind}: registry {} (formula {}), all trainable {}",
            model.registry_count(),
            param_count(ModelKind::Qrnn, dims)?,
            model.trainable_count()
        );
    }
    let lstm = LstmBaseline::new(emb, 300, 512, 128, false, 0)?;
    println!(
        "lstm: registry {} (formula {})",
        lstm.registry_count(),
        param_count(ModelKind::Lstm, dims)?
    );

    println!("\nunshared question/answer banks add 3kdm:");
    let cfg = ModelConfig {
        m: 300,
        d: 512,
        shared_banks: false,
        conv_bias: false,
        ..ModelConfig::default()
    };
    let split = Model::new(cfg, Arc::new(EmbeddingTable::random(10, 300, 0.1, 0)), 0)?;
    println!("  registry {}", split.registry_count());
    Ok(())
}
