//! Compares every hand-written gradient of a small model against central
//! finite differences of the loss.
//!
//!     cargo run --release --example gradient_check

use ctrn::encoder::EmbeddingTable;
use ctrn::numkit::gradcheck::{compare, numeric_gradient, DEFAULT_STEP, DEFAULT_TOLERANCE};
use ctrn::{EncoderKind, Model, ModelConfig, PairExample};

fn main() -> ctrn::Result<()> {
    let lambda = 4e-6;
    let q = [2u32, 5, 3, 7, 4];
    let a = [6u32, 8, 2, 9, 3, 1];
    let ex = PairExample::new(&q, &a);

    for (kind, shared) in [(EncoderKind::Ctrn, true), (EncoderKind::Ctrn, false), (EncoderKind::Qrnn, true)] {
        let cfg = ModelConfig {
            m: 4,
            d: 3,
            h: 5,
            kind,
            shared_banks: shared,
            ..ModelConfig::default()
        };
        let mut model = Model::new(cfg, EmbeddingTable::random(10, 5, 1.0, 1), 42)?;
        model.zero_grad();
        model.accumulate(&ex, 0, None)?;
        model.accumulate_l2_grad(lambda);

        println!("{kind}, shared banks: {shared}");
        let names: Vec<String> = model.params().into_iter().map(|(n, _, _)| n).collect();
        for name in names {
            let analytic = model.param_mut(&name).unwrap().grad.data().to_vec();
            let mut values = model.param_mut(&name).unwrap().value.data().to_vec();
            let numeric = numeric_gradient(&mut values, DEFAULT_STEP, |v| {
                model.param_mut(&name).unwrap().value.data_mut().copy_from_slice(v);
                model.loss(&[(ex, 0)], lambda).unwrap().total
            });
            model.param_mut(&name).unwrap().value.data_mut().copy_from_slice(&values);
            let r = compare(&analytic, &numeric);
            let verdict = if r.passes(DEFAULT_TOLERANCE) { "ok" } else { "MISMATCH" };
            println!("  {name:<28} {:>3} values  max rel err {:.2e}  {verdict}", r.checked, r.max_rel_error);
        }
    }
    Ok(())
}
