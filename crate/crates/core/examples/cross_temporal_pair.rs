//! Runs the crossed cell on a question/answer pair of different lengths and
//! contrasts it with plain quasi-recurrent pooling.
//!
//!     cargo run --example cross_temporal_pair

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ctrn::encoder::{alignment, compute_gates, ctrn_pair, fo_pool_raw, EmbeddingTable, GateBanks, Projection, embed_project};
use ctrn::head::mean_pool;

fn main() -> ctrn::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let table = EmbeddingTable::random(20, 8, 1.0, 3);
    let proj = Projection::new(8, 6, &mut rng);
    let banks = GateBanks::new(2, 4, 6, true, &mut rng);

    let question = [5u32, 9, 2, 14];
    let answer = [7u32, 3, 3, 11, 18, 6, 4, 12, 2, 10];
    let x_q = embed_project(&question, &table, &proj)?;
    let x_a = embed_project(&answer, &table, &proj)?;

    println!("question step -> answer step whose gates it borrows:");
    println!("  {:?}", alignment(question.len(), answer.len())?);
    println!("answer step -> question step:");
    println!("  {:?}", alignment(answer.len(), question.len())?);

    let (q, a) = ctrn_pair(&x_q, &x_a, &banks, &banks)?;
    let pooled = |t| mean_pool(t, &vec![true; t.rows()]);
    println!("\nmean-pooled fused states");
    println!("  question {:.4?}", pooled(&q.fused)?);
    println!("  answer   {:.4?}", pooled(&a.fused)?);

    // A QRNN pools each side in isolation: swapping the partner changes nothing.
    let g = compute_gates(&x_q, &banks)?;
    let plain = fo_pool_raw(&g.z, &g.f, &g.o)?;
    println!("\nQRNN question encoding {:.4?}", pooled(&plain.h)?);

    let other = [1u32, 16, 8];
    let x_o = embed_project(&other, &table, &proj)?;
    let (q2, _) = ctrn_pair(&x_q, &x_o, &banks, &banks)?;
    println!("CTRN question encoding against another answer {:.4?}", pooled(&q2.fused)?);
    println!("(the self trace is identical: {})", q.self_trace == q2.self_trace);
    Ok(())
}
