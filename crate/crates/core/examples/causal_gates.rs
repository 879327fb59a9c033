//! Convolved gates are causal: row `t` of Z, F and O only depends on tokens
//! `t-k+1..=t`. Perturbing the last input leaves every earlier row untouched.
//!
//!     cargo run --example causal_gates

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ctrn::encoder::{compute_gates, fo_pool_raw, GateBanks};
use ctrn::numkit::Tensor;

fn show(name: &str, t: &Tensor) {
    println!("{name}:");
    for i in 0..t.rows() {
        let row: Vec<String> = t.row(i).iter().map(|v| format!("{v:+.3}")).collect();
        println!("  t={i}  {}", row.join(" "));
    }
}

fn main() -> ctrn::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (k, d, m) = (2, 3, 4);
    let banks = GateBanks::new(k, d, m, true, &mut rng);

    let x = Tensor::from_rows(&[
        vec![0.5, -0.2, 0.1, 0.9],
        vec![-0.7, 0.3, 0.8, 0.0],
        vec![0.2, 0.2, -0.5, 0.4],
        vec![0.9, -0.9, 0.3, -0.1],
    ])?;
    let gates = compute_gates(&x, &banks)?;
    show("Z = tanh(W_z * X)", &gates.z);
    show("F = sigmoid(W_f * X)", &gates.f);
    show("O = sigmoid(W_o * X)", &gates.o);

    let trace = fo_pool_raw(&gates.z, &gates.f, &gates.o)?;
    show("h (fo-pooling)", &trace.h);

    // Change only the final token.
    let mut x2 = x.clone();
    x2.row_mut(3).copy_from_slice(&[-1.0, 1.0, -1.0, 1.0]);
    let gates2 = compute_gates(&x2, &banks)?;
    let trace2 = fo_pool_raw(&gates2.z, &gates2.f, &gates2.o)?;
    for t in 0..4 {
        let same = trace.h.row(t) == trace2.h.row(t);
        println!("row {t} unchanged after editing token 3: {same}");
    }
    Ok(())
}
