//! Times forward+backward passes of the crossed and plain encoders (and the
//! LSTM reference) over growing sequence lengths, printing the CSV.
//!
//!     cargo run --release --example runtime_scaling

use ctrn::bench::{time_models, write_csv, BenchConfig, ModelKind};

fn main() -> ctrn::Result<()> {
    let cfg = BenchConfig {
        kinds: vec![ModelKind::Qrnn, ModelKind::Ctrn, ModelKind::Lstm],
        lengths: vec![32, 64, 128, 256],
        d: 256,
        reps: 5,
        ..BenchConfig::default()
    };
    let samples = time_models(&cfg)?;
    write_csv(&mut std::io::stdout().lock(), &samples)?;

    println!();
    for kind in &cfg.kinds {
        let times: Vec<f64> = samples.iter().filter(|s| s.kind == *kind).map(|s| s.median_ms).collect();
        let ratios: Vec<String> = times.windows(2).map(|w| format!("{:.2}", w[1] / w[0])).collect();
        println!("{kind:>5}: time(2L)/time(L) = {}", ratios.join(", "));
    }
    Ok(())
}
