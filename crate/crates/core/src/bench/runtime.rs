use std::io::{self, Write};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LstmBaseline, ModelKind};
use crate::encoder::EmbeddingTable;
use crate::model::{EncoderKind, Model, ModelConfig, PairExample};
use crate::{Error, Result};

/// Timing setup: every kind × length gets `warmup` untimed runs, then `reps`
/// timed forward+backward passes over the same fixed batch of pairs, with
/// kinds and lengths interleaved round-robin inside each repetition.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub kinds: Vec<ModelKind>,
    pub lengths: Vec<usize>,
    pub d: usize,
    pub m: usize,
    pub h: usize,
    pub k: usize,
    /// Width of the (random) embedding table feeding the projection.
    pub embedding_dim: usize,
    pub vocab: usize,
    /// Pairs per timed pass; question and answer both have length `L`.
    pub batch: usize,
    pub reps: usize,
    pub warmup: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            kinds: vec![ModelKind::Qrnn, ModelKind::Ctrn, ModelKind::Lstm],
            lengths: vec![64, 128, 256],
            d: 512,
            m: 64,
            h: 128,
            k: 2,
            embedding_dim: 64,
            vocab: 1000,
            batch: 1,
            reps: 7,
            warmup: 2,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuntimeSample {
    pub kind: ModelKind,
    pub l: usize,
    pub d: usize,
    pub reps: usize,
    pub samples_ms: Vec<f64>,
    pub median_ms: f64,
}

pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "median of nothing");
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

enum Runner {
    Gated(Model),
    Lstm(LstmBaseline),
}

impl Runner {
    fn pass(&mut self, pairs: &[(Vec<u32>, Vec<u32>)]) -> Result<()> {
        match self {
            Runner::Gated(m) => {
                m.zero_grad();
                for (q, a) in pairs {
                    m.accumulate(&PairExample::new(q, a), 1, None)?;
                }
            }
            Runner::Lstm(m) => {
                m.zero_grad();
                for (q, a) in pairs {
                    m.accumulate(&PairExample::new(q, a), 1)?;
                }
            }
        }
        Ok(())
    }
}

fn runner(kind: ModelKind, cfg: &BenchConfig, table: &Arc<EmbeddingTable>) -> Result<Runner> {
    let gated = |encoder| {
        let mc = ModelConfig {
            m: cfg.m,
            d: cfg.d,
            k: cfg.k,
            h: cfg.h,
            kind: encoder,
            ..ModelConfig::default()
        };
        Model::new(mc, Arc::clone(table), cfg.seed).map(Runner::Gated)
    };
    match kind {
        ModelKind::Qrnn => gated(EncoderKind::Qrnn),
        ModelKind::Ctrn => gated(EncoderKind::Ctrn),
        ModelKind::Lstm => {
            LstmBaseline::new(Arc::clone(table), cfg.m, cfg.d, cfg.h, true, cfg.seed).map(Runner::Lstm)
        }
        ModelKind::ApBilstm => Err(Error::config("kind", "ap-bilstm is accounted for, not benchmarked")),
    }
}

/// Median forward+backward wall time per kind and length.
pub fn time_models(cfg: &BenchConfig) -> Result<Vec<RuntimeSample>> {
    if cfg.reps < 5 {
        return Err(Error::config("reps", "at least 5 repetitions are required"));
    }
    if cfg.lengths.iter().any(|&l| l == 0) || cfg.batch == 0 {
        return Err(Error::config("L", "lengths and batch size must be positive"));
    }
    let table = Arc::new(EmbeddingTable::random(cfg.vocab.max(3), cfg.embedding_dim, 1.0, cfg.seed));
    let mut runners = cfg
        .kinds
        .iter()
        .map(|&k| runner(k, cfg, &table))
        .collect::<Result<Vec<_>>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xbe4c);
    let vocab = table.vocab_size() as u32;
    let inputs: Vec<Vec<(Vec<u32>, Vec<u32>)>> = cfg
        .lengths
        .iter()
        .map(|&l| {
            (0..cfg.batch)
                .map(|_| {
                    let mut seq = || (0..l).map(|_| rng.gen_range(2..vocab)).collect::<Vec<u32>>();
                    (seq(), seq())
                })
                .collect()
        })
        .collect();

    for r in runners.iter_mut() {
        for pairs in &inputs {
            for _ in 0..cfg.warmup {
                r.pass(pairs)?;
            }
        }
    }
    let mut times = vec![vec![Vec::with_capacity(cfg.reps); cfg.lengths.len()]; cfg.kinds.len()];
    for _ in 0..cfg.reps {
        for (li, pairs) in inputs.iter().enumerate() {
            for (ki, r) in runners.iter_mut().enumerate() {
                let start = Instant::now();
                r.pass(pairs)?;
                times[ki][li].push(start.elapsed().as_secs_f64() * 1e3);
            }
        }
    }

    let mut out = Vec::new();
    for (ki, &kind) in cfg.kinds.iter().enumerate() {
        for (li, &l) in cfg.lengths.iter().enumerate() {
            let samples = std::mem::take(&mut times[ki][li]);
            out.push(RuntimeSample {
                kind,
                l,
                d: cfg.d,
                reps: cfg.reps,
                median_ms: median(&samples),
                samples_ms: samples,
            });
        }
    }
    Ok(out)
}

/// `kind,L,d,median_ms` with a header row.
pub fn write_csv<W: Write>(w: &mut W, samples: &[RuntimeSample]) -> io::Result<()> {
    writeln!(w, "kind,L,d,median_ms")?;
    for s in samples {
        writeln!(w, "{},{},{},{:.4}", s.kind, s.l, s.d, s.median_ms)?;
    }
    Ok(())
}
