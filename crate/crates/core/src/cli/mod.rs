//! Command-line front end behind the `ctrn` binary.
//!
//! Exit codes: 0 success, 2 configuration error (including bad flags),
//! 3 data error, 4 checkpoint error, 1 anything else.

mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;

use crate::bench::{budget_table, time_models, write_csv, BenchConfig, Dims, ModelKind};
use crate::checkpoint::Checkpoint;
use crate::data::{encode_instances, load_embeddings, read_tsv, EncodedInstance, LengthFilter, QAInstance, Vocabulary};
use crate::encoder::EmbeddingTable;
use crate::head::{IdfTable, Stopwords};
use crate::metrics::write_trec_run;
use crate::optim::{evaluate, train};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "ctrn", version, about = "Cross temporal recurrent QA ranker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a ranker and write its best checkpoint and epoch log.
    Train(TrainArgs),
    /// Score a labelled TSV, print P@1/MRR/MAP and write a TREC run file.
    Eval(EvalArgs),
    /// Score every pair of a TSV file.
    Score(EvalArgs),
    /// Print the parameter-count table.
    Params(ParamsArgs),
    /// Time forward+backward passes and write `kind,L,d,median_ms` CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override any configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    dev: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    log: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ParamsArgs {
    /// lstm, ap-bilstm, qrnn or ctrn; all kinds when omitted.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, default_value_t = 300)]
    m: u64,
    #[arg(long, default_value_t = 512)]
    d: u64,
    #[arg(long, default_value_t = 128)]
    h: u64,
    #[arg(long, default_value_t = 2)]
    k: u64,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated sequence lengths.
    #[arg(long = "L", value_delimiter = ',', default_values_t = [64usize, 128, 256])]
    lengths: Vec<usize>,
    /// Comma-separated kinds among lstm, qrnn, ctrn.
    #[arg(long, value_delimiter = ',', default_values_t = ["qrnn".to_string(), "ctrn".to_string(), "lstm".to_string()])]
    kinds: Vec<String>,
    #[arg(long, default_value_t = 512)]
    d: usize,
    #[arg(long, default_value_t = 64)]
    m: usize,
    #[arg(long, default_value_t = 128)]
    h: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    batch: usize,
    #[arg(long, default_value_t = 7)]
    reps: usize,
    #[arg(long, default_value_t = 2)]
    warmup: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Maps an error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } => 2,
        Error::Parse { .. } | Error::Label(_) | Error::Vocabulary { .. } | Error::EmptySequence(_) | Error::Io(_) => 3,
        Error::Checkpoint(_) => 4,
        _ => 1,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Score(a) => cmd_score(a),
        Command::Params(a) => cmd_params(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn resolve(common: &Common, extra: &[(&str, &Option<PathBuf>)]) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(file) = &common.config {
        cfg.apply_file(file)?;
    }
    cfg.apply_sets(&common.sets)?;
    if let Some(seed) = common.seed {
        cfg.train.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_path = Some(out.clone());
    }
    for (key, value) in extra {
        if let Some(v) = value {
            cfg.set(key, &v.display().to_string())?;
        }
    }
    Ok(cfg)
}

fn read_corpus(path: &Path, cfg: &RunConfig) -> Result<Vec<QAInstance>> {
    let filter = cfg.length_filter.then_some(LengthFilter::COMMUNITY_QA);
    read_tsv(path, filter).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })
}

fn encode(instances: &[QAInstance], ck_vocab: &Vocabulary, overlap: &Option<(IdfTable, Stopwords)>) -> Vec<EncodedInstance> {
    encode_instances(instances, ck_vocab, overlap.as_ref().map(|(i, s)| (i, s)))
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let cfg = resolve(
        &a.common,
        &[
            ("train_path", &a.train),
            ("dev_path", &a.dev),
            ("embeddings_path", &a.embeddings),
            ("log_path", &a.log),
        ],
    )?;
    cfg.train.validate()?;
    if a.print_config {
        print!("{}", cfg.to_text());
        return Ok(());
    }
    let train_path = cfg.require("train_path", &cfg.train_path)?;
    let dev_path = cfg.require("dev_path", &cfg.dev_path)?;
    let out = cfg
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from("ctrn.ckpt"));
    let log_path = cfg
        .log_path
        .clone()
        .unwrap_or_else(|| out.with_extension("log.tsv"));

    let train_raw = read_corpus(train_path, &cfg)?;
    let dev_raw = read_corpus(dev_path, &cfg)?;
    let vocab = Vocabulary::build(
        train_raw
            .iter()
            .chain(&dev_raw)
            .flat_map(|i| [&i.question, &i.answer]),
    );
    let table = match &cfg.embeddings_path {
        Some(p) => load_embeddings(p, cfg.embedding_dim, &vocab, cfg.train.seed)?,
        None => EmbeddingTable::random(vocab.len(), cfg.embedding_dim, 1.0, cfg.train.seed),
    };
    let overlap = if cfg.train.overlap_features {
        let idf = IdfTable::from_documents(train_raw.iter().flat_map(|i| [&i.question, &i.answer]));
        let stop = match &cfg.stopwords_path {
            Some(p) => Stopwords::from_file(p)?,
            None => Stopwords::english(),
        };
        Some((idf, stop))
    } else {
        None
    };
    let train_set = encode(&train_raw, &vocab, &overlap);
    let dev_set = encode(&dev_raw, &vocab, &overlap);

    let outcome = train(&train_set, &dev_set, Arc::new(table), &cfg.train)?;
    let ck = Checkpoint {
        config: cfg.train.clone(),
        vocab,
        model: outcome.model,
        overlap,
    };
    ck.save(&out)?;
    fs::write(&log_path, outcome.log.to_tsv())?;
    println!(
        "best epoch {}: {} (checkpoint {}, log {})",
        outcome.best_epoch,
        outcome.best_dev,
        out.display(),
        log_path.display()
    );
    Ok(())
}

fn load_for_scoring(a: &EvalArgs) -> Result<(RunConfig, Checkpoint, Vec<QAInstance>)> {
    let cfg = resolve(&a.common, &[("checkpoint_path", &a.checkpoint), ("test_path", &a.test)])?;
    let ck_path = cfg.require("checkpoint_path", &cfg.checkpoint_path)?;
    let test_path = cfg.require("test_path", &cfg.test_path)?;
    let ck = Checkpoint::load(ck_path)?;
    let test = read_corpus(test_path, &cfg)?;
    Ok((cfg, ck, test))
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let (cfg, ck, test) = load_for_scoring(&a)?;
    let set = encode(&test, &ck.vocab, &ck.overlap);
    let (metrics, groups) = evaluate(&ck.model, &set)?;
    println!("{metrics}");
    let run_path = cfg.output_path.clone().unwrap_or_else(|| {
        let mut p = cfg.test_path.clone().expect("checked above").into_os_string();
        p.push(".run");
        PathBuf::from(p)
    });
    let mut w = std::io::BufWriter::new(fs::File::create(&run_path)?);
    write_trec_run(&mut w, &groups, &cfg.run_tag)?;
    w.flush()?;
    Ok(())
}

fn cmd_score(a: EvalArgs) -> Result<()> {
    let (cfg, ck, test) = load_for_scoring(&a)?;
    let set = encode(&test, &ck.vocab, &ck.overlap);
    let mut out = String::new();
    let mut ordinal: std::collections::HashMap<&str, usize> = Default::default();
    for inst in &set {
        let s = ck.model.score(&inst.example())?;
        let n = ordinal.entry(inst.query_id.as_str()).or_default();
        out.push_str(&format!("{}\t{}-{}\t{:.6}\n", inst.query_id, inst.query_id, n, s));
        *n += 1;
    }
    match &cfg.output_path {
        Some(p) => fs::write(p, out)?,
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_params(a: ParamsArgs) -> Result<()> {
    let kinds = match &a.kind {
        Some(k) => vec![k.parse::<ModelKind>()?],
        None => ModelKind::ALL.to_vec(),
    };
    let dims = Dims {
        m: a.m,
        d: a.d,
        h: a.h,
        k: a.k,
    };
    print!("{}", budget_table(&kinds, dims)?);
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let kinds = a
        .kinds
        .iter()
        .map(|k| k.parse::<ModelKind>())
        .collect::<Result<Vec<_>>>()?;
    let cfg = BenchConfig {
        kinds,
        lengths: a.lengths,
        d: a.d,
        m: a.m,
        h: a.h,
        k: a.k,
        batch: a.batch,
        reps: a.reps,
        warmup: a.warmup,
        seed: a.seed,
        ..BenchConfig::default()
    };
    let samples = time_models(&cfg)?;
    match &a.out {
        Some(p) => {
            let mut w = std::io::BufWriter::new(fs::File::create(p)?);
            write_csv(&mut w, &samples)?;
            w.flush()?;
        }
        None => write_csv(&mut std::io::stdout().lock(), &samples)?,
    }
    Ok(())
}
