use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ctrn::data::{write_tsv, SyntheticConfig};

fn ctrn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctrn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Small keyword corpus split into train/dev TSV files.
fn corpus(dir: &Path) -> (PathBuf, PathBuf) {
    let (train, dev) = SyntheticConfig {
        queries: 40,
        ..SyntheticConfig::default()
    }
    .generate_split(30);
    let (tp, dp) = (dir.join("train.tsv"), dir.join("dev.tsv"));
    write_tsv(&tp, &train).unwrap();
    write_tsv(&dp, &dev).unwrap();
    (tp, dp)
}

const SMALL: &[&str] = &[
    "--set", "d=128", "--set", "m=8", "--set", "h=16", "--set", "epochs=3", "--set", "embedding_dim=8",
];

fn train_into(dir: &Path, train: &Path, dev: &Path, seed: &str) -> Output {
    let ckpt = dir.join("model.ckpt");
    let mut args = vec!["train", "--train", s(train), "--dev", s(dev), "--seed", seed, "--out", s(&ckpt)];
    args.extend_from_slice(SMALL);
    ctrn(&args)
}

fn untimed(log: &str) -> String {
    log.lines()
        .map(|l| {
            if l.starts_with('#') {
                l.to_string()
            } else {
                let mut cols: Vec<&str> = l.split('\t').collect();
                cols.pop();
                cols.join("\t")
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn params_reports_published_counts() {
    for kind in ["qrnn", "ctrn"] {
        let o = ctrn(&["params", "--kind", kind, "--m", "300", "--d", "512", "--h", "128", "--k", "2"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert!(stdout(&o).contains("1052800"), "{}", stdout(&o));
    }
    let o = ctrn(&["params"]);
    let out = stdout(&o);
    assert!(out.contains("1794176") && out.contains("2711552"), "{out}");
}

#[test]
fn params_unknown_kind_is_config_error() {
    let o = ctrn(&["params", "--kind", "transformer"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("kind"));
}

#[test]
fn bench_writes_three_rows_per_kind() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let o = ctrn(&[
        "bench", "--L", "64,128,256", "--kinds", "qrnn,ctrn", "--d", "16", "--m", "8", "--h", "8", "--reps", "5",
        "--warmup", "1", "--out", s(&csv),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,L,d,median_ms"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    for kind in ["qrnn", "ctrn"] {
        let ls: Vec<&str> = rows.iter().filter(|r| r[0] == kind).map(|r| r[1]).collect();
        assert_eq!(ls, ["64", "128", "256"]);
    }
    assert!(rows.iter().all(|r| r[2] == "16" && r[3].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn bench_rejects_too_few_reps() {
    let o = ctrn(&["bench", "--reps", "2", "--d", "8"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn missing_train_path_names_the_key() {
    let o = ctrn(&["train", "--dev", "dev.tsv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("train_path"), "{}", stderr(&o));
}

#[test]
fn off_grid_value_is_rejected_before_reading_data() {
    let o = ctrn(&["train", "--train", "/nonexistent", "--dev", "/nonexistent", "--set", "d=100"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`d`") || stderr(&o).contains(" d"), "{}", stderr(&o));
}

#[test]
fn unknown_key_and_bad_flag_exit_2() {
    assert_eq!(code(&ctrn(&["train", "--set", "colour=red"])), 2);
    assert_eq!(code(&ctrn(&["train", "--no-such-flag"])), 2);
    assert_eq!(code(&ctrn(&["frobnicate"])), 2);
}

#[test]
fn malformed_data_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "q1\t7\tsome question\tsome answer\n").unwrap();
    let o = ctrn(&["train", "--train", s(&bad), "--dev", s(&bad)]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));

    std::fs::write(&bad, "q1\t1\tonly three fields\n").unwrap();
    let o = ctrn(&["train", "--train", s(&bad), "--dev", s(&bad)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("line 1"));
}

#[test]
fn unreadable_checkpoint_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let (_, dev) = corpus(dir.path());
    let junk = dir.path().join("junk.ckpt");
    std::fs::write(&junk, b"definitely not a checkpoint").unwrap();
    for ck in [junk.as_path(), &dir.path().join("missing.ckpt")] {
        let o = ctrn(&["eval", "--checkpoint", s(ck), "--test", s(&dev)]);
        assert_eq!(code(&o), 4, "{}", stderr(&o));
    }
}

#[test]
fn config_precedence_flag_over_file_over_default() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.cfg");
    std::fs::write(&file, "# toy run\nepochs = 3\nd = 256\nseed = 11\n").unwrap();

    let get = |out: &str, key: &str| -> String {
        out.lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")))
            .unwrap_or_else(|| panic!("{key} missing from\n{out}"))
            .to_string()
    };
    let defaults = stdout(&ctrn(&["train", "--print-config"]));
    assert_eq!(get(&defaults, "epochs"), "25");
    assert_eq!(get(&defaults, "seed"), "0");

    let from_file = stdout(&ctrn(&["train", "--print-config", "--config", s(&file)]));
    assert_eq!(get(&from_file, "epochs"), "3");
    assert_eq!(get(&from_file, "seed"), "11");
    assert_eq!(get(&from_file, "lr"), get(&defaults, "lr"));

    let flagged = stdout(&ctrn(&[
        "train", "--print-config", "--config", s(&file), "--set", "epochs=4", "--seed", "5",
    ]));
    assert_eq!(get(&flagged, "epochs"), "4");
    assert_eq!(get(&flagged, "seed"), "5");
    assert_eq!(get(&flagged, "d"), "256");
}

#[test]
fn train_is_deterministic_and_checkpoint_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let (train, dev) = corpus(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    std::fs::create_dir_all(&a).unwrap();
    std::fs::create_dir_all(&b).unwrap();

    for d in [&a, &b] {
        let o = train_into(d, &train, &dev, "7");
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert!(stdout(&o).contains("best epoch"));
    }
    let read = |p: PathBuf| std::fs::read(p).unwrap();
    assert_eq!(read(a.join("model.ckpt")), read(b.join("model.ckpt")));
    let log_a = String::from_utf8(read(a.join("model.log.tsv"))).unwrap();
    let log_b = String::from_utf8(read(b.join("model.log.tsv"))).unwrap();
    assert_eq!(untimed(&log_a), untimed(&log_b));
    assert!(log_a.contains("# epoch\ttrain_loss\tdev_metric\tseconds"));
    assert_eq!(log_a.lines().filter(|l| !l.starts_with('#')).count(), 3);

    // A different seed changes the trained weights.
    let c = dir.path().join("c");
    std::fs::create_dir_all(&c).unwrap();
    assert_eq!(code(&train_into(&c, &train, &dev, "8")), 0);
    assert_ne!(read(a.join("model.ckpt")), read(c.join("model.ckpt")));

    // eval: metric line, run file with one line per candidate, byte-stable
    let ck = a.join("model.ckpt");
    let run1 = dir.path().join("one.run");
    let run2 = dir.path().join("two.run");
    let o = ctrn(&["eval", "--checkpoint", s(&ck), "--test", s(&dev), "--out", s(&run1)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let line = stdout(&o);
    let parts: Vec<&str> = line.trim().split(", ").collect();
    assert_eq!(parts.len(), 3, "{line}");
    for (p, name) in parts.iter().zip(["P@1=", "MRR=", "MAP="]) {
        let v = p.strip_prefix(name).unwrap_or_else(|| panic!("{line}"));
        assert_eq!(v.split('.').nth(1).map(str::len), Some(4), "{line}");
    }
    ctrn(&["eval", "--checkpoint", s(&ck), "--test", s(&dev), "--out", s(&run2)]);
    let run = std::fs::read_to_string(&run1).unwrap();
    assert_eq!(run.lines().count(), std::fs::read_to_string(&dev).unwrap().lines().count());
    assert_eq!(run, std::fs::read_to_string(&run2).unwrap());
    for l in run.lines() {
        let f: Vec<&str> = l.split(' ').collect();
        assert_eq!(f.len(), 6, "{l}");
        assert_eq!(f[1], "Q0");
        assert_eq!(f[5], "ctrn");
    }

    // Without --out the run file lands next to the test file.
    let o = ctrn(&["eval", "--checkpoint", s(&ck), "--test", s(&dev)]);
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("dev.tsv.run").exists());

    // score: one line per pair, same scores as the run file
    let o = ctrn(&["score", "--checkpoint", s(&ck), "--test", s(&dev)]);
    assert_eq!(code(&o), 0);
    let scores = stdout(&o);
    assert_eq!(scores.lines().count(), run.lines().count());
    let first: Vec<&str> = scores.lines().next().unwrap().split('\t').collect();
    assert_eq!(first.len(), 3);
    assert!(run.lines().any(|l| l.contains(first[1]) && l.contains(first[2])));
}

#[test]
fn memorized_corpus_evaluates_perfectly() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _) = SyntheticConfig {
        queries: 200,
        ..SyntheticConfig::default()
    }
    .generate_split(200);
    let tsv = dir.path().join("train.tsv");
    write_tsv(&tsv, &train).unwrap();
    let ck = dir.path().join("m.ckpt");
    let o = ctrn(&[
        "train", "--train", s(&tsv), "--dev", s(&tsv), "--out", s(&ck), "--set", "d=128", "--set", "m=32",
        "--set", "h=64", "--set", "epochs=30", "--set", "patience=30", "--set", "dropout=0", "--set", "embedding_dim=32",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = ctrn(&["eval", "--checkpoint", s(&ck), "--test", s(&tsv), "--out", s(&dir.path().join("r"))]);
    assert_eq!(stdout(&o).trim(), "P@1=1.0000, MRR=1.0000, MAP=1.0000");
}
