use std::fs;
use std::path::{Path, PathBuf};

use crate::optim::TrainConfig;
use crate::{Error, Result};

/// Training hyperparameters plus the paths and switches a command needs.
///
/// Resolved from three layers, later ones winning: built-in defaults, a flat
/// `key = value` file, then command-line overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub train_path: Option<PathBuf>,
    pub dev_path: Option<PathBuf>,
    pub test_path: Option<PathBuf>,
    pub embeddings_path: Option<PathBuf>,
    /// Width of the embedding table; read from the file when one is given,
    /// otherwise the width of a seeded random table.
    pub embedding_dim: usize,
    pub stopwords_path: Option<PathBuf>,
    pub checkpoint_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub log_path: Option<PathBuf>,
    pub run_tag: String,
    /// Drop pairs outside the 5–50 token window at ingest.
    pub length_filter: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            train: TrainConfig::default(),
            train_path: None,
            dev_path: None,
            test_path: None,
            embeddings_path: None,
            embedding_dim: 50,
            stopwords_path: None,
            checkpoint_path: None,
            output_path: None,
            log_path: None,
            run_tag: "ctrn".into(),
            length_filter: false,
        }
    }
}

fn path(value: &str) -> Option<PathBuf> {
    let v = value.trim();
    (!v.is_empty()).then(|| PathBuf::from(v))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "train_path" => self.train_path = path(value),
            "dev_path" => self.dev_path = path(value),
            "test_path" => self.test_path = path(value),
            "embeddings_path" => self.embeddings_path = path(value),
            "stopwords_path" => self.stopwords_path = path(value),
            "checkpoint_path" => self.checkpoint_path = path(value),
            "output_path" => self.output_path = path(value),
            "log_path" => self.log_path = path(value),
            "run_tag" => self.run_tag = value.trim().to_string(),
            "embedding_dim" => {
                self.embedding_dim = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))?
            }
            "length_filter" => {
                self.length_filter = match value.trim() {
                    "true" | "yes" | "1" | "on" => true,
                    "false" | "no" | "0" | "off" => false,
                    _ => return Err(Error::config(key, format!("expected a boolean, got `{value}`"))),
                }
            }
            _ => self.train.set(key, value)?,
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::config("config", format!("line {}: expected `key = value`, got `{line}`", i + 1))
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, file: &Path) -> Result<()> {
        let text = fs::read_to_string(file)
            .map_err(|e| Error::config("config", format!("{}: {e}", file.display())))?;
        self.apply_text(&text)
    }

    /// Applies `KEY=VALUE` assignments.
    pub fn apply_sets(&mut self, sets: &[String]) -> Result<()> {
        for s in sets {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::config(s.as_str(), "expected KEY=VALUE"))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Every key with its current value, one `key = value` line each.
    pub fn to_text(&self) -> String {
        let show = |p: &Option<PathBuf>| p.as_ref().map_or(String::new(), |p| p.display().to_string());
        let mut out = String::new();
        for (k, v) in [
            ("train_path", show(&self.train_path)),
            ("dev_path", show(&self.dev_path)),
            ("test_path", show(&self.test_path)),
            ("embeddings_path", show(&self.embeddings_path)),
            ("embedding_dim", self.embedding_dim.to_string()),
            ("stopwords_path", show(&self.stopwords_path)),
            ("checkpoint_path", show(&self.checkpoint_path)),
            ("output_path", show(&self.output_path)),
            ("log_path", show(&self.log_path)),
            ("run_tag", self.run_tag.clone()),
            ("length_filter", self.length_filter.to_string()),
        ] {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out.push_str(&self.train.to_text());
        out
    }

    pub fn require<'a>(&self, key: &str, value: &'a Option<PathBuf>) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| Error::config(key, "is required for this command"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_file_beats_default() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("d = 256\nepochs = 3 # from file\n").unwrap();
        cfg.apply_sets(&["epochs=4".into()]).unwrap();
        assert_eq!(cfg.train.d, 256);
        assert_eq!(cfg.train.epochs, 4);
        assert_eq!(cfg.train.patience, TrainConfig::default().patience);
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.set("train_path", "a.tsv").unwrap();
        cfg.set("kind", "qrnn").unwrap();
        let mut back = RunConfig::default();
        back.apply_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::default().set("colour", "red").unwrap_err();
        assert!(matches!(err, Error::Config { key, .. } if key == "colour"));
    }
}
