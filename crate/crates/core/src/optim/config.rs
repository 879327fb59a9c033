use std::fmt::Display;
use std::str::FromStr;

use crate::head::Activation;
use crate::metrics::DevMetric;
use crate::model::{EncoderKind, ModelConfig};
use crate::{Error, Result};

/// Architecture and optimization hyperparameters for one training run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub k: usize,
    /// Number of filters; tuned in steps of 128 from 128 to 1024.
    pub d: usize,
    pub m: usize,
    pub h: usize,
    pub dense_layers: usize,
    pub activation: Activation,
    pub kind: EncoderKind,
    pub shared_banks: bool,
    pub conv_bias: bool,
    pub overlap_features: bool,
    pub lr: f64,
    pub batch_size: usize,
    pub dropout: f64,
    pub lambda: f64,
    pub epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub dev_metric: DevMetric,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            k: 2,
            d: 256,
            m: 300,
            h: 128,
            dense_layers: 1,
            activation: Activation::Tanh,
            kind: EncoderKind::Ctrn,
            shared_banks: true,
            conv_bias: true,
            overlap_features: false,
            lr: 1e-3,
            batch_size: 64,
            dropout: 0.5,
            lambda: 4e-6,
            epochs: 25,
            patience: 5,
            seed: 0,
            dev_metric: DevMetric::Map,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| Error::config(key, format!("cannot parse `{value}`: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::config(key, format!("expected a boolean, got `{value}`"))),
    }
}

impl TrainConfig {
    pub const KEYS: &'static [&'static str] = &[
        "k",
        "d",
        "m",
        "h",
        "dense_layers",
        "activation",
        "kind",
        "shared_banks",
        "conv_bias",
        "overlap_features",
        "lr",
        "batch_size",
        "dropout",
        "lambda",
        "epochs",
        "patience",
        "seed",
        "dev_metric",
    ];

    /// Checks every field against its allowed grid or range.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("k", "must be at least 1"));
        }
        if self.m == 0 {
            return Err(Error::config("m", "must be positive"));
        }
        if self.h == 0 {
            return Err(Error::config("h", "must be positive"));
        }
        if !(128..=1024).contains(&self.d) || self.d % 128 != 0 {
            return Err(Error::config("d", "must be a multiple of 128 in [128, 1024]"));
        }
        if !(1..=3).contains(&self.dense_layers) {
            return Err(Error::config("dense_layers", "must be in [1, 3]"));
        }
        if ![1e-3, 1e-4, 1e-5].contains(&self.lr) {
            return Err(Error::config("lr", "must be one of 1e-3, 1e-4, 1e-5"));
        }
        if ![64, 128, 256, 512].contains(&self.batch_size) {
            return Err(Error::config("batch_size", "must be one of 64, 128, 256, 512"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::config("dropout", "must be in [0, 1)"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::config("lambda", "must be a finite non-negative number"));
        }
        if self.epochs == 0 {
            return Err(Error::config("epochs", "must be positive"));
        }
        if self.patience == 0 {
            return Err(Error::config("patience", "must be positive"));
        }
        Ok(())
    }

    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            m: self.m,
            d: self.d,
            k: self.k,
            h: self.h,
            dense_layers: self.dense_layers,
            activation: self.activation,
            kind: self.kind,
            shared_banks: self.shared_banks,
            conv_bias: self.conv_bias,
            overlap_features: self.overlap_features,
        }
    }

    /// Sets one field from its text form. Unknown keys are configuration
    /// errors naming the key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "k" => self.k = parse(key, value)?,
            "d" => self.d = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "h" => self.h = parse(key, value)?,
            "dense_layers" => self.dense_layers = parse(key, value)?,
            "activation" => self.activation = value.parse()?,
            "kind" => {
                self.kind = value
                    .parse()
                    .map_err(|_| Error::config("kind", format!("unknown encoder kind `{}`", value.trim())))?
            }
            "shared_banks" => self.shared_banks = parse_bool(key, value)?,
            "conv_bias" => self.conv_bias = parse_bool(key, value)?,
            "overlap_features" => self.overlap_features = parse_bool(key, value)?,
            "lr" => self.lr = parse(key, value)?,
            "batch_size" => self.batch_size = parse(key, value)?,
            "dropout" => self.dropout = parse(key, value)?,
            "lambda" => self.lambda = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "patience" => self.patience = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "dev_metric" => self.dev_metric = value.parse()?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Every field as `(key, value)` text, in [`TrainConfig::KEYS`] order.
    /// Floats use the shortest representation that parses back exactly.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("k", self.k.to_string()),
            ("d", self.d.to_string()),
            ("m", self.m.to_string()),
            ("h", self.h.to_string()),
            ("dense_layers", self.dense_layers.to_string()),
            ("activation", self.activation.to_string()),
            ("kind", self.kind.to_string()),
            ("shared_banks", self.shared_banks.to_string()),
            ("conv_bias", self.conv_bias.to_string()),
            ("overlap_features", self.overlap_features.to_string()),
            ("lr", format!("{:e}", self.lr)),
            ("batch_size", self.batch_size.to_string()),
            ("dropout", self.dropout.to_string()),
            ("lambda", format!("{:e}", self.lambda)),
            ("epochs", self.epochs.to_string()),
            ("patience", self.patience.to_string()),
            ("seed", self.seed.to_string()),
            ("dev_metric", self.dev_metric.to_string()),
        ]
    }

    /// `key = value` lines, one per field.
    pub fn to_text(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Parses `key = value` lines over the defaults; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = TrainConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }
}
