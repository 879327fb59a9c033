use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use super::{AdamState, EarlyStopState, TrainConfig, Verdict};
use crate::data::{make_batches, EncodedInstance};
use crate::encoder::EmbeddingTable;
use crate::head::{pointwise_cross_entropy, Dropout};
use crate::metrics::{group_by_query, MetricSet, RankingGroup};
use crate::model::Model;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean pointwise cross-entropy over the epoch's training pairs, measured
    /// with dropout active, before each batch's update.
    pub train_loss: f64,
    pub dev_metric: f64,
    pub seconds: f64,
}

/// Per-epoch training log with the configuration echoed as a header.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainLog {
    pub config: Vec<(String, String)>,
    pub epochs: Vec<EpochRecord>,
}

impl TrainLog {
    fn render(&self, with_seconds: bool) -> String {
        let mut out = String::new();
        for (k, v) in &self.config {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str("# epoch\ttrain_loss\tdev_metric\tseconds\n");
        for e in &self.epochs {
            let _ = write!(out, "{}\t{:.6}\t{:.6}", e.epoch, e.train_loss, e.dev_metric);
            if with_seconds {
                let _ = write!(out, "\t{:.3}", e.seconds);
            }
            out.push('\n');
        }
        out
    }

    /// Tab-separated `epoch, train_loss, dev_metric, seconds`.
    pub fn to_tsv(&self) -> String {
        self.render(true)
    }

    /// Same as [`TrainLog::to_tsv`] without the wall-clock column, which is
    /// the only part that differs between identical seeded runs.
    pub fn to_tsv_untimed(&self) -> String {
        self.render(false)
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Parameters from the epoch with the best dev metric.
    pub model: Model,
    pub log: TrainLog,
    pub best_epoch: usize,
    pub best_dev: MetricSet,
    pub stopped_early: bool,
}

/// Scores every instance and groups them by query.
pub fn evaluate(model: &Model, instances: &[EncodedInstance]) -> Result<(MetricSet, Vec<RankingGroup>)> {
    let scores = instances
        .iter()
        .map(|inst| model.score(&inst.example()))
        .collect::<Result<Vec<_>>>()?;
    let groups = group_by_query(
        instances
            .iter()
            .zip(&scores)
            .map(|(inst, &s)| (inst.query_id.as_str(), s, inst.label)),
    )?;
    Ok((MetricSet::compute(&groups)?, groups))
}

/// Trains a fresh model and keeps the parameters of the best dev epoch.
pub fn train(
    train_set: &[EncodedInstance],
    dev_set: &[EncodedInstance],
    embedding: Arc<EmbeddingTable>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    train_with(train_set, dev_set, embedding, cfg, |_| {})
}

/// [`train`] with a callback after every epoch.
pub fn train_with(
    train_set: &[EncodedInstance],
    dev_set: &[EncodedInstance],
    embedding: Arc<EmbeddingTable>,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if train_set.is_empty() {
        return Err(Error::config("train_path", "training set is empty"));
    }
    if dev_set.is_empty() {
        return Err(Error::config("dev_path", "development set is empty"));
    }
    let mut model = Model::new(cfg.model_config(), embedding, cfg.seed)?;
    let mut adam = AdamState::new(cfg.lr);
    let mut dropout = Dropout::new(cfg.dropout, cfg.seed ^ 0xd50f_0a7e);
    let mut early = EarlyStopState::new(cfg.patience);
    let mut log = TrainLog {
        config: cfg.to_pairs().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        epochs: Vec::new(),
    };
    let mut best: Option<(Model, MetricSet)> = None;
    let mut stopped_early = false;

    for epoch in 1..=cfg.epochs {
        let started = Instant::now();
        let mut loss_sum = 0.0;
        for batch in make_batches(train_set, cfg.batch_size, cfg.seed.wrapping_add(epoch as u64)) {
            model.zero_grad();
            for i in 0..batch.len() {
                let label = batch.labels[i];
                let s = model.accumulate(&batch.example(i), label, Some(&mut dropout))?;
                loss_sum += pointwise_cross_entropy(s, label)?;
            }
            model.accumulate_l2_grad(cfg.lambda);
            adam.step(&mut model)?;
        }
        let (metrics, _) = evaluate(&model, dev_set)?;
        let dev_metric = metrics.get(cfg.dev_metric);
        let record = EpochRecord {
            epoch,
            train_loss: loss_sum / train_set.len() as f64,
            dev_metric,
            seconds: started.elapsed().as_secs_f64(),
        };
        log::info!(
            "epoch {epoch}: train loss {:.4}, dev {} {:.4}",
            record.train_loss,
            cfg.dev_metric,
            dev_metric
        );
        on_epoch(&record);
        log.epochs.push(record);
        match early.update(epoch, dev_metric) {
            Verdict::Improved => best = Some((model.clone(), metrics)),
            Verdict::Stalled => {}
            Verdict::Stop => {
                stopped_early = epoch < cfg.epochs;
                break;
            }
        }
    }

    let (model, best_dev) = best.expect("first epoch always improves");
    Ok(TrainOutcome {
        model,
        log,
        best_epoch: early.best_epoch,
        best_dev,
        stopped_early,
    })
}
