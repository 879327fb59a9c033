/// Outcome of feeding one epoch's dev metric to [`EarlyStopState`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Improved,
    Stalled,
    Stop,
}

/// Tracks the best dev metric (higher is better) and stops once `patience`
/// consecutive epochs fail to beat it.
#[derive(Clone, Debug, PartialEq)]
pub struct EarlyStopState {
    pub best: Option<f64>,
    pub best_epoch: usize,
    pub since_improvement: usize,
    pub patience: usize,
}

impl EarlyStopState {
    pub fn new(patience: usize) -> Self {
        EarlyStopState {
            best: None,
            best_epoch: 0,
            since_improvement: 0,
            patience,
        }
    }

    pub fn update(&mut self, epoch: usize, metric: f64) -> Verdict {
        if self.best.map_or(true, |b| metric > b) {
            self.best = Some(metric);
            self.best_epoch = epoch;
            self.since_improvement = 0;
            Verdict::Improved
        } else {
            self.since_improvement += 1;
            if self.since_improvement >= self.patience {
                Verdict::Stop
            } else {
                Verdict::Stalled
            }
        }
    }
}
