use super::POSITIVE_CLASS;
use crate::{Error, Result};

/// Scores are clipped to `[EPS, 1 - EPS]` before taking logs.
pub const SCORE_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossReport {
    pub data_loss: f64,
    pub reg_loss: f64,
    pub total: f64,
}

pub(crate) fn check_label(label: u8) -> Result<()> {
    if label > 1 {
        return Err(Error::Label(label.to_string()));
    }
    Ok(())
}

/// `-[y ln s + (1 - y) ln(1 - s)]` for one clipped score.
pub fn pointwise_cross_entropy(score: f64, label: u8) -> Result<f64> {
    check_label(label)?;
    let s = score.clamp(SCORE_EPS, 1.0 - SCORE_EPS);
    Ok(if label == 1 { -s.ln() } else { -(-s).ln_1p() })
}

/// Summed cross-entropy over the batch plus `λ‖θ‖²`. `theta_sq_norm` is the
/// squared L2 norm of the trainable parameters.
pub fn loss(scores: &[f64], labels: &[u8], theta_sq_norm: f64, lambda: f64) -> Result<LossReport> {
    if scores.len() != labels.len() {
        return Err(Error::shape(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let mut data_loss = 0.0;
    for (&s, &y) in scores.iter().zip(labels) {
        data_loss += pointwise_cross_entropy(s, y)?;
    }
    let reg_loss = lambda * theta_sq_norm;
    Ok(LossReport {
        data_loss,
        reg_loss,
        total: data_loss + reg_loss,
    })
}

/// Gradient of the pointwise cross-entropy with respect to the two logits.
/// Zero when the score sits on a clip bound.
pub fn cross_entropy_logit_grad(probs: [f64; 2], label: u8) -> Result<[f64; 2]> {
    check_label(label)?;
    let s = probs[POSITIVE_CLASS];
    if !(SCORE_EPS..=1.0 - SCORE_EPS).contains(&s) {
        return Ok([0.0, 0.0]);
    }
    let y = label as f64;
    let mut g = [0.0; 2];
    g[POSITIVE_CLASS] = s - y;
    g[1 - POSITIVE_CLASS] = y - s;
    Ok(g)
}
