//! The full pair scorer: shared embedding + projection, one quasi-recurrent
//! layer (crossed or plain), masked mean pooling and the dense softmax head.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::SequenceBatch;
use crate::encoder::{
    compute_gates, compute_gates_backward, ctrn_cells, ctrn_cells_backward, embed_project,
    embed_project_backward, fo_pool_backward, fo_pool_raw, CellTrace, EmbeddingTable, GateBanks,
    GateBundle, GateGrads, PairState, Projection,
};
use crate::head::{
    cross_entropy_logit_grad, loss, mean_pool, mean_pool_backward, Activation, Dropout,
    LossReport, MlpRecord, MlpStack,
};
use crate::numkit::{GradSlot, Tape, Tensor};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EncoderKind {
    /// Plain quasi-recurrent encoder: each side pooled under its own gates.
    Qrnn,
    /// Cross temporal recurrent encoder.
    #[default]
    Ctrn,
}

impl fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncoderKind::Qrnn => "qrnn",
            EncoderKind::Ctrn => "ctrn",
        })
    }
}

impl FromStr for EncoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qrnn" => Ok(EncoderKind::Qrnn),
            "ctrn" => Ok(EncoderKind::Ctrn),
            other => Err(Error::config("encoder", format!("unknown encoder `{other}`"))),
        }
    }
}

/// Architecture hyperparameters. The embedding width comes from the table.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    /// Projection output width.
    pub m: usize,
    /// Number of filters per gate bank.
    pub d: usize,
    /// Filter width.
    pub k: usize,
    /// Dense layer width.
    pub h: usize,
    pub dense_layers: usize,
    pub activation: Activation,
    pub kind: EncoderKind,
    /// One set of gate banks for both sides (the default) or one per side.
    pub shared_banks: bool,
    pub conv_bias: bool,
    /// Append the four word-overlap features before the dense layers.
    pub overlap_features: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            m: 300,
            d: 512,
            k: 2,
            h: 128,
            dense_layers: 1,
            activation: Activation::Tanh,
            kind: EncoderKind::Ctrn,
            shared_banks: true,
            conv_bias: true,
            overlap_features: false,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [("m", self.m), ("d", self.d), ("k", self.k), ("h", self.h)] {
            if v == 0 {
                return Err(Error::config(key, "must be positive"));
            }
        }
        if !(1..=3).contains(&self.dense_layers) {
            return Err(Error::config("dense_layers", "must be in [1, 3]"));
        }
        Ok(())
    }

    fn head_input(&self) -> usize {
        2 * self.d + if self.overlap_features { 4 } else { 0 }
    }
}

/// Which part of the network a parameter belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamGroup {
    Projection,
    /// Gate convolution banks.
    Encoder,
    /// Dense layers that compose the pooled pair.
    Compose,
    /// The 2-class softmax head.
    Output,
}

/// One question-answer pair as token ids.
#[derive(Clone, Copy, Debug)]
pub struct PairExample<'a> {
    pub question: &'a [u32],
    pub answer: &'a [u32],
    pub extra: Option<[f64; 4]>,
}

impl<'a> PairExample<'a> {
    pub fn new(question: &'a [u32], answer: &'a [u32]) -> Self {
        PairExample {
            question,
            answer,
            extra: None,
        }
    }
}

#[derive(Debug)]
enum EncodeRecord {
    Ctrn(PairState),
    Qrnn {
        gates_q: GateBundle,
        gates_a: GateBundle,
        trace_q: CellTrace,
        trace_a: CellTrace,
    },
}

/// Layer-granular forward record consumed by [`Model::backward`].
#[derive(Debug)]
pub enum LayerRecord {
    Embed {
        q_ids: Vec<u32>,
        a_ids: Vec<u32>,
        x_q: Tensor,
        x_a: Tensor,
    },
    #[allow(private_interfaces)]
    Encode(EncodeRecord),
    Pool {
        len_q: usize,
        len_a: usize,
    },
    Head(MlpRecord),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    config: ModelConfig,
    embedding: Arc<EmbeddingTable>,
    projection: Projection,
    banks_q: GateBanks,
    /// Answer-side banks when sharing is off.
    banks_a: Option<GateBanks>,
    mlp: MlpStack,
}

impl Model {
    pub fn new(config: ModelConfig, embedding: impl Into<Arc<EmbeddingTable>>, seed: u64) -> Result<Self> {
        config.validate()?;
        let embedding = embedding.into();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m, d, k) = (embedding.dim(), config.m, config.d, config.k);
        let projection = Projection::new(n, m, &mut rng);
        let banks_q = GateBanks::new(k, d, m, config.conv_bias, &mut rng);
        let banks_a = (!config.shared_banks).then(|| GateBanks::new(k, d, m, config.conv_bias, &mut rng));
        let mlp = MlpStack::new(
            config.head_input(),
            config.h,
            config.dense_layers,
            config.activation,
            &mut rng,
        )?;
        Ok(Model {
            config,
            embedding,
            projection,
            banks_q,
            banks_a,
            mlp,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn embedding(&self) -> &EmbeddingTable {
        &self.embedding
    }

    pub fn embedding_arc(&self) -> Arc<EmbeddingTable> {
        Arc::clone(&self.embedding)
    }

    /// Every trainable parameter in a fixed order. The embedding table is
    /// fixed and never listed.
    pub fn params(&self) -> Vec<(String, ParamGroup, &GradSlot)> {
        let mut out = vec![(
            "projection.weight".to_string(),
            ParamGroup::Projection,
            &self.projection.weight,
        )];
        let sides: Vec<(&str, &GateBanks)> = match &self.banks_a {
            None => vec![("encoder", &self.banks_q)],
            Some(a) => vec![("encoder.q", &self.banks_q), ("encoder.a", a)],
        };
        for (prefix, banks) in sides {
            for (name, bank) in banks.banks() {
                out.push((format!("{prefix}.{name}.weight"), ParamGroup::Encoder, &bank.weight));
                if let Some(b) = &bank.bias {
                    out.push((format!("{prefix}.{name}.bias"), ParamGroup::Encoder, b));
                }
            }
        }
        for (i, layer) in self.mlp.layers.iter().enumerate() {
            out.push((format!("mlp.dense{i}.weight"), ParamGroup::Compose, &layer.weight));
            out.push((format!("mlp.dense{i}.bias"), ParamGroup::Compose, &layer.bias));
        }
        out.push(("mlp.softmax.weight".into(), ParamGroup::Output, &self.mlp.output.weight));
        out.push(("mlp.softmax.bias".into(), ParamGroup::Output, &self.mlp.output.bias));
        out
    }

    /// Mutable view of [`Model::params`], same order and names.
    pub fn params_mut(&mut self) -> Vec<(String, ParamGroup, &mut GradSlot)> {
        let mut out = vec![(
            "projection.weight".to_string(),
            ParamGroup::Projection,
            &mut self.projection.weight,
        )];
        let sides: Vec<(&str, &mut GateBanks)> = match &mut self.banks_a {
            None => vec![("encoder", &mut self.banks_q)],
            Some(a) => vec![("encoder.q", &mut self.banks_q), ("encoder.a", a)],
        };
        for (prefix, banks) in sides {
            for (name, bank) in banks.banks_mut() {
                out.push((format!("{prefix}.{name}.weight"), ParamGroup::Encoder, &mut bank.weight));
                if let Some(b) = &mut bank.bias {
                    out.push((format!("{prefix}.{name}.bias"), ParamGroup::Encoder, b));
                }
            }
        }
        for (i, layer) in self.mlp.layers.iter_mut().enumerate() {
            out.push((format!("mlp.dense{i}.weight"), ParamGroup::Compose, &mut layer.weight));
            out.push((format!("mlp.dense{i}.bias"), ParamGroup::Compose, &mut layer.bias));
        }
        out.push((
            "mlp.softmax.weight".into(),
            ParamGroup::Output,
            &mut self.mlp.output.weight,
        ));
        out.push((
            "mlp.softmax.bias".into(),
            ParamGroup::Output,
            &mut self.mlp.output.bias,
        ));
        out
    }

    pub fn param_mut(&mut self, name: &str) -> Option<&mut GradSlot> {
        self.params_mut()
            .into_iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, _, s)| s)
    }

    /// Element count of every trainable parameter.
    pub fn trainable_count(&self) -> usize {
        self.params().iter().map(|(_, _, s)| s.len()).sum()
    }

    /// Element count of the gate banks and the composing dense layers: the
    /// parameters the memory-complexity formulas account for. Projection and
    /// softmax head are excluded.
    pub fn registry_count(&self) -> usize {
        self.params()
            .iter()
            .filter(|(_, g, _)| matches!(g, ParamGroup::Encoder | ParamGroup::Compose))
            .map(|(_, _, s)| s.len())
            .sum()
    }

    /// `‖θ‖²` over trainable parameters.
    pub fn l2_sq_norm(&self) -> f64 {
        self.params().iter().map(|(_, _, s)| s.value.sum_sq()).sum()
    }

    pub fn zero_grad(&mut self) {
        for (_, _, s) in self.params_mut() {
            s.zero_grad();
        }
    }

    /// Adds the gradient of `λ‖θ‖²`, i.e. `2λθ`.
    pub fn accumulate_l2_grad(&mut self, lambda: f64) {
        if lambda == 0.0 {
            return;
        }
        for (_, _, s) in self.params_mut() {
            let GradSlot { value, grad } = s;
            for (g, v) in grad.data_mut().iter_mut().zip(value.data()) {
                *g += 2.0 * lambda * v;
            }
        }
    }

    fn banks_a(&self) -> &GateBanks {
        self.banks_a.as_ref().unwrap_or(&self.banks_q)
    }

    fn check_example(&self, ex: &PairExample) -> Result<()> {
        if ex.question.is_empty() || ex.answer.is_empty() {
            return Err(Error::EmptySequence("question and answer need tokens".into()));
        }
        if ex.extra.is_some() != self.config.overlap_features {
            return Err(Error::shape(if self.config.overlap_features {
                "model expects overlap features"
            } else {
                "overlap features given to a model without them"
            }));
        }
        Ok(())
    }

    /// Runs the pair forward, recording everything backward needs.
    pub fn forward(&self, ex: &PairExample, dropout: Option<&mut Dropout>) -> Result<(f64, Tape<LayerRecord>)> {
        self.check_example(ex)?;
        let mut tape = Tape::new();
        let x_q = embed_project(ex.question, &self.embedding, &self.projection)?;
        let x_a = embed_project(ex.answer, &self.embedding, &self.projection)?;
        let gates_q = compute_gates(&x_q, &self.banks_q)?;
        let gates_a = compute_gates(&x_a, self.banks_a())?;
        tape.push(LayerRecord::Embed {
            q_ids: ex.question.to_vec(),
            a_ids: ex.answer.to_vec(),
            x_q,
            x_a,
        });

        let (len_q, len_a) = (ex.question.len(), ex.answer.len());
        let record = match self.config.kind {
            EncoderKind::Ctrn => EncodeRecord::Ctrn(ctrn_cells(gates_q, gates_a)?),
            EncoderKind::Qrnn => {
                let trace_q = fo_pool_raw(&gates_q.z, &gates_q.f, &gates_q.o)?;
                let trace_a = fo_pool_raw(&gates_a.z, &gates_a.f, &gates_a.o)?;
                EncodeRecord::Qrnn {
                    gates_q,
                    gates_a,
                    trace_q,
                    trace_a,
                }
            }
        };
        let (fused_q, fused_a) = match &record {
            EncodeRecord::Ctrn(s) => (&s.q.fused, &s.a.fused),
            EncodeRecord::Qrnn { trace_q, trace_a, .. } => (&trace_q.h, &trace_a.h),
        };
        let q_vec = mean_pool(fused_q, &vec![true; len_q])?;
        let a_vec = mean_pool(fused_a, &vec![true; len_a])?;
        tape.push(LayerRecord::Encode(record));
        tape.push(LayerRecord::Pool { len_q, len_a });

        let mut input = q_vec;
        input.extend_from_slice(&a_vec);
        if let Some(e) = &ex.extra {
            input.extend_from_slice(e);
        }
        let (s, rec) = self.mlp.forward(&input, dropout)?;
        tape.push(LayerRecord::Head(rec));
        Ok((s, tape))
    }

    /// Relevance probability with dropout off.
    pub fn score(&self, ex: &PairExample) -> Result<f64> {
        self.forward(ex, None).map(|(s, _)| s)
    }

    /// Scores every row of a padded batch using its true lengths.
    pub fn score_batch(&self, batch: &SequenceBatch) -> Result<Vec<f64>> {
        (0..batch.len()).map(|i| self.score(&batch.example(i))).collect()
    }

    /// Accumulates gradients of the pointwise cross-entropy for `label` into
    /// every parameter's gradient slot, consuming the forward tape.
    pub fn backward(&mut self, mut tape: Tape<LayerRecord>, label: u8) -> Result<()> {
        let LayerRecord::Head(head) = tape.pop("softmax head")? else {
            return Err(Error::State("tape out of order at softmax head".into()));
        };
        let d_logits = cross_entropy_logit_grad(head.probs, label)?;
        let d_input = self.mlp.backward(&head, d_logits);

        let LayerRecord::Pool { len_q, len_a } = tape.pop("mean pooling")? else {
            return Err(Error::State("tape out of order at mean pooling".into()));
        };
        let d = self.config.d;
        let d_fused_q = mean_pool_backward(&d_input[..d], &vec![true; len_q])?;
        let d_fused_a = mean_pool_backward(&d_input[d..2 * d], &vec![true; len_a])?;

        let LayerRecord::Encode(record) = tape.pop("recurrent layer")? else {
            return Err(Error::State("tape out of order at recurrent layer".into()));
        };
        let (gq, ga, gates_q, gates_a) = match record {
            EncodeRecord::Ctrn(state) => {
                let (gq, ga) = ctrn_cells_backward(&state, &d_fused_q, &d_fused_a)?;
                (gq, ga, state.gates_q, state.gates_a)
            }
            EncodeRecord::Qrnn {
                gates_q,
                gates_a,
                trace_q,
                trace_a,
            } => {
                let side = |g: &GateBundle, tr: &CellTrace, dh: &Tensor| -> Result<GateGrads> {
                    let (z, f, o) = fo_pool_backward(&g.z, &g.f, &g.o, tr, dh)?;
                    Ok(GateGrads { z, f, o })
                };
                let gq = side(&gates_q, &trace_q, &d_fused_q)?;
                let ga = side(&gates_a, &trace_a, &d_fused_a)?;
                (gq, ga, gates_q, gates_a)
            }
        };

        let LayerRecord::Embed { q_ids, a_ids, x_q, x_a } = tape.pop("embedding")? else {
            return Err(Error::State("tape out of order at embedding".into()));
        };
        let dx_q = compute_gates_backward(&x_q, &mut self.banks_q, &gates_q, &gq)?;
        let banks_a = self.banks_a.as_mut().unwrap_or(&mut self.banks_q);
        let dx_a = compute_gates_backward(&x_a, banks_a, &gates_a, &ga)?;
        embed_project_backward(&q_ids, &self.embedding, &mut self.projection, &dx_q)?;
        embed_project_backward(&a_ids, &self.embedding, &mut self.projection, &dx_a)?;
        Ok(())
    }

    /// Forward and backward for one labelled pair; returns the score.
    pub fn accumulate(&mut self, ex: &PairExample, label: u8, dropout: Option<&mut Dropout>) -> Result<f64> {
        let (s, tape) = self.forward(ex, dropout)?;
        self.backward(tape, label)?;
        Ok(s)
    }

    /// Objective over labelled pairs with dropout off.
    pub fn loss(&self, batch: &[(PairExample, u8)], lambda: f64) -> Result<LossReport> {
        let scores = batch
            .iter()
            .map(|(ex, _)| self.score(ex))
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<u8> = batch.iter().map(|(_, y)| *y).collect();
        loss(&scores, &labels, self.l2_sq_norm(), lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::gradcheck::{compare, numeric_gradient, DEFAULT_STEP, DEFAULT_TOLERANCE};

    fn small_config(kind: EncoderKind) -> ModelConfig {
        ModelConfig {
            m: 4,
            d: 3,
            k: 2,
            h: 5,
            dense_layers: 1,
            activation: Activation::Tanh,
            kind,
            shared_banks: true,
            conv_bias: true,
            overlap_features: false,
        }
    }

    fn table() -> EmbeddingTable {
        EmbeddingTable::random(12, 6, 1.0, 77)
    }

    #[test]
    fn ctrn_and_qrnn_share_a_parameter_set() {
        let c = Model::new(small_config(EncoderKind::Ctrn), table(), 1).unwrap();
        let q = Model::new(small_config(EncoderKind::Qrnn), table(), 1).unwrap();
        let names = |m: &Model| -> Vec<(String, Vec<usize>)> {
            m.params()
                .into_iter()
                .map(|(n, _, s)| (n, s.value.shape().to_vec()))
                .collect()
        };
        assert_eq!(names(&c), names(&q));
        assert_eq!(c.trainable_count(), q.trainable_count());
    }

    #[test]
    fn unshared_banks_double_encoder_weights() {
        let mut cfg = small_config(EncoderKind::Ctrn);
        cfg.conv_bias = false;
        let shared = Model::new(cfg.clone(), table(), 1).unwrap();
        cfg.shared_banks = false;
        let split = Model::new(cfg.clone(), table(), 1).unwrap();
        let three_kdm = 3 * cfg.k * cfg.d * cfg.m;
        assert_eq!(split.registry_count() - shared.registry_count(), three_kdm);
    }

    #[test]
    fn backward_without_forward_is_state_error() {
        let mut m = Model::new(small_config(EncoderKind::Ctrn), table(), 1).unwrap();
        let err = m.backward(Tape::new(), 1).unwrap_err();
        assert!(matches!(err, Error::State(_)));
    }

    #[test]
    fn overlap_flag_must_match_inputs() {
        let m = Model::new(small_config(EncoderKind::Ctrn), table(), 1).unwrap();
        let ex = PairExample {
            question: &[2, 3],
            answer: &[4],
            extra: Some([0.0; 4]),
        };
        assert!(m.score(&ex).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for kind in [EncoderKind::Ctrn, EncoderKind::Qrnn] {
            let mut model = Model::new(small_config(kind), table(), 5).unwrap();
            let q = [2u32, 7, 3, 9];
            let a = [4u32, 5, 11, 6, 8, 2];
            let ex = PairExample::new(&q, &a);
            model.zero_grad();
            model.accumulate(&ex, 1, None).unwrap();
            let names: Vec<String> = model.params().into_iter().map(|(n, _, _)| n).collect();
            for name in names {
                let analytic = model.param_mut(&name).unwrap().grad.data().to_vec();
                let mut values = model.param_mut(&name).unwrap().value.data().to_vec();
                let numeric = numeric_gradient(&mut values, DEFAULT_STEP, |v| {
                    let slot = model.param_mut(&name).unwrap();
                    slot.value.data_mut().copy_from_slice(v);
                    model.loss(&[(ex, 1)], 0.0).unwrap().total
                });
                model.param_mut(&name).unwrap().value.data_mut().copy_from_slice(&values);
                let r = compare(&analytic, &numeric);
                assert!(r.passes(DEFAULT_TOLERANCE), "{kind} {name}: {r:?}");
            }
        }
    }
}
