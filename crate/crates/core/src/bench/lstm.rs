use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::encoder::{embed_project, embed_project_backward, EmbeddingTable, Projection};
use crate::head::{cross_entropy_logit_grad, mean_pool, mean_pool_backward, Activation, MlpStack};
use crate::model::PairExample;
use crate::numkit::{gemm_acc, gemm_nt_acc, gemm_tn_acc, sigmoid, tanh, GradSlot, Tensor};
use crate::{Error, Result};

/// Standard 4-gate LSTM pair scorer sharing one recurrence between question
/// and answer, followed by the same pooling and dense head as the crossed
/// model. Used as a runtime and parameter-count reference, never trained.
///
/// Gate blocks in `w` (`m × 4d`), `u` (`d × 4d`) and `bias` are ordered
/// input, forget, candidate, output.
#[derive(Clone, Debug)]
pub struct LstmBaseline {
    embedding: Arc<EmbeddingTable>,
    pub projection: Projection,
    pub w: GradSlot,
    pub u: GradSlot,
    pub bias: Option<GradSlot>,
    pub mlp: MlpStack,
}

struct SideRecord {
    ids: Vec<u32>,
    x: Tensor,
    /// Activated gates per step, `L × 4d`.
    gates: Vec<f64>,
    c: Vec<f64>,
    h: Vec<f64>,
}

impl LstmBaseline {
    pub fn new(
        embedding: impl Into<Arc<EmbeddingTable>>,
        m: usize,
        d: usize,
        h: usize,
        bias: bool,
        seed: u64,
    ) -> Result<Self> {
        let embedding = embedding.into();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let projection = Projection::new(embedding.dim(), m, &mut rng);
        let w = GradSlot::glorot(&[m, 4 * d], m, 4 * d, &mut rng);
        let u = GradSlot::glorot(&[d, 4 * d], d, 4 * d, &mut rng);
        let mlp = MlpStack::new(2 * d, h, 1, Activation::Tanh, &mut rng)?;
        Ok(LstmBaseline {
            embedding,
            projection,
            w,
            u,
            bias: bias.then(|| GradSlot::zeros(&[4 * d])),
            mlp,
        })
    }

    pub fn hidden(&self) -> usize {
        self.u.value.shape()[0]
    }

    /// Recurrence plus composing dense layer: `4(md + d²) + 2dh + h` with the
    /// bias off.
    pub fn registry_count(&self) -> usize {
        self.w.len()
            + self.u.len()
            + self.bias.as_ref().map_or(0, GradSlot::len)
            + self.mlp.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum::<usize>()
    }

    pub fn params_mut(&mut self) -> Vec<(String, &mut GradSlot)> {
        let mut out: Vec<(String, &mut GradSlot)> = vec![
            ("projection.weight".into(), &mut self.projection.weight),
            ("lstm.w".into(), &mut self.w),
            ("lstm.u".into(), &mut self.u),
        ];
        if let Some(b) = &mut self.bias {
            out.push(("lstm.bias".into(), b));
        }
        for (i, layer) in self.mlp.layers.iter_mut().enumerate() {
            out.push((format!("mlp.dense{i}.weight"), &mut layer.weight));
            out.push((format!("mlp.dense{i}.bias"), &mut layer.bias));
        }
        out.push(("mlp.softmax.weight".into(), &mut self.mlp.output.weight));
        out.push(("mlp.softmax.bias".into(), &mut self.mlp.output.bias));
        out
    }

    pub fn zero_grad(&mut self) {
        for (_, s) in self.params_mut() {
            s.zero_grad();
        }
    }

    fn run_side(&self, ids: &[u32]) -> Result<SideRecord> {
        let x = embed_project(ids, &self.embedding, &self.projection)?;
        let l = ids.len();
        let d = self.hidden();
        let g4 = 4 * d;
        let m = x.row_len();
        // Input contributions for every step at once.
        let mut pre = vec![0.0; l * g4];
        if let Some(b) = &self.bias {
            for row in pre.chunks_exact_mut(g4) {
                row.copy_from_slice(b.value.data());
            }
        }
        gemm_acc(x.data(), self.w.value.data(), &mut pre, l, m, g4);

        let mut gates = vec![0.0; l * g4];
        let mut c = vec![0.0; l * d];
        let mut h = vec![0.0; l * d];
        let u = self.u.value.data();
        for t in 0..l {
            let row = &mut pre[t * g4..(t + 1) * g4];
            if t > 0 {
                gemm_acc(&h[(t - 1) * d..t * d], u, row, 1, d, g4);
            }
            let gt = &mut gates[t * g4..(t + 1) * g4];
            for j in 0..d {
                gt[j] = sigmoid(row[j]);
                gt[d + j] = sigmoid(row[d + j]);
                gt[2 * d + j] = tanh(row[2 * d + j]);
                gt[3 * d + j] = sigmoid(row[3 * d + j]);
                let c_prev = if t > 0 { c[(t - 1) * d + j] } else { 0.0 };
                let ct = gt[d + j] * c_prev + gt[j] * gt[2 * d + j];
                c[t * d + j] = ct;
                h[t * d + j] = gt[3 * d + j] * tanh(ct);
            }
        }
        Ok(SideRecord {
            ids: ids.to_vec(),
            x,
            gates,
            c,
            h,
        })
    }

    fn side_backward(&mut self, rec: &SideRecord, dh_ext: &Tensor) -> Result<()> {
        let l = rec.ids.len();
        let d = self.hidden();
        let g4 = 4 * d;
        let m = rec.x.row_len();
        let mut dpre = vec![0.0; l * g4];
        let mut dh_next = vec![0.0; d];
        let mut dc_next = vec![0.0; d];
        for t in (0..l).rev() {
            let gt = &rec.gates[t * g4..(t + 1) * g4];
            let dp = &mut dpre[t * g4..(t + 1) * g4];
            for j in 0..d {
                let (i, f, g, o) = (gt[j], gt[d + j], gt[2 * d + j], gt[3 * d + j]);
                let ct = rec.c[t * d + j];
                let c_prev = if t > 0 { rec.c[(t - 1) * d + j] } else { 0.0 };
                let tc = tanh(ct);
                let dh = dh_ext.row(t)[j] + dh_next[j];
                let dc = dc_next[j] + dh * o * (1.0 - tc * tc);
                dp[j] = dc * g * i * (1.0 - i);
                dp[d + j] = dc * c_prev * f * (1.0 - f);
                dp[2 * d + j] = dc * i * (1.0 - g * g);
                dp[3 * d + j] = dh * tc * o * (1.0 - o);
                dc_next[j] = dc * f;
            }
            dh_next.iter_mut().for_each(|v| *v = 0.0);
            if t > 0 {
                gemm_nt_acc(dp, self.u.value.data(), &mut dh_next, 1, g4, d);
                gemm_tn_acc(&rec.h[(t - 1) * d..t * d], dp, self.u.grad.data_mut(), 1, d, g4);
            }
        }
        if let Some(b) = &mut self.bias {
            let bg = b.grad.data_mut();
            for row in dpre.chunks_exact(g4) {
                bg.iter_mut().zip(row).for_each(|(a, v)| *a += v);
            }
        }
        gemm_tn_acc(rec.x.data(), &dpre, self.w.grad.data_mut(), l, m, g4);
        let mut dx = vec![0.0; l * m];
        gemm_nt_acc(&dpre, self.w.value.data(), &mut dx, l, g4, m);
        let dx = Tensor::from_vec(&[l, m], dx)?;
        embed_project_backward(&rec.ids, &self.embedding, &mut self.projection, &dx)?;
        Ok(())
    }

    fn forward_inner(&self, ex: &PairExample) -> Result<(f64, SideRecord, SideRecord, crate::head::MlpRecord)> {
        if ex.question.is_empty() || ex.answer.is_empty() {
            return Err(Error::EmptySequence("question and answer need tokens".into()));
        }
        let q = self.run_side(ex.question)?;
        let a = self.run_side(ex.answer)?;
        let d = self.hidden();
        let pool = |r: &SideRecord| {
            let t = Tensor::from_vec(&[r.ids.len(), d], r.h.clone())?;
            mean_pool(&t, &vec![true; r.ids.len()])
        };
        let mut input = pool(&q)?;
        input.extend(pool(&a)?);
        let (s, rec) = self.mlp.forward(&input, None)?;
        Ok((s, q, a, rec))
    }

    pub fn score(&self, ex: &PairExample) -> Result<f64> {
        self.forward_inner(ex).map(|r| r.0)
    }

    /// Forward and backward for one labelled pair; returns the score.
    pub fn accumulate(&mut self, ex: &PairExample, label: u8) -> Result<f64> {
        let (s, q, a, rec) = self.forward_inner(ex)?;
        let d_logits = cross_entropy_logit_grad(rec.probs, label)?;
        let d_in = self.mlp.backward(&rec, d_logits);
        let d = self.hidden();
        let dq = mean_pool_backward(&d_in[..d], &vec![true; q.ids.len()])?;
        let da = mean_pool_backward(&d_in[d..], &vec![true; a.ids.len()])?;
        self.side_backward(&q, &dq)?;
        self.side_backward(&a, &da)?;
        Ok(s)
    }
}
