use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::Dropout;
use crate::numkit::{gemm_acc, gemm_nt_acc, relu, tanh, tanh_grad_from_output, GradSlot};
use crate::{Error, Result};

/// Index of the relevant class in the 2-way softmax.
pub const POSITIVE_CLASS: usize = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Activation {
    #[default]
    Tanh,
    Relu,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => tanh(x),
            Activation::Relu => relu(x),
        }
    }

    fn slope_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => tanh_grad_from_output(y),
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
        })
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            other => Err(Error::config("activation", format!("unknown activation `{other}`"))),
        }
    }
}

/// Fully connected layer, `weight` is `in × out`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub weight: GradSlot,
    pub bias: GradSlot,
}

impl Dense {
    pub fn new<R: Rng + ?Sized>(input: usize, output: usize, rng: &mut R) -> Self {
        Dense {
            weight: GradSlot::glorot(&[input, output], input, output, rng),
            bias: GradSlot::zeros(&[output]),
        }
    }

    pub fn zeros(input: usize, output: usize) -> Self {
        Dense {
            weight: GradSlot::zeros(&[input, output]),
            bias: GradSlot::zeros(&[output]),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weight.value.shape()[0]
    }

    pub fn output_dim(&self) -> usize {
        self.weight.value.shape()[1]
    }

    fn affine(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.bias.value.data().to_vec();
        gemm_acc(x, self.weight.value.data(), &mut y, 1, self.input_dim(), self.output_dim());
        y
    }

    /// Accumulates parameter gradients; returns `dy · Wᵀ`.
    fn affine_backward(&mut self, x: &[f64], dy: &[f64]) -> Vec<f64> {
        let (i, o) = (self.input_dim(), self.output_dim());
        for (g, d) in self.bias.grad.data_mut().iter_mut().zip(dy) {
            *g += d;
        }
        let wg = self.weight.grad.data_mut();
        for (r, &xv) in x.iter().enumerate() {
            if xv == 0.0 {
                continue;
            }
            for (g, d) in wg[r * o..(r + 1) * o].iter_mut().zip(dy) {
                *g += xv * d;
            }
        }
        let mut dx = vec![0.0; i];
        gemm_nt_acc(dy, self.weight.value.data(), &mut dx, 1, o, i);
        dx
    }

    pub fn zero_grad(&mut self) {
        self.weight.zero_grad();
        self.bias.zero_grad();
    }
}

/// Numerically stable 2-way softmax.
pub fn softmax2(logits: [f64; 2]) -> [f64; 2] {
    let delta = logits[1] - logits[0];
    let p1 = if delta >= 0.0 {
        1.0 / (1.0 + (-delta).exp())
    } else {
        let e = delta.exp();
        e / (1.0 + e)
    };
    [1.0 - p1, p1]
}

/// Dense layers followed by the `h × 2` softmax head.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpStack {
    pub layers: Vec<Dense>,
    pub output: Dense,
    pub activation: Activation,
}

/// Forward state kept for the backward pass.
#[derive(Clone, Debug)]
pub struct MlpRecord {
    /// Input of each dense layer before dropout.
    inputs: Vec<Vec<f64>>,
    /// Dropout multipliers per dense layer, when dropout was active.
    masks: Vec<Option<Vec<f64>>>,
    /// Activated output of each dense layer.
    outputs: Vec<Vec<f64>>,
    pub logits: [f64; 2],
    pub probs: [f64; 2],
}

impl MlpStack {
    pub fn new<R: Rng + ?Sized>(
        input: usize,
        hidden: usize,
        layers: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        if !(1..=3).contains(&layers) {
            return Err(Error::config("dense_layers", "must be in [1, 3]"));
        }
        let mut stack = Vec::with_capacity(layers);
        let mut width = input;
        for _ in 0..layers {
            stack.push(Dense::new(width, hidden, rng));
            width = hidden;
        }
        Ok(MlpStack {
            layers: stack,
            output: Dense::new(hidden, 2, rng),
            activation,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn hidden_dim(&self) -> usize {
        self.output.input_dim()
    }

    /// Positive-class probability, with the record needed for backward.
    pub fn forward(&self, input: &[f64], mut dropout: Option<&mut Dropout>) -> Result<(f64, MlpRecord)> {
        if input.len() != self.input_dim() {
            return Err(Error::shape(format!(
                "mlp input has width {}, first layer expects {}",
                input.len(),
                self.input_dim()
            )));
        }
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut masks = Vec::with_capacity(self.layers.len());
        let mut outputs = Vec::with_capacity(self.layers.len());
        let mut x = input.to_vec();
        for layer in &self.layers {
            let mask = dropout.as_deref_mut().map(|d| d.mask(x.len()));
            let dropped: Vec<f64> = match &mask {
                Some(m) => x.iter().zip(m).map(|(v, k)| v * k).collect(),
                None => x.clone(),
            };
            let y: Vec<f64> = layer
                .affine(&dropped)
                .into_iter()
                .map(|v| self.activation.apply(v))
                .collect();
            inputs.push(x);
            masks.push(mask);
            outputs.push(y.clone());
            x = y;
        }
        let l = self.output.affine(&x);
        let logits = [l[0], l[1]];
        if !logits.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("softmax logits".into()));
        }
        let probs = softmax2(logits);
        Ok((
            probs[POSITIVE_CLASS],
            MlpRecord {
                inputs,
                masks,
                outputs,
                logits,
                probs,
            },
        ))
    }

    /// Accumulates parameter gradients from `d_logits`; returns the gradient
    /// with respect to the stack input.
    pub fn backward(&mut self, record: &MlpRecord, d_logits: [f64; 2]) -> Vec<f64> {
        let last = record.outputs.last().expect("at least one dense layer");
        let mut dx = self.output.affine_backward(last, &d_logits);
        for (i, layer) in self.layers.iter_mut().enumerate().rev() {
            let y = &record.outputs[i];
            let dpre: Vec<f64> = dx
                .iter()
                .zip(y)
                .map(|(g, &v)| g * self.activation.slope_from_output(v))
                .collect();
            let x = &record.inputs[i];
            let dropped: Vec<f64> = match &record.masks[i] {
                Some(m) => x.iter().zip(m).map(|(v, k)| v * k).collect(),
                None => x.clone(),
            };
            let mut d_in = layer.affine_backward(&dropped, &dpre);
            if let Some(m) = &record.masks[i] {
                d_in.iter_mut().zip(m).for_each(|(g, k)| *g *= k);
            }
            dx = d_in;
        }
        dx
    }

    pub fn dense_mut(&mut self) -> impl Iterator<Item = &mut Dense> {
        self.layers.iter_mut().chain(std::iter::once(&mut self.output))
    }

    pub fn zero_grad(&mut self) {
        self.dense_mut().for_each(Dense::zero_grad);
    }
}

/// Pooled question and answer vectors plus optional overlap features.
#[derive(Clone, Debug, PartialEq)]
pub struct PooledPair {
    pub q_vec: Vec<f64>,
    pub a_vec: Vec<f64>,
    pub extra: Option<[f64; 4]>,
}

impl PooledPair {
    /// `[q_vec; a_vec; extra?]`
    pub fn concat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.q_vec.len() + self.a_vec.len() + 4);
        v.extend_from_slice(&self.q_vec);
        v.extend_from_slice(&self.a_vec);
        if let Some(e) = &self.extra {
            v.extend_from_slice(e);
        }
        v
    }
}

/// Relevance probability of a pooled pair.
pub fn score(pair: &PooledPair, mlp: &MlpStack, dropout: Option<&mut Dropout>) -> Result<f64> {
    mlp.forward(&pair.concat(), dropout).map(|(s, _)| s)
}
