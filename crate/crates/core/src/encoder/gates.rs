use rand::Rng;

use crate::numkit::{
    conv1d, conv1d_backward, sigmoid, sigmoid_grad_from_output, tanh, tanh_grad_from_output,
    ConvBank, Padding, Tensor,
};
use crate::{Error, Result};

/// The three convolution banks of a quasi-recurrent layer.
#[derive(Clone, Debug, PartialEq)]
pub struct GateBanks {
    pub z: ConvBank,
    pub f: ConvBank,
    pub o: ConvBank,
}

impl GateBanks {
    pub fn new<R: Rng + ?Sized>(k: usize, d: usize, m: usize, bias: bool, rng: &mut R) -> Self {
        GateBanks {
            z: ConvBank::new(k, d, m, bias, rng),
            f: ConvBank::new(k, d, m, bias, rng),
            o: ConvBank::new(k, d, m, bias, rng),
        }
    }

    pub fn zeros(k: usize, d: usize, m: usize, bias: bool) -> Self {
        GateBanks {
            z: ConvBank::zeros(k, d, m, bias),
            f: ConvBank::zeros(k, d, m, bias),
            o: ConvBank::zeros(k, d, m, bias),
        }
    }

    /// `(k, d, m)`, checked to agree across the three banks.
    pub fn dims(&self) -> Result<(usize, usize, usize)> {
        let dims = self.z.dims();
        if self.f.dims() != dims || self.o.dims() != dims {
            return Err(Error::shape("gate banks disagree on (k, d, m)"));
        }
        Ok(dims)
    }

    pub fn banks(&self) -> [(&'static str, &ConvBank); 3] {
        [("conv_z", &self.z), ("conv_f", &self.f), ("conv_o", &self.o)]
    }

    pub fn banks_mut(&mut self) -> [(&'static str, &mut ConvBank); 3] {
        [
            ("conv_z", &mut self.z),
            ("conv_f", &mut self.f),
            ("conv_o", &mut self.o),
        ]
    }

    pub fn zero_grad(&mut self) {
        self.z.zero_grad();
        self.f.zero_grad();
        self.o.zero_grad();
    }
}

/// Convolved candidate (`z ∈ (-1, 1)`) and gates (`f, o ∈ (0, 1)`), each `L × d`.
#[derive(Clone, Debug, PartialEq)]
pub struct GateBundle {
    pub z: Tensor,
    pub f: Tensor,
    pub o: Tensor,
}

impl GateBundle {
    pub fn len(&self) -> usize {
        self.z.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.z.rows() == 0
    }

    pub fn width(&self) -> usize {
        self.z.row_len()
    }
}

/// Upstream gradients with respect to the three activated gate tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct GateGrads {
    pub z: Tensor,
    pub f: Tensor,
    pub o: Tensor,
}

impl GateGrads {
    pub fn zeros(l: usize, d: usize) -> Self {
        GateGrads {
            z: Tensor::zeros(&[l, d]),
            f: Tensor::zeros(&[l, d]),
            o: Tensor::zeros(&[l, d]),
        }
    }
}

/// `Z = tanh(W_z * X)`, `F = σ(W_f * X)`, `O = σ(W_o * X)`.
pub fn compute_gates(x: &Tensor, banks: &GateBanks) -> Result<GateBundle> {
    banks.dims()?;
    let z = conv1d(x, &banks.z, Padding::Causal)?.map(tanh);
    let f = conv1d(x, &banks.f, Padding::Causal)?.map(sigmoid);
    let o = conv1d(x, &banks.o, Padding::Causal)?.map(sigmoid);
    Ok(GateBundle { z, f, o })
}

/// Backpropagates through the activations and the three convolutions,
/// accumulating bank gradients and returning the input gradient.
pub fn compute_gates_backward(
    x: &Tensor,
    banks: &mut GateBanks,
    gates: &GateBundle,
    grads: &GateGrads,
) -> Result<Tensor> {
    let pre = |out: &Tensor, up: &Tensor, slope: fn(f64) -> f64| -> Tensor {
        let mut pre = Tensor::zeros(out.shape());
        for ((p, &y), &g) in pre.data_mut().iter_mut().zip(out.data()).zip(up.data()) {
            *p = g * slope(y);
        }
        pre
    };
    let pre_z = pre(&gates.z, &grads.z, tanh_grad_from_output);
    let pre_f = pre(&gates.f, &grads.f, sigmoid_grad_from_output);
    let pre_o = pre(&gates.o, &grads.o, sigmoid_grad_from_output);

    let mut dx = conv1d_backward(x, &mut banks.z, &pre_z)?;
    dx.add_assign(&conv1d_backward(x, &mut banks.f, &pre_f)?)?;
    dx.add_assign(&conv1d_backward(x, &mut banks.o, &pre_o)?)?;
    Ok(dx)
}
