use rand::Rng;

use super::{gemm, GradSlot, Tensor};
use crate::{Error, Result};

/// Temporal padding mode. Only causal (left-pad `k - 1` zeros) is supported.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Padding {
    #[default]
    Causal,
}

/// A bank of `d` temporal filters of width `k` over `m` input channels.
///
/// `weight` is stored `k × d × m`: tap `j` is a `d × m` matrix applied to the
/// input `k - 1 - j` steps in the past.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvBank {
    pub weight: GradSlot,
    pub bias: Option<GradSlot>,
}

impl ConvBank {
    pub fn new<R: Rng + ?Sized>(k: usize, d: usize, m: usize, bias: bool, rng: &mut R) -> Self {
        assert!(k >= 1, "filter width must be at least 1");
        ConvBank {
            weight: GradSlot::glorot(&[k, d, m], k * m, d, rng),
            bias: bias.then(|| GradSlot::zeros(&[d])),
        }
    }

    pub fn zeros(k: usize, d: usize, m: usize, bias: bool) -> Self {
        assert!(k >= 1, "filter width must be at least 1");
        ConvBank {
            weight: GradSlot::zeros(&[k, d, m]),
            bias: bias.then(|| GradSlot::zeros(&[d])),
        }
    }

    /// `(k, d, m)`
    pub fn dims(&self) -> (usize, usize, usize) {
        let s = self.weight.value.shape();
        (s[0], s[1], s[2])
    }

    fn tap(&self, j: usize) -> &[f64] {
        let (_, d, m) = self.dims();
        &self.weight.value.data()[j * d * m..(j + 1) * d * m]
    }

    pub fn zero_grad(&mut self) {
        self.weight.zero_grad();
        if let Some(b) = &mut self.bias {
            b.zero_grad();
        }
    }
}

fn check_input(x: &Tensor, bank: &ConvBank) -> Result<(usize, usize)> {
    let (l, m) = x.dims2("conv1d input")?;
    let (_, _, bank_m) = bank.dims();
    if m != bank_m {
        return Err(Error::shape(format!(
            "conv1d: input has {m} channels, bank expects {bank_m}"
        )));
    }
    if l == 0 {
        return Err(Error::shape("conv1d: empty sequence"));
    }
    Ok((l, m))
}

fn transpose_into(src: &[f64], rows: usize, cols: usize, dst: &mut Vec<f64>) {
    dst.clear();
    dst.resize(rows * cols, 0.0);
    for i in 0..rows {
        for j in 0..cols {
            dst[j * rows + i] = src[i * cols + j];
        }
    }
}

/// `out[t] = Σ_j W[j] · x[t - k + 1 + j] + b`, reading indices before the start
/// as zero. Output length equals input length.
pub fn conv1d(x: &Tensor, bank: &ConvBank, padding: Padding) -> Result<Tensor> {
    let Padding::Causal = padding;
    let (l, m) = check_input(x, bank)?;
    let (k, d, _) = bank.dims();
    let mut out = vec![0.0; l * d];
    if let Some(b) = &bank.bias {
        for row in out.chunks_exact_mut(d) {
            row.copy_from_slice(b.value.data());
        }
    }
    let mut tap_t = Vec::new();
    for j in 0..k {
        let shift = k - 1 - j;
        if shift >= l {
            continue;
        }
        let n = l - shift;
        transpose_into(bank.tap(j), d, m, &mut tap_t);
        gemm::gemm_acc(&x.data()[..n * m], &tap_t, &mut out[shift * d..], n, m, d);
    }
    let out = Tensor::from_vec(&[l, d], out)?;
    Ok(out)
}

/// Accumulates weight and bias gradients into `bank` and returns the input
/// gradient for the forward call `conv1d(x, bank)`.
pub fn conv1d_backward(x: &Tensor, bank: &mut ConvBank, grad_out: &Tensor) -> Result<Tensor> {
    let (l, m) = check_input(x, bank)?;
    let (k, d, _) = bank.dims();
    if grad_out.shape() != [l, d] {
        return Err(Error::shape(format!(
            "conv1d backward: upstream {:?}, expected [{l}, {d}]",
            grad_out.shape()
        )));
    }
    let g = grad_out.data();
    if let Some(b) = &mut bank.bias {
        let bg = b.grad.data_mut();
        for row in g.chunks_exact(d) {
            for (acc, v) in bg.iter_mut().zip(row) {
                *acc += v;
            }
        }
    }
    let mut grad_x = vec![0.0; l * m];
    for j in 0..k {
        let shift = k - 1 - j;
        if shift >= l {
            continue;
        }
        let n = l - shift;
        let g_slice = &g[shift * d..];
        let wg = &mut bank.weight.grad.data_mut()[j * d * m..(j + 1) * d * m];
        gemm::gemm_tn_acc(g_slice, &x.data()[..n * m], wg, n, d, m);
        gemm::gemm_acc(g_slice, bank.tap(j), &mut grad_x[..n * m], n, d, m);
    }
    Tensor::from_vec(&[l, m], grad_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_bank_gives_zero_output() {
        let bank = ConvBank::zeros(2, 4, 2, true);
        let out = conv1d(&Tensor::zeros(&[3, 2]), &bank, Padding::Causal).unwrap();
        assert_eq!(out, Tensor::zeros(&[3, 4]));
    }

    #[test]
    fn identity_kernel() {
        let mut bank = ConvBank::zeros(1, 3, 3, false);
        let w = bank.weight.value.data_mut();
        for i in 0..3 {
            w[i * 3 + i] = 1.0;
        }
        let x = Tensor::from_rows(&[vec![1.0, -2.0, 0.5], vec![3.0, 0.25, -1.0]]).unwrap();
        assert_eq!(conv1d(&x, &bank, Padding::Causal).unwrap(), x);
    }

    #[test]
    fn causal_sum_by_hand() {
        let mut bank = ConvBank::zeros(2, 1, 1, false);
        bank.weight.value.data_mut().copy_from_slice(&[1.0, 1.0]);
        let x = Tensor::from_vec(&[3, 1], vec![1.0, 2.0, 3.0]).unwrap();
        let out = conv1d(&x, &bank, Padding::Causal).unwrap();
        assert_eq!(out.data(), &[1.0, 3.0, 5.0]);
    }

    #[test]
    fn taps_are_ordered_oldest_first() {
        // W[0] reads x[t-1], W[1] reads x[t].
        let mut bank = ConvBank::zeros(2, 1, 1, false);
        bank.weight.value.data_mut().copy_from_slice(&[10.0, 1.0]);
        let x = Tensor::from_vec(&[3, 1], vec![1.0, 2.0, 3.0]).unwrap();
        let out = conv1d(&x, &bank, Padding::Causal).unwrap();
        assert_eq!(out.data(), &[1.0, 12.0, 23.0]);
    }

    #[test]
    fn kernel_wider_than_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bank = ConvBank::new(5, 2, 3, true, &mut rng);
        let x = Tensor::from_rows(&[vec![0.1, 0.2, 0.3], vec![0.4, 0.5, 0.6]]).unwrap();
        let out = conv1d(&x, &bank, Padding::Causal).unwrap();
        assert_eq!(out.shape(), &[2, 2]);
    }

    #[test]
    fn channel_mismatch_is_shape_error() {
        let bank = ConvBank::zeros(2, 3, 4, false);
        let err = conv1d(&Tensor::zeros(&[5, 3]), &bank, Padding::Causal).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }
}
