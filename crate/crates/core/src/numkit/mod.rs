//! Dense f64 kernels: tensors, causal temporal convolution, activations and
//! the backward counterpart of each forward op.

mod activation;
mod conv;
mod gemm;
pub mod gradcheck;
mod slot;
mod tape;
mod tensor;

pub use activation::{
    relu, sigmoid, sigmoid_grad_from_output, tanh, tanh_grad_from_output,
};
pub use conv::{conv1d, conv1d_backward, ConvBank, Padding};
pub use gemm::{gemm_acc, gemm_nt_acc, gemm_tn_acc};
pub use slot::GradSlot;
pub use tape::Tape;
pub use tensor::Tensor;
