use rand::Rng;

use super::Tensor;

/// A trainable value with its gradient accumulator.
#[derive(Clone, Debug, PartialEq)]
pub struct GradSlot {
    pub value: Tensor,
    pub grad: Tensor,
}

impl GradSlot {
    pub fn new(value: Tensor) -> Self {
        let grad = Tensor::zeros(value.shape());
        GradSlot { value, grad }
    }

    pub fn zeros(shape: &[usize]) -> Self {
        GradSlot::new(Tensor::zeros(shape))
    }

    /// Glorot-uniform initialization in ±sqrt(6 / (fan_in + fan_out)).
    pub fn glorot<R: Rng + ?Sized>(shape: &[usize], fan_in: usize, fan_out: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let mut value = Tensor::zeros(shape);
        for v in value.data_mut() {
            *v = rng.gen_range(-limit..=limit);
        }
        GradSlot::new(value)
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(0.0);
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }
}
