//! Saturating activations. Outputs are clamped one ulp inside the open
//! interval so the range invariants hold even where f64 rounding would land
//! exactly on a bound.

/// Largest f64 strictly below 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    let y = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    y.clamp(f64::MIN_POSITIVE, BELOW_ONE)
}

#[inline]
pub fn tanh(x: f64) -> f64 {
    x.tanh().clamp(-BELOW_ONE, BELOW_ONE)
}

/// σ′ written in terms of the forward output.
#[inline]
pub fn sigmoid_grad_from_output(y: f64) -> f64 {
    y * (1.0 - y)
}

#[inline]
pub fn tanh_grad_from_output(y: f64) -> f64 {
    1.0 - y * y
}

#[inline]
pub fn relu(x: f64) -> f64 {
    x.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(tanh(0.0), 0.0);
        assert!((sigmoid(3f64.ln()) - 0.75).abs() < 1e-15);
        assert_eq!(sigmoid_grad_from_output(sigmoid(0.0)), 0.25);
        assert_eq!(tanh_grad_from_output(tanh(0.0)), 1.0);
    }

    #[test]
    fn saturation_stays_open() {
        for x in [-1e4, -800.0, -40.0, 40.0, 800.0, 1e4] {
            let s = sigmoid(x);
            assert!(s > 0.0 && s < 1.0, "sigmoid({x}) = {s}");
            let t = tanh(x);
            assert!(t > -1.0 && t < 1.0, "tanh({x}) = {t}");
        }
    }
}
