use crate::model::Model;
use crate::numkit::{GradSlot, Tensor};
use crate::{Error, Result};

/// Adam moments keyed by parameter name, created on first use.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: u64,
    moments: Vec<(String, Tensor, Tensor)>,
}

impl AdamState {
    pub fn new(lr: f64) -> Self {
        AdamState {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            moments: Vec::new(),
        }
    }

    /// Number of updates applied so far.
    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn moments(&self, name: &str) -> Option<(&Tensor, &Tensor)> {
        self.moments
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, m, v)| (m, v))
    }

    /// One bias-corrected update over every trainable parameter of `model`,
    /// using the gradients currently accumulated in it.
    pub fn step(&mut self, model: &mut Model) -> Result<()> {
        let slots = model
            .params_mut()
            .into_iter()
            .map(|(n, _, s)| (n, s))
            .collect();
        self.step_slots(slots)
    }

    /// Same update over explicit named slots. Every gradient is checked
    /// before anything is modified, so a non-finite gradient leaves both the
    /// parameters and the state untouched.
    pub fn step_slots(&mut self, mut slots: Vec<(String, &mut GradSlot)>) -> Result<()> {
        for (name, slot) in &slots {
            if !slot.grad.is_finite() {
                return Err(Error::NonFinite(format!("gradient of `{name}`")));
            }
        }
        if self.moments.is_empty() {
            self.moments = slots
                .iter()
                .map(|(n, s)| {
                    let z = Tensor::zeros(s.value.shape());
                    (n.clone(), z.clone(), z)
                })
                .collect();
        }
        if self.moments.len() != slots.len()
            || self
                .moments
                .iter()
                .zip(&slots)
                .any(|((n, m, _), (sn, s))| n != sn || m.shape() != s.value.shape())
        {
            return Err(Error::State("optimizer state does not match the parameter set".into()));
        }

        self.t += 1;
        let t = self.t as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for ((_, m, v), (_, slot)) in self.moments.iter_mut().zip(slots.iter_mut()) {
            let GradSlot { value, grad } = &mut **slot;
            let (md, vd) = (m.data_mut(), v.data_mut());
            for (i, (p, &g)) in value.data_mut().iter_mut().zip(grad.data()).enumerate() {
                md[i] = self.beta1 * md[i] + (1.0 - self.beta1) * g;
                vd[i] = self.beta2 * vd[i] + (1.0 - self.beta2) * g * g;
                let m_hat = md[i] / c1;
                let v_hat = vd[i] / c2;
                *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scalar(v: f64, g: f64) -> GradSlot {
        let mut s = GradSlot::new(Tensor::vector(vec![v]).unwrap());
        s.grad.data_mut()[0] = g;
        s
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut s = scalar(0.7, 0.0);
        let mut adam = AdamState::new(1e-3);
        adam.step_slots(vec![("x".into(), &mut s)]).unwrap();
        assert_eq!(s.value.data(), &[0.7]);
        assert_eq!(adam.steps(), 1);
    }

    #[test]
    fn first_step_has_closed_form_size() {
        let mut s = scalar(0.0, 1.0);
        let mut adam = AdamState::new(1e-3);
        adam.step_slots(vec![("x".into(), &mut s)]).unwrap();
        let expected = -1e-3 * 1.0 / (1.0 + 1e-8);
        assert!((s.value.data()[0] - expected).abs() < 1e-18);
    }

    #[test]
    fn non_finite_gradient_names_parameter_and_aborts() {
        let mut a = scalar(1.0, 1.0);
        let mut b = scalar(2.0, f64::NAN);
        let mut adam = AdamState::new(1e-3);
        let err = adam
            .step_slots(vec![("alpha".into(), &mut a), ("beta".into(), &mut b)])
            .unwrap_err();
        assert!(err.to_string().contains("beta"), "{err}");
        assert_eq!(a.value.data(), &[1.0]);
        assert_eq!(adam.steps(), 0);
    }

    #[test]
    fn second_moment_stays_non_negative() {
        let mut s = scalar(0.0, -3.0);
        let mut adam = AdamState::new(1e-2);
        for g in [-3.0, 2.0, -0.5] {
            s.grad.data_mut()[0] = g;
            adam.step_slots(vec![("x".into(), &mut s)]).unwrap();
        }
        assert!(adam.moments("x").unwrap().1.data()[0] >= 0.0);
    }

    proptest! {
        #[test]
        fn step_decreases_quadratic(x0 in -10.0f64..10.0, lr in 1e-5f64..1e-3) {
            prop_assume!(x0.abs() > 1e-2);
            let f = |x: f64| 0.5 * x * x;
            let mut s = scalar(x0, x0);
            AdamState::new(lr).step_slots(vec![("x".into(), &mut s)]).unwrap();
            prop_assert!(f(s.value.data()[0]) < f(x0));
        }
    }
}
