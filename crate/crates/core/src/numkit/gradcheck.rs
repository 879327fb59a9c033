//! Central finite differences for checking hand-written backward passes.
//! Only forward evaluations are used here, so the check is independent of
//! the backward code it validates.

pub const DEFAULT_STEP: f64 = 1e-5;
pub const DEFAULT_TOLERANCE: f64 = 1e-4;

/// `|a - n| / max(|a|, |n|, 1e-8)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Central-difference gradient of `loss` at `values`. `values` is perturbed
/// in place one coordinate at a time and restored before returning.
pub fn numeric_gradient(
    values: &mut [f64],
    step: f64,
    mut loss: impl FnMut(&[f64]) -> f64,
) -> Vec<f64> {
    let mut grad = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        let orig = values[i];
        values[i] = orig + step;
        let plus = loss(values);
        values[i] = orig - step;
        let minus = loss(values);
        values[i] = orig;
        grad.push((plus - minus) / (2.0 * step));
    }
    grad
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradReport {
    pub max_rel_error: f64,
    pub worst_index: usize,
    pub checked: usize,
}

impl GradReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_error < tolerance
    }

    pub fn merge(self, other: GradReport) -> GradReport {
        let checked = self.checked + other.checked;
        if other.max_rel_error > self.max_rel_error {
            GradReport { checked, ..other }
        } else {
            GradReport { checked, ..self }
        }
    }
}

impl Default for GradReport {
    fn default() -> Self {
        GradReport {
            max_rel_error: 0.0,
            worst_index: 0,
            checked: 0,
        }
    }
}

pub fn compare(analytic: &[f64], numeric: &[f64]) -> GradReport {
    assert_eq!(analytic.len(), numeric.len(), "gradient length mismatch");
    let mut report = GradReport {
        checked: analytic.len(),
        ..GradReport::default()
    };
    for (i, (&a, &n)) in analytic.iter().zip(numeric).enumerate() {
        let e = relative_error(a, n);
        if e > report.max_rel_error {
            report.max_rel_error = e;
            report.worst_index = i;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_a_cubic() {
        let mut x = vec![0.5, -1.25, 2.0];
        let g = numeric_gradient(&mut x, DEFAULT_STEP, |v| v.iter().map(|t| t * t * t).sum());
        let exact: Vec<f64> = x.iter().map(|t| 3.0 * t * t).collect();
        assert!(compare(&exact, &g).passes(1e-8));
        assert_eq!(x, vec![0.5, -1.25, 2.0]);
    }

    #[test]
    fn relative_error_floor() {
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        assert!((relative_error(1e-9, 0.0) - 0.1).abs() < 1e-12);
    }
}
