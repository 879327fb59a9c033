use crate::numkit::Tensor;
use crate::{Error, Result};

/// Elementwise average of the rows of `trace` whose mask entry is true.
pub fn mean_pool(trace: &Tensor, mask: &[bool]) -> Result<Vec<f64>> {
    let (l, d) = trace.dims2("mean_pool")?;
    if mask.len() != l {
        return Err(Error::shape(format!("mean_pool: mask of {} for {l} steps", mask.len())));
    }
    let count = mask.iter().filter(|&&m| m).count();
    if count == 0 {
        return Err(Error::EmptySequence("every step is masked".into()));
    }
    let mut out = vec![0.0; d];
    for (t, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        for (o, v) in out.iter_mut().zip(trace.row(t)) {
            *o += v;
        }
    }
    let n = count as f64;
    out.iter_mut().for_each(|v| *v /= n);
    Ok(out)
}

/// Spreads `grad` evenly over the unmasked steps.
pub fn mean_pool_backward(grad: &[f64], mask: &[bool]) -> Result<Tensor> {
    let count = mask.iter().filter(|&&m| m).count();
    if count == 0 {
        return Err(Error::EmptySequence("every step is masked".into()));
    }
    let d = grad.len();
    let mut out = Tensor::zeros(&[mask.len(), d]);
    let n = count as f64;
    for (t, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        for (o, g) in out.row_mut(t).iter_mut().zip(grad) {
            *o = g / n;
        }
    }
    Ok(out)
}
