use super::GateBundle;
use crate::numkit::Tensor;
use crate::{Error, Result};

/// Cell and hidden states of one fo-pooling pass, both `L × d`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellTrace {
    pub c: Tensor,
    pub h: Tensor,
}

fn check(z: &Tensor, f: &Tensor, o: &Tensor) -> Result<(usize, usize)> {
    let (l, d) = z.dims2("fo_pool")?;
    if f.shape() != z.shape() || o.shape() != z.shape() {
        return Err(Error::shape(format!(
            "fo_pool: z {:?}, f {:?}, o {:?}",
            z.shape(),
            f.shape(),
            o.shape()
        )));
    }
    Ok((l, d))
}

/// `c_t = f_t ⊙ c_{t-1} + (1 - f_t) ⊙ z_t`, `h_t = o_t ⊙ c_t`, with `c_0 = 0`.
pub fn fo_pool_raw(z: &Tensor, f: &Tensor, o: &Tensor) -> Result<CellTrace> {
    let (l, d) = check(z, f, o)?;
    let mut c = Tensor::zeros(&[l, d]);
    let mut h = Tensor::zeros(&[l, d]);
    let mut prev = vec![0.0; d];
    for t in 0..l {
        let (zt, ft, ot) = (z.row(t), f.row(t), o.row(t));
        let ct = c.row_mut(t);
        for j in 0..d {
            ct[j] = ft[j] * prev[j] + (1.0 - ft[j]) * zt[j];
        }
        prev.copy_from_slice(ct);
        let ht = h.row_mut(t);
        for j in 0..d {
            ht[j] = ot[j] * prev[j];
        }
    }
    Ok(CellTrace { c, h })
}

/// fo-pooling of `z_source` under the forget and output gates of `gates`.
pub fn fo_pool(gates: &GateBundle, z_source: &Tensor) -> Result<CellTrace> {
    fo_pool_raw(z_source, &gates.f, &gates.o)
}

/// Gradients `(dz, df, do)` of a fo-pooling pass given `dh`.
pub fn fo_pool_backward(
    z: &Tensor,
    f: &Tensor,
    o: &Tensor,
    trace: &CellTrace,
    dh: &Tensor,
) -> Result<(Tensor, Tensor, Tensor)> {
    let (l, d) = check(z, f, o)?;
    if dh.shape() != z.shape() {
        return Err(Error::shape("fo_pool backward: upstream shape"));
    }
    let mut dz = Tensor::zeros(&[l, d]);
    let mut df = Tensor::zeros(&[l, d]);
    let mut d_o = Tensor::zeros(&[l, d]);
    let mut dc_next = vec![0.0; d];
    let zero = vec![0.0; d];
    for t in (0..l).rev() {
        let c_prev = if t > 0 { trace.c.row(t - 1) } else { &zero[..] };
        let (ct, zt, ft, ot, dht) = (trace.c.row(t), z.row(t), f.row(t), o.row(t), dh.row(t));
        let row = t * d..(t + 1) * d;
        let dzt = &mut dz.data_mut()[row.clone()];
        let dft = &mut df.data_mut()[row.clone()];
        let dot = &mut d_o.data_mut()[row];
        for j in 0..d {
            let dc = dc_next[j] + dht[j] * ot[j];
            dot[j] = dht[j] * ct[j];
            dft[j] = dc * (c_prev[j] - zt[j]);
            dzt[j] = dc * (1.0 - ft[j]);
            dc_next[j] = dc * ft[j];
        }
    }
    Ok((dz, df, d_o))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> Tensor {
        Tensor::from_vec(&[v.len(), 1], v.to_vec()).unwrap()
    }

    #[test]
    fn open_forget_gate_copies_candidate() {
        let z = col(&[0.3, -0.7, 0.9]);
        let tr = fo_pool_raw(&z, &col(&[0.0; 3]), &col(&[1.0; 3])).unwrap();
        assert_eq!(tr.c, z);
    }

    #[test]
    fn closed_forget_gate_carries_zero_state() {
        let z = col(&[0.3, -0.7, 0.9]);
        let tr = fo_pool_raw(&z, &col(&[1.0; 3]), &col(&[1.0; 3])).unwrap();
        assert!(tr.c.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hand_recurrence() {
        let tr = fo_pool_raw(&col(&[1.0, -1.0]), &col(&[0.5, 0.5]), &col(&[1.0, 1.0])).unwrap();
        assert_eq!(tr.c.data(), &[0.5, -0.25]);
        assert_eq!(tr.h.data(), &[0.5, -0.25]);
    }
}
