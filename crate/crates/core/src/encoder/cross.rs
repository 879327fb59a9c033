use super::{
    alignment, compute_gates, fo_pool_backward, fo_pool_raw, CellTrace, GateBanks, GateBundle,
    GateGrads,
};
use crate::numkit::Tensor;
use crate::Result;

/// One side of a crossed pair: the trace under its own gates, the trace of
/// its own candidate under the partner's aligned gates, and their product.
#[derive(Clone, Debug, PartialEq)]
pub struct CtrnOutput {
    pub self_trace: CellTrace,
    pub cross_trace: CellTrace,
    pub fused: Tensor,
}

/// Everything the pair cell's backward pass needs.
#[derive(Clone, Debug)]
pub struct PairState {
    pub gates_q: GateBundle,
    pub gates_a: GateBundle,
    /// Zero-based answer step aligned to each question step.
    pub align_q: Vec<usize>,
    /// Zero-based question step aligned to each answer step.
    pub align_a: Vec<usize>,
    pub q: CtrnOutput,
    pub a: CtrnOutput,
}

fn gather_rows(src: &Tensor, idx: &[usize]) -> Tensor {
    let w = src.row_len();
    let mut out = Tensor::zeros(&[idx.len(), w]);
    for (t, &s) in idx.iter().enumerate() {
        out.row_mut(t).copy_from_slice(src.row(s));
    }
    out
}

fn scatter_add_rows(dst: &mut Tensor, src: &Tensor, idx: &[usize]) {
    for (t, &s) in idx.iter().enumerate() {
        for (d, v) in dst.row_mut(s).iter_mut().zip(src.row(t)) {
            *d += v;
        }
    }
}

fn cross_side(own: &GateBundle, partner: &GateBundle, align: &[usize]) -> Result<CtrnOutput> {
    let self_trace = fo_pool_raw(&own.z, &own.f, &own.o)?;
    let f_cross = gather_rows(&partner.f, align);
    let o_cross = gather_rows(&partner.o, align);
    let cross_trace = fo_pool_raw(&own.z, &f_cross, &o_cross)?;
    let fused = self_trace.h.hadamard(&cross_trace.h)?;
    Ok(CtrnOutput {
        self_trace,
        cross_trace,
        fused,
    })
}

/// Runs both crossed cells on precomputed gates.
pub fn ctrn_cells(gates_q: GateBundle, gates_a: GateBundle) -> Result<PairState> {
    let align_q = alignment(gates_q.len(), gates_a.len())?;
    let align_a = alignment(gates_a.len(), gates_q.len())?;
    let q = cross_side(&gates_q, &gates_a, &align_q)?;
    let a = cross_side(&gates_a, &gates_q, &align_a)?;
    Ok(PairState {
        gates_q,
        gates_a,
        align_q,
        align_a,
        q,
        a,
    })
}

/// Gates both inputs with their banks and runs the crossed cells.
pub fn ctrn_pair(
    x_q: &Tensor,
    x_a: &Tensor,
    banks_q: &GateBanks,
    banks_a: &GateBanks,
) -> Result<(CtrnOutput, CtrnOutput)> {
    let state = ctrn_cells(compute_gates(x_q, banks_q)?, compute_gates(x_a, banks_a)?)?;
    Ok((state.q, state.a))
}

fn cross_side_backward(
    own: &GateBundle,
    partner: &GateBundle,
    align: &[usize],
    out: &CtrnOutput,
    d_fused: &Tensor,
    own_grads: &mut GateGrads,
    partner_grads: &mut GateGrads,
) -> Result<()> {
    let dh_self = d_fused.hadamard(&out.cross_trace.h)?;
    let dh_cross = d_fused.hadamard(&out.self_trace.h)?;

    let (dz, df, d_o) = fo_pool_backward(&own.z, &own.f, &own.o, &out.self_trace, &dh_self)?;
    own_grads.z.add_assign(&dz)?;
    own_grads.f.add_assign(&df)?;
    own_grads.o.add_assign(&d_o)?;

    let f_cross = gather_rows(&partner.f, align);
    let o_cross = gather_rows(&partner.o, align);
    let (dz, df, d_o) = fo_pool_backward(&own.z, &f_cross, &o_cross, &out.cross_trace, &dh_cross)?;
    own_grads.z.add_assign(&dz)?;
    scatter_add_rows(&mut partner_grads.f, &df, align);
    scatter_add_rows(&mut partner_grads.o, &d_o, align);
    Ok(())
}

/// Gradients with respect to both gate bundles given the fused-state
/// gradients of each side.
pub fn ctrn_cells_backward(
    state: &PairState,
    d_fused_q: &Tensor,
    d_fused_a: &Tensor,
) -> Result<(GateGrads, GateGrads)> {
    let mut gq = GateGrads::zeros(state.gates_q.len(), state.gates_q.width());
    let mut ga = GateGrads::zeros(state.gates_a.len(), state.gates_a.width());
    cross_side_backward(
        &state.gates_q,
        &state.gates_a,
        &state.align_q,
        &state.q,
        d_fused_q,
        &mut gq,
        &mut ga,
    )?;
    cross_side_backward(
        &state.gates_a,
        &state.gates_q,
        &state.align_a,
        &state.a,
        d_fused_a,
        &mut ga,
        &mut gq,
    )?;
    Ok((gq, ga))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::fo_pool;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_x(rng: &mut ChaCha8Rng, l: usize, m: usize) -> Tensor {
        let mut x = Tensor::zeros(&[l, m]);
        for v in x.data_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        x
    }

    #[test]
    fn identical_inputs_square_the_qrnn_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let banks = GateBanks::new(2, 4, 3, true, &mut rng);
        let x = random_x(&mut rng, 6, 3);
        let (q, a) = ctrn_pair(&x, &x, &banks, &banks).unwrap();
        let gates = compute_gates(&x, &banks).unwrap();
        let h = fo_pool(&gates, &gates.z).unwrap().h;
        let sq = h.hadamard(&h).unwrap();
        for side in [&q, &a] {
            for (u, v) in side.fused.data().iter().zip(sq.data()) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn open_cross_gates_reduce_to_candidate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let banks = GateBanks::new(2, 3, 2, false, &mut rng);
        let gates_q = compute_gates(&random_x(&mut rng, 4, 2), &banks).unwrap();
        let la = 7;
        let gates_a = GateBundle {
            z: Tensor::zeros(&[la, 3]),
            f: Tensor::zeros(&[la, 3]),
            o: Tensor::zeros(&[la, 3]).map(|_| 1.0),
        };
        let state = ctrn_cells(gates_q.clone(), gates_a).unwrap();
        assert_eq!(state.q.cross_trace.h, gates_q.z);
        let want = state.q.self_trace.h.hadamard(&gates_q.z).unwrap();
        assert_eq!(state.q.fused, want);
    }

    #[test]
    fn fused_values_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let banks = GateBanks::new(3, 5, 4, true, &mut rng);
        let xq = random_x(&mut rng, 3, 4).scale(20.0).unwrap();
        let xa = random_x(&mut rng, 9, 4).scale(20.0).unwrap();
        let (q, a) = ctrn_pair(&xq, &xa, &banks, &banks).unwrap();
        for side in [q, a] {
            for t in [&side.self_trace.c, &side.self_trace.h, &side.cross_trace.c, &side.fused] {
                assert!(t.data().iter().all(|v| v.abs() <= 1.0));
            }
        }
    }
}
