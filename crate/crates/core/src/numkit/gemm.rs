//! Row-major accumulate-into kernels. Loop orders keep the innermost loop a
//! contiguous axpy so the compiler can vectorize it; accumulation order is
//! fixed, so results are bit-reproducible.

/// `out[n×q] += a[n×p] · b[p×q]`
pub fn gemm_acc(a: &[f64], b: &[f64], out: &mut [f64], n: usize, p: usize, q: usize) {
    debug_assert_eq!(a.len(), n * p);
    debug_assert_eq!(b.len(), p * q);
    debug_assert_eq!(out.len(), n * q);
    for i in 0..n {
        let out_row = &mut out[i * q..(i + 1) * q];
        for (k, &aik) in a[i * p..(i + 1) * p].iter().enumerate() {
            if aik == 0.0 {
                continue;
            }
            let b_row = &b[k * q..(k + 1) * q];
            for (o, &bv) in out_row.iter_mut().zip(b_row) {
                *o += aik * bv;
            }
        }
    }
}

/// `out[p×q] += a[n×p]ᵀ · b[n×q]`
pub fn gemm_tn_acc(a: &[f64], b: &[f64], out: &mut [f64], n: usize, p: usize, q: usize) {
    debug_assert_eq!(a.len(), n * p);
    debug_assert_eq!(b.len(), n * q);
    debug_assert_eq!(out.len(), p * q);
    for r in 0..n {
        let b_row = &b[r * q..(r + 1) * q];
        for (k, &ark) in a[r * p..(r + 1) * p].iter().enumerate() {
            if ark == 0.0 {
                continue;
            }
            let out_row = &mut out[k * q..(k + 1) * q];
            for (o, &bv) in out_row.iter_mut().zip(b_row) {
                *o += ark * bv;
            }
        }
    }
}

/// `out[n×q] += a[n×p] · b[q×p]ᵀ`
pub fn gemm_nt_acc(a: &[f64], b: &[f64], out: &mut [f64], n: usize, p: usize, q: usize) {
    debug_assert_eq!(a.len(), n * p);
    debug_assert_eq!(b.len(), q * p);
    debug_assert_eq!(out.len(), n * q);
    for i in 0..n {
        let a_row = &a[i * p..(i + 1) * p];
        for j in 0..q {
            let b_row = &b[j * p..(j + 1) * p];
            out[i * q + j] += a_row.iter().zip(b_row).map(|(x, y)| x * y).sum::<f64>();
        }
    }
}
