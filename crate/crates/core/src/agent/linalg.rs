//! Minimal dense f64 kernels for the Q-network, written in accumulate
//! (axpy) form so the compiler vectorizes them without reassociating
//! floating-point reductions. Results are bit-identical across runs.

/// out[m x n] += a[m x k] * b[k x n], all row-major. Rows of `a` are
/// processed in blocks of four to reuse each `b` row; zero entries of `a`
/// are skipped, which pays off on ReLU-sparse activations.
pub fn matmul_acc(a: &[f64], b: &[f64], out: &mut [f64], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), m * n);
    let mut i = 0;
    while i + 4 <= m {
        let (rows01, rows23) = out[i * n..(i + 4) * n].split_at_mut(2 * n);
        let (r0, r1) = rows01.split_at_mut(n);
        let (r2, r3) = rows23.split_at_mut(n);
        let a0 = &a[i * k..(i + 1) * k];
        let a1 = &a[(i + 1) * k..(i + 2) * k];
        let a2 = &a[(i + 2) * k..(i + 3) * k];
        let a3 = &a[(i + 3) * k..(i + 4) * k];
        for p in 0..k {
            let (v0, v1, v2, v3) = (a0[p], a1[p], a2[p], a3[p]);
            if v0 == 0.0 && v1 == 0.0 && v2 == 0.0 && v3 == 0.0 {
                continue;
            }
            let brow = &b[p * n..(p + 1) * n];
            for j in 0..n {
                let bv = brow[j];
                r0[j] += v0 * bv;
                r1[j] += v1 * bv;
                r2[j] += v2 * bv;
                r3[j] += v3 * bv;
            }
        }
        i += 4;
    }
    while i < m {
        let arow = &a[i * k..(i + 1) * k];
        let orow = &mut out[i * n..(i + 1) * n];
        for (p, &av) in arow.iter().enumerate() {
            if av == 0.0 {
                continue;
            }
            let brow = &b[p * n..(p + 1) * n];
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += av * bv;
            }
        }
        i += 1;
    }
}

/// out[k x n] += a^T[k x m] * b[m x n] for row-major a[m x k]: the weight-
/// gradient kernel. Iterates output rows so each stays cache-hot while the
/// `b` rows stream; zero coefficients (ReLU-dead units) are skipped.
pub fn matmul_at_b_acc(a: &[f64], b: &[f64], out: &mut [f64], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), m * n);
    debug_assert_eq!(out.len(), k * n);
    for p in 0..k {
        let orow = &mut out[p * n..(p + 1) * n];
        for i in 0..m {
            let av = a[i * k + p];
            if av == 0.0 {
                continue;
            }
            let brow = &b[i * n..(i + 1) * n];
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += av * bv;
            }
        }
    }
}

/// Broadcast-add a row vector to every row of a row-major matrix.
pub fn add_row_bias(out: &mut [f64], bias: &[f64]) {
    let n = bias.len();
    for row in out.chunks_exact_mut(n) {
        for (o, &b) in row.iter_mut().zip(bias) {
            *o += b;
        }
    }
}

/// Column sums of a row-major matrix (bias gradients).
pub fn col_sums_acc(a: &[f64], out: &mut [f64], n: usize) {
    for row in a.chunks_exact(n) {
        for (o, &v) in out.iter_mut().zip(row) {
            *o += v;
        }
    }
}
