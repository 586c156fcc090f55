//! Inner loops. Written as element-wise updates or fixed-lane reductions so
//! the compiler can vectorize them without reassociating floating point.

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Dot product with four independent accumulators.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `out += x · W` for row-major `W` of shape `[x.len(), out.len()]`.
#[inline]
pub fn vec_mat_acc(x: &[f64], w: &[f64], out: &mut [f64]) {
    let cols = out.len();
    debug_assert_eq!(w.len(), x.len() * cols);
    for (xi, row) in x.iter().zip(w.chunks_exact(cols)) {
        if *xi != 0.0 {
            axpy(*xi, row, out);
        }
    }
}

/// `dx += W · dy` for row-major `W` of shape `[dx.len(), dy.len()]`.
#[inline]
pub fn mat_vec_acc(w: &[f64], dy: &[f64], dx: &mut [f64]) {
    let cols = dy.len();
    debug_assert_eq!(w.len(), dx.len() * cols);
    for (dxi, row) in dx.iter_mut().zip(w.chunks_exact(cols)) {
        *dxi += dot(row, dy);
    }
}

/// `dW += x ⊗ dy`
#[inline]
pub fn outer_acc(x: &[f64], dy: &[f64], dw: &mut [f64]) {
    let cols = dy.len();
    debug_assert_eq!(dw.len(), x.len() * cols);
    for (xi, row) in x.iter().zip(dw.chunks_exact_mut(cols)) {
        if *xi != 0.0 {
            axpy(*xi, dy, row);
        }
    }
}
