//! Index arithmetic for matrices acting on an ordered tensor product of
//! factors. Factor 0 is the most significant digit of a flat index, which is
//! the ordering produced by the Kronecker product.

/// Row-major strides for `dims`.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Flat offsets of every multi-index over `factors` (enumerated row-major in
/// the order given), embedded in the layout `dims`.
pub(crate) fn offsets(dims: &[usize], factors: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(out.len() * dims[f]);
        for &base in &out {
            for i in 0..dims[f] {
                next.push(base + i * st[f]);
            }
        }
        out = next;
    }
    out
}

/// The factor positions of `dims` not listed in `factors`, in layout order.
pub(crate) fn complement(n: usize, factors: &[usize]) -> Vec<usize> {
    (0..n).filter(|k| !factors.contains(k)).collect()
}
