//! Hermitian eigensolver front end.
//!
//! nalgebra's complex tridiagonalization can produce NaN on very sparse,
//! highly degenerate inputs (typical of Choi marginals). The matrix is first
//! split into independent blocks of its sparsity graph; each block goes to
//! the real solver when it has no imaginary part, otherwise to the complex
//! solver with the real `2n` embedding as a fallback.

use nalgebra::DMatrix;

use super::{c, CMatrix};

fn components(m: &CMatrix) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for j in 0..n {
        for i in 0..j {
            if m[(i, j)].norm() > 0.0 || m[(j, i)].norm() > 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

fn real_embedding(m: &CMatrix) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

fn block_eigen(m: &CMatrix, vectors: bool) -> (Vec<f64>, Option<CMatrix>) {
    let n = m.nrows();
    if n == 1 {
        return (vec![m[(0, 0)].re], vectors.then(|| CMatrix::from_element(1, 1, c(1.0, 0.0))));
    }
    if is_real(m) {
        let r = m.map(|z| z.re);
        if !vectors {
            return (r.symmetric_eigenvalues().iter().copied().collect(), None);
        }
        let e = r.symmetric_eigen();
        return (e.eigenvalues.iter().copied().collect(), Some(e.eigenvectors.map(|x| c(x, 0.0))));
    }
    if !vectors {
        let ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        if ev.iter().all(|x| x.is_finite()) {
            return (ev, None);
        }
    } else {
        let e = m.clone().symmetric_eigen();
        if e.eigenvalues.iter().all(|x| x.is_finite()) && e.eigenvectors.iter().all(|z| z.is_finite()) {
            return (e.eigenvalues.iter().copied().collect(), Some(e.eigenvectors));
        }
    }
    embedded_eigen(m)
}

/// Each eigenvalue of the embedding appears twice; `u + iv` recovers a
/// complex eigenvector from a real one `[u; v]`.
fn embedded_eigen(m: &CMatrix) -> (Vec<f64>, Option<CMatrix>) {
    let n = m.nrows();
    let e = real_embedding(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let mut vals = Vec::with_capacity(n);
    let mut vecs: Vec<nalgebra::DVector<super::C64>> = Vec::with_capacity(n);
    for k in order {
        if vecs.len() == n {
            break;
        }
        let mut v = nalgebra::DVector::from_fn(n, |i, _| c(e.eigenvectors[(i, k)], e.eigenvectors[(i + n, k)]));
        for w in &vecs {
            let p = w.dotc(&v);
            v -= w * p;
        }
        let norm = v.norm();
        if norm > 0.5 {
            vecs.push(v.unscale(norm));
            vals.push(e.eigenvalues[k]);
        }
    }
    (vals, Some(CMatrix::from_columns(&vecs)))
}

pub(super) fn eigen(m: &CMatrix, vectors: bool) -> (Vec<f64>, Option<CMatrix>) {
    let n = m.nrows();
    let groups = components(m);
    if groups.len() == 1 {
        return block_eigen(m, vectors);
    }
    let mut vals = Vec::with_capacity(n);
    let mut vecs = vectors.then(|| CMatrix::zeros(n, n));
    for g in &groups {
        let block = CMatrix::from_fn(g.len(), g.len(), |i, j| m[(g[i], g[j])]);
        let (bv, bvec) = block_eigen(&block, vectors);
        if let (Some(out), Some(bvec)) = (vecs.as_mut(), bvec) {
            for (col, _) in bv.iter().enumerate() {
                let dst = vals.len() + col;
                for (r, &gi) in g.iter().enumerate() {
                    out[(gi, dst)] = bvec[(r, col)];
                }
            }
        }
        vals.extend(bv);
    }
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::max_abs;

    fn check(m: &CMatrix) {
        let (vals, vecs) = eigen(m, true);
        let v = vecs.unwrap();
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|x| c(*x, 0.0))));
        assert!(max_abs(&(&v * d * v.adjoint() - m)) < 1e-10);
        assert!(max_abs(&(v.adjoint() * &v - CMatrix::identity(m.nrows(), m.nrows()))) < 1e-10);
    }

    #[test]
    fn block_split_reconstructs() {
        let mut m = CMatrix::zeros(5, 5);
        m[(0, 3)] = c(0.0, 0.5);
        m[(3, 0)] = c(0.0, -0.5);
        m[(1, 1)] = c(0.2, 0.0);
        m[(2, 4)] = c(0.3, 0.0);
        m[(4, 2)] = c(0.3, 0.0);
        check(&m);
    }

    #[test]
    fn embedding_matches_complex_solver() {
        let m = CMatrix::from_fn(3, 3, |i, j| c((i + j) as f64, i as f64 - j as f64));
        let (mut a, _) = embedded_eigen(&m);
        let mut b: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
        let (_, v) = embedded_eigen(&m);
        let v = v.unwrap();
        assert!(max_abs(&(v.adjoint() * &v - CMatrix::identity(3, 3))) < 1e-10);
    }
}
