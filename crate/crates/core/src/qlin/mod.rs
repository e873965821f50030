//! Finite-dimensional quantum linear algebra: labeled density operators,
//! Kraus channels, POVMs and the tensor bookkeeping they share.
//!
//! Every composite is an ordered list of [`Subsystem`] labels. Operations name
//! the factors they act on and permute explicitly, so callers never reorder
//! matrices by hand. Classical registers are ordinary factors tagged
//! [`Kind::Classical`] and kept diagonal.

mod channel;
mod eigen;
pub(crate) mod layout;
mod povm;
mod state;

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};
use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use channel::{reference_name, QuantumChannel};
pub use povm::Povm;
pub use state::DensityOperator;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Hermiticity and trace tolerance for states.
pub const STATE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted as numerically positive.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Completeness tolerance for Kraus sets and POVMs.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Default cap on the total dimension of any composite.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

static DIMENSION_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DIMENSION_CAP);

/// Current total-dimension cap.
pub fn dimension_cap() -> usize {
    DIMENSION_CAP.load(Ordering::Relaxed)
}

/// Replace the total-dimension cap, returning the previous value.
pub fn set_dimension_cap(cap: usize) -> usize {
    DIMENSION_CAP.swap(cap.max(1), Ordering::Relaxed)
}

pub(crate) fn check_cap(dim: usize) -> Result<()> {
    let cap = dimension_cap();
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Quantum,
    Classical,
}

/// A named tensor factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subsystem {
    pub name: String,
    pub dim: usize,
    #[serde(default)]
    pub kind: Kind,
}

impl Subsystem {
    pub fn quantum(name: impl Into<String>, dim: usize) -> Self {
        Self { name: name.into(), dim, kind: Kind::Quantum }
    }

    pub fn classical(name: impl Into<String>, dim: usize) -> Self {
        Self { name: name.into(), dim, kind: Kind::Classical }
    }

    pub fn is_classical(&self) -> bool {
        self.kind == Kind::Classical
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self { name: name.into(), ..self.clone() }
    }
}

pub(crate) fn validate_labels(labels: &[Subsystem]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if l.dim == 0 {
            return Err(Error::Dimension(format!("subsystem `{}` has dimension 0", l.name)));
        }
        if labels[..i].iter().any(|m| m.name == l.name) {
            return Err(Error::DuplicateLabel(l.name.clone()));
        }
    }
    Ok(())
}

pub(crate) fn total_dim(labels: &[Subsystem]) -> usize {
    labels.iter().map(|l| l.dim).product()
}

pub(crate) fn dims(labels: &[Subsystem]) -> Vec<usize> {
    labels.iter().map(|l| l.dim).collect()
}

/// Positions of `names` within `labels`, in the order requested.
pub(crate) fn positions<S: AsRef<str>>(labels: &[Subsystem], names: &[S]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(names.len());
    for n in names {
        let n = n.as_ref();
        let p = labels
            .iter()
            .position(|l| l.name == n)
            .ok_or_else(|| Error::UnknownLabel(n.to_string()))?;
        if out.contains(&p) {
            return Err(Error::DuplicateLabel(n.to_string()));
        }
        out.push(p);
    }
    Ok(out)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().sum()
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev = eigen::eigen(&hermitize(m), false).0;
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigen-decomposition of the Hermitian part of `m`; columns of the returned
/// matrix are the eigenvectors matching the eigenvalues.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (vals, vecs) = eigen::eigen(&hermitize(m), true);
    (vals, vecs.expect("eigenvectors requested"))
}

/// Apply `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let mut scaled = vecs.clone();
    for (j, v) in vals.iter().enumerate() {
        let s = f(*v);
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    scaled * vecs.adjoint()
}

/// Square root of a positive semidefinite matrix; small negative eigenvalues
/// are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_map(m, |x| x.max(0.0).sqrt())
}

/// Pseudo-inverse square root on the support (eigenvalues above `cutoff`).
pub fn psd_inv_sqrt(m: &CMatrix, cutoff: f64) -> CMatrix {
    hermitian_map(m, |x| if x > cutoff { 1.0 / x.sqrt() } else { 0.0 })
}

/// Schatten 1-norm of a Hermitian matrix.
/// `tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let mut t = c(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t
}

pub fn trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|x| x.abs()).sum()
}

/// Largest eigenvalue of a Hermitian matrix (operator norm for PSD input).
pub fn max_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).last().copied().unwrap_or(0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Computational basis projector |i><i| in dimension `n`.
pub fn basis_projector(n: usize, i: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, i)] = c(1.0, 0.0);
    m
}

pub fn basis_ket(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = c(1.0, 0.0);
    v
}

pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

/// The single-qubit Pauli matrices I, X, Y, Z.
pub fn paulis() -> [CMatrix; 4] {
    let z0 = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[one, z0, z0, one]),
        CMatrix::from_row_slice(2, 2, &[z0, one, one, z0]),
        CMatrix::from_row_slice(2, 2, &[z0, -i, i, z0]),
        CMatrix::from_row_slice(2, 2, &[one, z0, z0, -one]),
    ]
}

/// Left-multiply `m` (rows indexed by the layout `labels`) by `op ⊗ 1`, where
/// `op` maps the factors at `factors` (in that order) onto `out_labels`.
/// The output factors are placed where the first acted-on factor was; the
/// remaining factors keep their relative order.
pub(crate) fn left_apply(
    op: &CMatrix,
    labels: &[Subsystem],
    factors: &[usize],
    out_labels: &[Subsystem],
    m: &CMatrix,
) -> (Vec<Subsystem>, CMatrix) {
    let in_dims = dims(labels);
    let rest = layout::complement(labels.len(), factors);
    let insert_at = rest.iter().filter(|&&r| r < factors.iter().copied().min().unwrap_or(0)).count();

    let mut new_labels: Vec<Subsystem> = rest.iter().map(|&r| labels[r].clone()).collect();
    for (k, l) in out_labels.iter().enumerate() {
        new_labels.insert(insert_at + k, l.clone());
    }
    let new_dims = dims(&new_labels);
    let out_pos: Vec<usize> = (insert_at..insert_at + out_labels.len()).collect();
    let rest_pos = layout::complement(new_labels.len(), &out_pos);

    let mi = layout::offsets(&in_dims, factors);
    let mr = layout::offsets(&in_dims, &rest);
    let no = layout::offsets(&new_dims, &out_pos);
    let nr = layout::offsets(&new_dims, &rest_pos);
    debug_assert_eq!(op.ncols(), mi.len());
    debug_assert_eq!(op.nrows(), no.len());

    let rows_out: usize = new_dims.iter().product();
    let cols = m.ncols();
    let mut out = CMatrix::zeros(rows_out, cols);
    let src = m.as_slice();
    let rows_in = m.nrows();
    let dst = out.as_mut_slice();
    let mut gathered = vec![C64::new(0.0, 0.0); mi.len()];
    for col in 0..cols {
        let sbase = col * rows_in;
        let dbase = col * rows_out;
        for (r, &roff) in mr.iter().enumerate() {
            let mut any = false;
            for (a, &ioff) in mi.iter().enumerate() {
                let v = src[sbase + ioff + roff];
                any |= v.re != 0.0 || v.im != 0.0;
                gathered[a] = v;
            }
            if !any {
                continue;
            }
            for (cix, &ooff) in no.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (a, g) in gathered.iter().enumerate() {
                    acc += op[(cix, a)] * g;
                }
                dst[dbase + ooff + nr[r]] = acc;
            }
        }
    }
    (new_labels, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_apply_matches_kronecker_product() {
        let labels = vec![Subsystem::quantum("A", 2), Subsystem::quantum("B", 3)];
        let x = paulis()[1].clone();
        let m = CMatrix::from_fn(6, 6, |i, j| c((i * 6 + j) as f64, (i as f64) - (j as f64)));
        let (new_labels, got) = left_apply(&x, &labels, &[0], &[Subsystem::quantum("A", 2)], &m);
        let want = kron(&x, &identity(3)) * &m;
        assert_eq!(new_labels, labels);
        assert!(max_abs(&(got - want)) < 1e-12);

        // acting on the second factor
        let u = CMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, 0.5));
        let (_, got) = left_apply(&u, &labels, &[1], &[Subsystem::quantum("B", 3)], &m);
        let want = kron(&identity(2), &u) * &m;
        assert!(max_abs(&(got - want)) < 1e-12);
    }

    #[test]
    fn left_apply_can_change_output_dimension() {
        let labels = vec![Subsystem::quantum("A", 2), Subsystem::quantum("B", 2)];
        // isometry B -> (C, D) appending |0> on D
        let mut v = CMatrix::zeros(4, 2);
        v[(0, 0)] = c(1.0, 0.0);
        v[(2, 1)] = c(1.0, 0.0);
        let out = [Subsystem::quantum("C", 2), Subsystem::quantum("D", 2)];
        let m = identity(4);
        let (nl, got) = left_apply(&v, &labels, &[1], &out, &m);
        assert_eq!(nl.iter().map(|l| l.name.as_str()).collect::<Vec<_>>(), ["A", "C", "D"]);
        let want = kron(&identity(2), &v);
        assert!(max_abs(&(got - want)) < 1e-12);
    }

    #[test]
    fn psd_functions() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let s = psd_sqrt(&m);
        assert!(max_abs(&(&s * &s - &m)) < 1e-12);
        let is = psd_inv_sqrt(&m, 1e-12);
        assert!(max_abs(&(&is * &m * &is - identity(2))) < 1e-12);
        assert!((trace_norm(&m) - 4.0).abs() < 1e-12);
    }
}
