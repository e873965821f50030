use super::layout::{complement, offsets};
use super::{
    c, check_cap, dims, hermitian_eigenvalues, max_abs, positions, total_dim, trace, validate_labels,
    CMatrix, CVector, Kind, Subsystem, C64, POSITIVITY_TOL, STATE_TOL,
};
use crate::error::{Error, Result};

/// A density operator on an ordered tensor product of labeled factors.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    labels: Vec<Subsystem>,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validating constructor: Hermitian, unit trace, numerically positive and
    /// diagonal on every classical factor.
    pub fn new(labels: Vec<Subsystem>, matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_parts(labels, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks labels and shape only.
    pub(crate) fn from_parts(labels: Vec<Subsystem>, matrix: CMatrix) -> Result<Self> {
        validate_labels(&labels)?;
        let d = total_dim(&labels);
        check_cap(d)?;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension(format!(
                "matrix is {}x{} but labels require {d}x{d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { labels, matrix })
    }

    pub fn pure(labels: Vec<Subsystem>, ket: &CVector) -> Result<Self> {
        let norm = ket.norm();
        if norm < 1e-12 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = ket.unscale(norm);
        Self::from_parts(labels, &v * v.adjoint())
    }

    /// |i><i| on a single factor.
    pub fn basis(label: Subsystem, i: usize) -> Result<Self> {
        if i >= label.dim {
            return Err(Error::Dimension(format!("basis index {i} out of range for `{}`", label.name)));
        }
        let d = label.dim;
        Self::from_parts(vec![label], super::basis_projector(d, i))
    }

    pub fn maximally_mixed(labels: Vec<Subsystem>) -> Result<Self> {
        let d = total_dim(&labels);
        Self::from_parts(labels, CMatrix::identity(d, d).unscale(d as f64))
    }

    /// A diagonal state on a classical register carrying `dist`.
    pub fn embed_classical(dist: &[f64], label: Subsystem) -> Result<Self> {
        check_distribution(dist)?;
        if dist.len() != label.dim {
            return Err(Error::Dimension(format!(
                "distribution has {} entries, `{}` has dimension {}",
                dist.len(),
                label.name,
                label.dim
            )));
        }
        let label = Subsystem { kind: Kind::Classical, ..label };
        let mut m = CMatrix::zeros(label.dim, label.dim);
        for (i, p) in dist.iter().enumerate() {
            m[(i, i)] = c(*p, 0.0);
        }
        Self::from_parts(vec![label], m)
    }

    /// `Σ_x p(x) |x><x| ⊗ ρ_x` over the joint alphabet of `registers`
    /// (row-major). `blocks` yields the probability and conditional state of
    /// each joint symbol; zero-probability symbols may return `None`.
    pub fn classical_quantum<F>(registers: &[Subsystem], quantum: &[Subsystem], mut blocks: F) -> Result<Self>
    where
        F: FnMut(usize) -> Result<Option<(f64, CMatrix)>>,
    {
        let mut labels: Vec<Subsystem> = registers
            .iter()
            .map(|r| Subsystem { kind: Kind::Classical, ..r.clone() })
            .collect();
        labels.extend(quantum.iter().cloned());
        validate_labels(&labels)?;
        let nc = total_dim(registers);
        let dq = total_dim(quantum);
        check_cap(nc * dq)?;
        let mut m = CMatrix::zeros(nc * dq, nc * dq);
        for x in 0..nc {
            if let Some((p, block)) = blocks(x)? {
                if block.nrows() != dq || block.ncols() != dq {
                    return Err(Error::Dimension(format!("conditional state {x} has wrong dimension")));
                }
                if p != 0.0 {
                    m.view_mut((x * dq, x * dq), (dq, dq)).copy_from(&block.scale(p));
                }
            }
        }
        Self::from_parts(labels, m)
    }

    pub fn labels(&self) -> &[Subsystem] {
        &self.labels
    }

    pub fn names(&self) -> Vec<&str> {
        self.labels.iter().map(|l| l.name.as_str()).collect()
    }

    pub fn label(&self, name: &str) -> Option<&Subsystem> {
        self.labels.iter().find(|l| l.name == name)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Check every density-operator invariant.
    pub fn validate(&self) -> Result<()> {
        let herm = max_abs(&(&self.matrix - self.matrix.adjoint()));
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (residual {herm:.3e})")));
        }
        let tr = trace(&self.matrix);
        if (tr - c(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {:.12}", tr.re)));
        }
        let min = hermitian_eigenvalues(&self.matrix).first().copied().unwrap_or(0.0);
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        let off = self.classical_offdiagonal();
        if off > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "classical factor carries coherences (max off-diagonal {off:.3e})"
            )));
        }
        Ok(())
    }

    /// Largest matrix element connecting different values of the classical
    /// factors.
    pub fn classical_offdiagonal(&self) -> f64 {
        let cl: Vec<usize> = (0..self.labels.len()).filter(|&k| self.labels[k].is_classical()).collect();
        if cl.is_empty() {
            return 0.0;
        }
        let d = dims(&self.labels);
        let q = complement(d.len(), &cl);
        let mc = offsets(&d, &cl);
        let mq = offsets(&d, &q);
        let mut worst = 0.0f64;
        for (a, &oa) in mc.iter().enumerate() {
            for (b, &ob) in mc.iter().enumerate() {
                if a == b {
                    continue;
                }
                for &i in &mq {
                    for &j in &mq {
                        worst = worst.max(self.matrix[(oa + i, ob + j)].norm());
                    }
                }
            }
        }
        worst
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        validate_labels(&labels)?;
        check_cap(total_dim(&labels))?;
        Ok(Self { labels, matrix: self.matrix.kronecker(&other.matrix) })
    }

    /// Reduced state on `keep`, with factors in the order given.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        let kp = positions(&self.labels, keep)?;
        let d = dims(&self.labels);
        let tr = complement(d.len(), &kp);
        let mk = offsets(&d, &kp);
        let mt = offsets(&d, &tr);
        let n = mk.len();
        let mut out = CMatrix::zeros(n, n);
        let src = self.matrix.as_slice();
        let rows = self.matrix.nrows();
        for j in 0..n {
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for &t in &mt {
                    acc += src[(mk[j] + t) * rows + mk[i] + t];
                }
                out[(i, j)] = acc;
            }
        }
        let labels = kp.iter().map(|&k| self.labels[k].clone()).collect();
        Ok(Self { labels, matrix: out })
    }

    /// The same state with factors listed in `order` (a permutation of the
    /// current names).
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        if order.len() != self.labels.len() {
            return Err(Error::Dimension(format!(
                "reorder needs all {} labels, got {}",
                self.labels.len(),
                order.len()
            )));
        }
        self.partial_trace(order)
    }

    pub fn rename(&self, from: &str, to: &str) -> Result<Self> {
        let p = positions(&self.labels, &[from])?[0];
        let mut labels = self.labels.clone();
        labels[p].name = to.to_string();
        validate_labels(&labels)?;
        Ok(Self { labels, matrix: self.matrix.clone() })
    }

    /// Trace distance ½‖ρ − σ‖₁ between states with the same label list.
    pub fn trace_distance(&self, other: &DensityOperator) -> Result<f64> {
        let other = other.reorder(&self.names())?;
        if other.labels != self.labels {
            return Err(Error::Dimension("trace distance between differently shaped states".into()));
        }
        Ok(0.5 * super::trace_norm(&(&self.matrix - &other.matrix)))
    }
}

pub(crate) fn check_distribution(dist: &[f64]) -> Result<()> {
    if dist.is_empty() {
        return Err(Error::InvalidDistribution("empty distribution".into()));
    }
    if let Some(p) = dist.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!("entry {p} is not a probability")));
    }
    let s: f64 = dist.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution(format!("entries sum to {s:.15}")));
    }
    Ok(())
}
