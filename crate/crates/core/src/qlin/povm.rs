use super::{
    basis_projector, c, hermitian_eigenvalues, max_abs, psd_sqrt, CMatrix, QuantumChannel, Subsystem,
    COMPLETENESS_TOL, POSITIVITY_TOL,
};
use crate::error::{Error, Result};

/// A POVM: positive semidefinite elements summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    outcomes: Vec<String>,
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(outcomes: Vec<String>, elements: Vec<CMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        if outcomes.len() != elements.len() {
            return Err(Error::InvalidPovm(format!(
                "{} outcome labels for {} elements",
                outcomes.len(),
                elements.len()
            )));
        }
        let d = elements[0].nrows();
        let mut sum = CMatrix::zeros(d, d);
        for (o, e) in outcomes.iter().zip(&elements) {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::InvalidPovm(format!("element `{o}` has the wrong shape")));
            }
            let herm = max_abs(&(e - e.adjoint()));
            if herm > COMPLETENESS_TOL {
                return Err(Error::InvalidPovm(format!("element `{o}` is not Hermitian ({herm:.3e})")));
            }
            let min = hermitian_eigenvalues(e)[0];
            if min < -POSITIVITY_TOL {
                return Err(Error::InvalidPovm(format!("element `{o}` has eigenvalue {min:.3e}")));
            }
            sum += e;
        }
        for i in 0..d {
            sum[(i, i)] -= c(1.0, 0.0);
        }
        let residual = max_abs(&sum);
        if residual > COMPLETENESS_TOL {
            return Err(Error::InvalidPovm(format!("elements do not sum to identity (residual {residual:.3e})")));
        }
        Ok(Self { outcomes, elements })
    }

    /// Projective measurement in the computational basis.
    pub fn computational(dim: usize) -> Self {
        Self {
            outcomes: (0..dim).map(|i| i.to_string()).collect(),
            elements: (0..dim).map(|i| basis_projector(dim, i)).collect(),
        }
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    /// The measure-and-record channel `ρ ↦ Σ_y tr(Γ_y ρ) |y><y|` from the
    /// measured factors onto a classical register `out`.
    pub fn measurement_channel(&self, inputs: Vec<Subsystem>, out: Subsystem) -> Result<QuantumChannel> {
        let d: usize = inputs.iter().map(|l| l.dim).product();
        if d != self.dim() {
            return Err(Error::Dimension(format!(
                "POVM acts on dimension {} but the measured factors have dimension {d}",
                self.dim()
            )));
        }
        if out.dim != self.len() {
            return Err(Error::Dimension(format!(
                "outcome register `{}` has dimension {} for {} outcomes",
                out.name,
                out.dim,
                self.len()
            )));
        }
        let ny = self.len();
        let mut kraus = Vec::with_capacity(ny * d);
        for (y, e) in self.elements.iter().enumerate() {
            let root = psd_sqrt(e);
            for k in 0..d {
                let mut m = CMatrix::zeros(ny, d);
                for j in 0..d {
                    m[(y, j)] = root[(k, j)];
                }
                if m.iter().any(|z| z.norm() > 0.0) {
                    kraus.push(m);
                }
            }
        }
        let out = Subsystem::classical(out.name, out.dim);
        QuantumChannel::new(inputs, vec![out], kraus)
    }
}
