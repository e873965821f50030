//! Entropic quantities in bits.
//!
//! Classical factors are block-diagonal by construction, so spectra are
//! computed block by block over the joint values of the classical registers.

use crate::error::{Error, Result};
use crate::qlin::layout::{complement, offsets};
use crate::qlin::{hermitian_eigenvalues, CMatrix, DensityOperator};

/// Eigenvalues below this contribute nothing (0·log 0 = 0).
pub const EIGEN_CUTOFF: f64 = 1e-12;
/// Eigenvalues in `[-NEGATIVE_TOL, 0)` are clamped; anything lower is an error.
pub const NEGATIVE_TOL: f64 = 1e-9;

/// Spectrum of `rho`, exploiting the block structure of classical factors.
pub fn spectrum(rho: &DensityOperator) -> Vec<f64> {
    let labels = rho.labels();
    let cl: Vec<usize> = (0..labels.len()).filter(|&k| labels[k].is_classical()).collect();
    if cl.is_empty() {
        return hermitian_eigenvalues(rho.matrix());
    }
    let dims: Vec<usize> = labels.iter().map(|l| l.dim).collect();
    let qp = complement(dims.len(), &cl);
    let mc = offsets(&dims, &cl);
    let mq = offsets(&dims, &qp);
    let m = rho.matrix();
    let mut out = Vec::with_capacity(rho.dim());
    for &base in &mc {
        if mq.iter().all(|&i| m[(base + i, base + i)].norm() == 0.0) {
            continue;
        }
        if mq.len() == 1 {
            out.push(m[(base, base)].re);
            continue;
        }
        let block = CMatrix::from_fn(mq.len(), mq.len(), |i, j| m[(base + mq[i], base + mq[j])]);
        out.extend(hermitian_eigenvalues(&block));
    }
    out
}

/// Shannon entropy (bits) of a spectrum, with the cutoff and clamping rules.
pub fn spectral_entropy(eigs: &[f64]) -> Result<f64> {
    let mut h = 0.0;
    for &l in eigs {
        if l < -NEGATIVE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {l:.3e} in entropy")));
        }
        if l > EIGEN_CUTOFF {
            h -= l * l.log2();
        }
    }
    Ok(h.max(0.0))
}

/// H(ρ) = −tr ρ log₂ ρ.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    spectral_entropy(&spectrum(rho))
}

/// Entropy of the marginal on `group` (0 for the empty group).
pub fn entropy_of<S: AsRef<str>>(rho: &DensityOperator, group: &[S]) -> Result<f64> {
    if group.is_empty() {
        return Ok(0.0);
    }
    if group.len() == rho.labels().len() {
        // full state in a different order has the same spectrum
        let mut names: Vec<&str> = group.iter().map(|s| s.as_ref()).collect();
        names.sort_unstable();
        let mut all = rho.names();
        all.sort_unstable();
        if names == all {
            return von_neumann_entropy(rho);
        }
    }
    von_neumann_entropy(&rho.partial_trace(group)?)
}

fn disjoint<S: AsRef<str>>(groups: &[&[S]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for g in groups {
        for n in g.iter() {
            let n = n.as_ref();
            if seen.contains(&n) {
                return Err(Error::OverlappingGroups(n.to_string()));
            }
            seen.push(n);
        }
    }
    Ok(())
}

fn union<S: AsRef<str>>(groups: &[&[S]]) -> Vec<String> {
    groups.iter().flat_map(|g| g.iter().map(|s| s.as_ref().to_string())).collect()
}

/// H(A|B) = H(AB) − H(B).
pub fn conditional_entropy<S: AsRef<str>>(rho: &DensityOperator, a: &[S], b: &[S]) -> Result<f64> {
    disjoint(&[a, b])?;
    Ok(entropy_of(rho, &union(&[a, b]))? - entropy_of(rho, b)?)
}

/// I(A;B) = H(A) + H(B) − H(AB).
pub fn mutual_information<S: AsRef<str>>(rho: &DensityOperator, a: &[S], b: &[S]) -> Result<f64> {
    disjoint(&[a, b])?;
    Ok(entropy_of(rho, a)? + entropy_of(rho, b)? - entropy_of(rho, &union(&[a, b]))?)
}

/// I(A;B|C) = H(AC) + H(BC) − H(ABC) − H(C).
pub fn conditional_mutual_information<S: AsRef<str>>(
    rho: &DensityOperator,
    a: &[S],
    b: &[S],
    c: &[S],
) -> Result<f64> {
    disjoint(&[a, b, c])?;
    Ok(entropy_of(rho, &union(&[a, c]))? + entropy_of(rho, &union(&[b, c]))?
        - entropy_of(rho, &union(&[a, b, c]))?
        - entropy_of(rho, c)?)
}

/// I(A⟩B) = −H(A|B) = H(B) − H(AB).
pub fn coherent_information<S: AsRef<str>>(rho: &DensityOperator, a: &[S], b: &[S]) -> Result<f64> {
    Ok(-conditional_entropy(rho, a, b)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Entropy,
    CondEntropy,
    Mutual,
    CondMutual,
    Coherent,
}

/// A named information quantity over ordered label groups, e.g. `(A; B | C)`.
#[derive(Clone, Debug)]
pub struct InfoQuery {
    pub quantity: Quantity,
    pub parts: Vec<Vec<String>>,
}

impl InfoQuery {
    pub fn new(quantity: Quantity, parts: &[&[&str]]) -> Self {
        Self {
            quantity,
            parts: parts.iter().map(|g| g.iter().map(|s| s.to_string()).collect()).collect(),
        }
    }

    pub fn evaluate(&self, rho: &DensityOperator) -> Result<f64> {
        let need = match self.quantity {
            Quantity::Entropy => 1,
            Quantity::CondMutual => 3,
            _ => 2,
        };
        if self.parts.len() != need {
            return Err(Error::InvalidParameter(format!(
                "{:?} takes {need} label groups, got {}",
                self.quantity,
                self.parts.len()
            )));
        }
        let p = &self.parts;
        match self.quantity {
            Quantity::Entropy => entropy_of(rho, &p[0]),
            Quantity::CondEntropy => conditional_entropy(rho, &p[0], &p[1]),
            Quantity::Mutual => mutual_information(rho, &p[0], &p[1]),
            Quantity::CondMutual => conditional_mutual_information(rho, &p[0], &p[1], &p[2]),
            Quantity::Coherent => coherent_information(rho, &p[0], &p[1]),
        }
    }
}

/// Binary entropy h(t) in bits.
pub fn binary_entropy(t: f64) -> f64 {
    let f = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    f(t) + f(1.0 - t)
}

/// Binary convolution α∗β = (1−α)β + α(1−β).
pub fn binary_convolution(a: f64, b: f64) -> f64 {
    (1.0 - a) * b + a * (1.0 - b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::{basis_ket, c, CVector, QuantumChannel, Subsystem};

    fn q(name: &str, d: usize) -> Subsystem {
        Subsystem::quantum(name, d)
    }

    fn bell(a: &str, b: &str) -> DensityOperator {
        let v = (basis_ket(4, 0) + basis_ket(4, 3)).unscale(2f64.sqrt());
        DensityOperator::pure(vec![q(a, 2), q(b, 2)], &v).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&DensityOperator::basis(q("A", 2), 0).unwrap()).unwrap().abs() < 1e-15);
        let mixed = DensityOperator::maximally_mixed(vec![q("A", 2)]).unwrap();
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-14);
        // θ₀ with p = 1/4; h(1/4) by hand: 2 − (3/4)log₂3
        let theta = DensityOperator::embed_classical(&[0.75, 0.25], Subsystem::classical("E", 2)).unwrap();
        let want = 2.0 - 0.75 * 3f64.log2();
        assert!((von_neumann_entropy(&theta).unwrap() - want).abs() < 1e-14);
        assert!((want - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn entropy_rejects_clearly_negative_spectrum() {
        assert!(spectral_entropy(&[1.1, -0.1]).is_err());
        assert!(spectral_entropy(&[1.0, -1e-10]).is_ok());
    }

    #[test]
    fn mutual_information_examples() {
        let b = bell("A", "B");
        assert!((mutual_information(&b, &["A"], &["B"]).unwrap() - 2.0).abs() < 1e-12);
        let prod = DensityOperator::maximally_mixed(vec![q("A", 2)])
            .unwrap()
            .tensor(&DensityOperator::basis(q("B", 3), 1).unwrap())
            .unwrap();
        assert!(mutual_information(&prod, &["A"], &["B"]).unwrap().abs() < 1e-10);
        assert!(matches!(mutual_information(&b, &["A"], &["A", "B"]), Err(Error::OverlappingGroups(_))));
    }

    #[test]
    fn cmi_with_trivial_condition_is_mutual_information() {
        let psi = CVector::from_vec(vec![c(0.5, 0.0), c(0.1, 0.2), c(0.0, 0.7), c(0.3, -0.1)]);
        let rho = DensityOperator::pure(vec![q("A", 2), q("B", 2)], &psi)
            .unwrap()
            .tensor(&DensityOperator::basis(q("C", 1), 0).unwrap())
            .unwrap();
        let mi = mutual_information(&rho, &["A"], &["B"]).unwrap();
        let cmi = conditional_mutual_information(&rho, &["A"], &["B"], &["C"]).unwrap();
        assert!((mi - cmi).abs() < 1e-12);
    }

    #[test]
    fn classical_markov_chain_has_zero_cmi() {
        // X → Y → Z with explicit transition tables
        let px = [0.3, 0.7];
        let py_x = [[0.9, 0.1], [0.2, 0.8]];
        let pz_y = [[0.6, 0.3, 0.1], [0.05, 0.15, 0.8]];
        let regs = [Subsystem::classical("X", 2), Subsystem::classical("Y", 2), Subsystem::classical("Z", 3)];
        let rho = DensityOperator::classical_quantum(&regs, &[], |i| {
            let (x, y, z) = (i / 6, (i / 3) % 2, i % 3);
            Ok(Some((px[x] * py_x[x][y] * pz_y[y][z], CMatrix::identity(1, 1))))
        })
        .unwrap();
        rho.validate().unwrap();
        let cmi = conditional_mutual_information(&rho, &["X"], &["Z"], &["Y"]).unwrap();
        assert!(cmi.abs() < 1e-10, "{cmi}");
    }

    #[test]
    fn coherent_information_examples() {
        assert!((coherent_information(&bell("A", "B"), &["A"], &["B"]).unwrap() - 1.0).abs() < 1e-12);
        let mm = DensityOperator::maximally_mixed(vec![q("A", 2), q("B", 2)]).unwrap();
        assert!((coherent_information(&mm, &["A"], &["B"]).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_information_through_depolarizing_matches_direct_construction() {
        let qv: f64 = 0.5;
        let p = crate::qlin::paulis();
        let mut ks = vec![p[0].scale((1.0 - 0.75 * qv).sqrt())];
        ks.extend(p[1..].iter().map(|m| m.scale((qv / 4.0).sqrt())));
        let ch = QuantumChannel::new(vec![q("A", 2)], vec![q("B", 2)], ks).unwrap();
        let out = ch.apply(&bell("G", "A")).unwrap();
        let got = coherent_information(&out, &["G"], &["B"]).unwrap();

        // direct: (1−q)Φ + q·I/4; spectrum {1 − 3q/4, q/4, q/4, q/4}, H(B) = 1
        let lam = [1.0 - 0.75 * qv, qv / 4.0, qv / 4.0, qv / 4.0];
        let h_gb: f64 = lam.iter().map(|l| -l * l.log2()).sum();
        assert!((got - (1.0 - h_gb)).abs() < 1e-10);
    }

    #[test]
    fn binary_helpers() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((binary_convolution(0.25, 0.2) - 0.35).abs() < 1e-15);
    }

    #[test]
    fn info_query_dispatch() {
        let b = bell("A", "B");
        let q = InfoQuery::new(Quantity::Mutual, &[&["A"], &["B"]]);
        assert!((q.evaluate(&b).unwrap() - 2.0).abs() < 1e-12);
        let bad = InfoQuery::new(Quantity::CondMutual, &[&["A"], &["B"]]);
        assert!(bad.evaluate(&b).is_err());
    }
}
