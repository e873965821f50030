//! Square-root measurement decoding and the packing bound with measured
//! constants.

use crate::error::{Error, Result};
use crate::qlin::{
    hermitian_eigenvalues, hermitize, identity, max_abs, max_eigenvalue, psd_inv_sqrt, trace_product, CMatrix,
};

/// Relative cutoff for the pseudo-inverse of `S = Σ Υ_m`.
const SUPPORT_CUTOFF: f64 = 1e-12;

/// Decoder `Λ_m = S^{-1/2} Υ_m S^{-1/2}` with `Υ_m = Π Π_m Π`, plus the
/// completing element `1 − Σ Λ_m` as the last entry.
#[derive(Clone, Debug)]
pub struct SqrtMeasurement {
    pub elements: Vec<CMatrix>,
    pub complement: CMatrix,
}

pub fn build_sqrt_measurement(code_proj: &CMatrix, word_projs: &[CMatrix]) -> Result<SqrtMeasurement> {
    let d = code_proj.nrows();
    let ups: Vec<CMatrix> = if is_identity(code_proj) {
        word_projs.to_vec()
    } else {
        word_projs.iter().map(|w| hermitize(&(code_proj * w * code_proj))).collect()
    };
    let s = ups.iter().fold(CMatrix::zeros(d, d), |a, u| a + u);
    let top = max_eigenvalue(&s);
    if top <= SUPPORT_CUTOFF {
        return Err(Error::DegenerateCodebook("the square-root normalizer vanishes".into()));
    }
    let t = psd_inv_sqrt(&s, top * SUPPORT_CUTOFF);
    let elements: Vec<CMatrix> = ups.iter().map(|u| hermitize(&(&t * u * &t))).collect();
    let sum = elements.iter().fold(CMatrix::zeros(d, d), |a, e| a + e);
    let complement = hermitize(&(identity(d) - sum));
    let worst = hermitian_eigenvalues(&complement)[0];
    if worst < -1e-8 {
        return Err(Error::DegenerateCodebook(format!("decoder elements exceed the identity by {:.3e}", -worst)));
    }
    Ok(SqrtMeasurement { elements, complement })
}

fn is_identity(m: &CMatrix) -> bool {
    max_abs(&(m - identity(m.nrows()))) == 0.0
}

/// `1 − (1/M) Σ tr(Λ_m ρ_m)`.
pub fn average_error(decoder: &SqrtMeasurement, states: &[CMatrix]) -> f64 {
    let m = states.len() as f64;
    let ok: f64 = decoder.elements.iter().zip(states).map(|(l, r)| trace_product(l, r).re).sum();
    (1.0 - ok / m).clamp(0.0, 1.0)
}

/// Packing-bound constants measured on one codebook.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PackingConstants {
    /// Worst of `1 − tr(Πρ_m)` and `1 − tr(Π_m ρ_m)` over the codebook.
    pub epsilon: f64,
    /// `log₂ max tr Π_m`
    pub h: f64,
    /// `−log₂ λ_max(Π ρ̄ Π)` with `ρ̄` the codebook average.
    pub big_h: f64,
    pub messages: usize,
}

impl PackingConstants {
    /// `2(ε + 2√ε) + 4M·2^{−(H−h)}`
    pub fn bound(&self) -> f64 {
        let e = self.epsilon.max(0.0);
        2.0 * (e + 2.0 * e.sqrt()) + 4.0 * self.messages as f64 * 2f64.powf(-(self.big_h - self.h))
    }
}

pub fn measure_constants(code_proj: &CMatrix, word_projs: &[CMatrix], states: &[CMatrix]) -> PackingConstants {
    let d = code_proj.nrows();
    let mut epsilon: f64 = 0.0;
    let mut max_rank: f64 = 0.0;
    let mut avg = CMatrix::zeros(d, d);
    for (w, r) in word_projs.iter().zip(states) {
        epsilon = epsilon.max(1.0 - trace_product(code_proj, r).re).max(1.0 - trace_product(w, r).re);
        max_rank = max_rank.max(w.trace().re);
        avg += r;
    }
    let avg = avg.unscale(states.len() as f64);
    let top = if is_identity(code_proj) {
        max_eigenvalue(&avg)
    } else {
        max_eigenvalue(&hermitize(&(code_proj * avg * code_proj)))
    };
    PackingConstants {
        epsilon: epsilon.max(0.0),
        h: max_rank.max(f64::MIN_POSITIVE).log2(),
        big_h: -top.max(f64::MIN_POSITIVE).log2(),
        messages: states.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::{basis_projector, c, max_abs};

    #[test]
    fn orthogonal_codewords_decode_perfectly() {
        let words = vec![basis_projector(3, 0), basis_projector(3, 2)];
        let dec = build_sqrt_measurement(&identity(3), &words).unwrap();
        for (l, w) in dec.elements.iter().zip(&words) {
            assert!(max_abs(&(l - w)) < 1e-12);
        }
        assert!(average_error(&dec, &words) < 1e-12);
    }

    #[test]
    fn two_pure_states_match_closed_form() {
        // |0⟩ and |+⟩: the pretty good measurement succeeds with
        // probability ½(1 + √(1 − s²)) for overlap s = 1/√2.
        let zero = basis_projector(2, 0);
        let plus = CMatrix::from_element(2, 2, c(0.5, 0.0));
        let dec = build_sqrt_measurement(&identity(2), &[zero.clone(), plus.clone()]).unwrap();
        let s2: f64 = 0.5;
        let want = 0.5 * (1.0 - (1.0 - s2).sqrt());
        assert!((average_error(&dec, &[zero, plus]) - want).abs() < 1e-12);
        let total = dec.elements.iter().fold(dec.complement.clone(), |a, e| a + e);
        assert!(max_abs(&(total - identity(2))) < 1e-12);
    }

    #[test]
    fn empty_projectors_are_degenerate() {
        let z = CMatrix::zeros(2, 2);
        assert!(matches!(build_sqrt_measurement(&z, &[identity(2)]), Err(Error::DegenerateCodebook(_))));
    }
}
