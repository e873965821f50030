//! Types, δ-typical sets and typical projectors.
//!
//! A sequence `xⁿ` is δ-typical for `p` when `|p(a) − N(a|xⁿ)/n| ≤ δ·p(a)`
//! for every letter `a` (so letters with `p(a) = 0` never occur).

use crate::error::{Error, Result};
use crate::qlin::{c, check_cap, hermitian_eigen, CMatrix, CVector};

/// Largest number of sequences `|X|ⁿ` enumerated by default.
pub const ENUMERATION_CAP: usize = 1 << 14;
/// Slack on the typicality comparison so boundary types are not lost to
/// rounding.
const TYPICAL_SLACK: f64 = 1e-12;

/// Letter counts `N(a|xⁿ)` of a sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeProfile {
    pub counts: Vec<usize>,
}

impl TypeProfile {
    pub fn of(seq: &[usize], alphabet: usize) -> Self {
        let mut counts = vec![0; alphabet];
        for &a in seq {
            counts[a] += 1;
        }
        Self { counts }
    }

    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn empirical(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.counts.iter().map(|&k| k as f64 / n).collect()
    }

    pub fn is_typical(&self, p: &[f64], delta: f64) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        self.counts
            .iter()
            .zip(p)
            .all(|(&k, &pa)| (pa - k as f64 / n as f64).abs() <= delta * pa + TYPICAL_SLACK)
    }
}

fn check_pmf(p: &[f64]) -> Result<()> {
    crate::bounds::check_pmf(p)
}

/// Every sequence in lexicographic order, checked against the cap.
fn all_sequences(alphabet: usize, n: usize, cap: usize) -> Result<impl Iterator<Item = Vec<usize>>> {
    let total = (alphabet as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(Error::EnumerationCap(format!("{alphabet}^{n} sequences exceed the cap of {cap}")));
    }
    let total = total as usize;
    Ok((0..total).map(move |mut idx| {
        let mut s = vec![0; n];
        for k in (0..n).rev() {
            s[k] = idx % alphabet;
            idx /= alphabet;
        }
        s
    }))
}

/// `T_δ⁽ⁿ⁾(p)` by exhaustive enumeration, lexicographically ordered.
pub fn typical_set(p: &[f64], n: usize, delta: f64) -> Result<Vec<Vec<usize>>> {
    typical_set_capped(p, n, delta, ENUMERATION_CAP)
}

pub fn typical_set_capped(p: &[f64], n: usize, delta: f64, cap: usize) -> Result<Vec<Vec<usize>>> {
    check_pmf(p)?;
    if delta < 0.0 {
        return Err(Error::InvalidParameter(format!("delta = {delta} is negative")));
    }
    Ok(all_sequences(p.len(), n, cap)?
        .filter(|s| TypeProfile::of(s, p.len()).is_typical(p, delta))
        .collect())
}

pub fn sequence_probability(p: &[f64], seq: &[usize]) -> f64 {
    seq.iter().map(|&a| p[a]).product()
}

/// `ε_δ(n) = 2·|X|·exp(−n·ν·δ²)` with `ν` the smallest nonzero probability.
pub fn epsilon_delta(p: &[f64], n: usize, delta: f64) -> f64 {
    let nu = p.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
    2.0 * p.len() as f64 * (-(n as f64) * nu * delta * delta).exp()
}

fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// `Σ_s |v_s⟩⟨v_s|` with `|v_s⟩ = ⊗ᵢ bases[i][:, s_i]`.
pub(crate) fn product_projector(bases: &[&CMatrix], sequences: &[Vec<usize>]) -> CMatrix {
    let dim: usize = bases.iter().map(|b| b.nrows()).product();
    let mut w = CMatrix::zeros(dim, sequences.len());
    for (col, s) in sequences.iter().enumerate() {
        let mut v = CVector::from_element(1, c(1.0, 0.0));
        for (b, &k) in bases.iter().zip(s) {
            v = v.kronecker(&b.column(k));
        }
        w.set_column(col, &v);
    }
    &w * w.adjoint()
}

/// Projector onto δ-typical eigen-sequences of `rho`, together with the
/// measured typicality properties.
#[derive(Clone, Debug)]
pub struct TypicalProjector {
    pub spectrum: Vec<f64>,
    pub eigenbasis: CMatrix,
    pub n: usize,
    pub delta: f64,
    pub sequences: Vec<Vec<usize>>,
    pub projector: CMatrix,
    pub checks: TypicalChecks,
}

/// The three typicality properties with their exact constants:
/// `tr(Πρ⊗ⁿ) ≥ 1 − ε_δ(n)`, `tr Π ≤ 2^{n(1+δ)H}` and
/// `Πρ⊗ⁿΠ ≤ 2^{−n(1−δ)H}·Π`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypicalChecks {
    pub entropy: f64,
    pub mass: f64,
    pub epsilon: f64,
    pub rank: usize,
    pub rank_bound: f64,
    /// Largest eigenvalue of `Πρ⊗ⁿΠ` on the typical subspace.
    pub sandwich: f64,
    pub sandwich_bound: f64,
}

impl TypicalChecks {
    pub fn unit_mass_holds(&self) -> bool {
        self.mass >= 1.0 - self.epsilon - 1e-12
    }

    pub fn rank_holds(&self) -> bool {
        self.rank as f64 <= self.rank_bound * (1.0 + 1e-12)
    }

    pub fn sandwich_holds(&self) -> bool {
        self.sandwich <= self.sandwich_bound * (1.0 + 1e-12)
    }

    pub fn all_hold(&self) -> bool {
        self.unit_mass_holds() && self.rank_holds() && self.sandwich_holds()
    }
}

/// `Π_δ⁽ⁿ⁾(ρ)` in the eigenbasis of `rho`. The projector commutes with
/// `ρ⊗ⁿ`, so the properties are computed from sequence probabilities.
pub fn typical_projector(rho: &CMatrix, n: usize, delta: f64) -> Result<TypicalProjector> {
    let d = rho.nrows();
    let dim = d.checked_pow(n as u32).ok_or_else(|| Error::DimensionCap { dim: usize::MAX, cap: crate::qlin::dimension_cap() })?;
    check_cap(dim)?;
    let (vals, vecs) = hermitian_eigen(rho);
    let spectrum: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = spectrum.iter().sum();
    let spectrum: Vec<f64> = spectrum.iter().map(|v| v / total).collect();
    let sequences = typical_set(&spectrum, n, delta)?;
    let bases = vec![&vecs; n];
    let projector = product_projector(&bases, &sequences);
    let h = shannon(&spectrum);
    let checks = TypicalChecks {
        entropy: h,
        mass: sequences.iter().map(|s| sequence_probability(&spectrum, s)).sum(),
        epsilon: epsilon_delta(&spectrum, n, delta),
        rank: sequences.len(),
        rank_bound: 2f64.powf(n as f64 * (1.0 + delta) * h),
        sandwich: sequences.iter().map(|s| sequence_probability(&spectrum, s)).fold(0.0, f64::max),
        sandwich_bound: 2f64.powf(-(n as f64) * (1.0 - delta) * h),
    };
    Ok(TypicalProjector { spectrum, eigenbasis: vecs, n, delta, sequences, projector, checks })
}

/// Conditional typical projector `⊗_a Π_δ^{(N(a))}(ρ_a)`, the factor for
/// letter `a` acting on the positions `{i : x_i = a}`.
pub fn conditional_typical_projector(states: &[CMatrix], x: &[usize], delta: f64) -> Result<CMatrix> {
    let n = x.len();
    let eig: Vec<(Vec<f64>, CMatrix)> = states
        .iter()
        .map(|s| {
            let (v, b) = hermitian_eigen(s);
            let v: Vec<f64> = v.iter().map(|t| t.max(0.0)).collect();
            let tot: f64 = v.iter().sum();
            (v.iter().map(|t| t / tot).collect(), b)
        })
        .collect();
    let mut sequences: Vec<Vec<usize>> = vec![vec![0; n]];
    for (a, (p, _)) in eig.iter().enumerate() {
        let pos: Vec<usize> = (0..n).filter(|&i| x[i] == a).collect();
        if pos.is_empty() {
            continue;
        }
        let local = typical_set(p, pos.len(), delta)?;
        let mut next = Vec::with_capacity(sequences.len() * local.len());
        for s in &sequences {
            for t in &local {
                let mut u = s.clone();
                for (&i, &k) in pos.iter().zip(t) {
                    u[i] = k;
                }
                next.push(u);
            }
        }
        sequences = next;
    }
    let bases: Vec<&CMatrix> = x.iter().map(|&a| &eig[a].1).collect();
    Ok(product_projector(&bases, &sequences))
}
