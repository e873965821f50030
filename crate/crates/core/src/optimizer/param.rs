//! Maps from unconstrained real vectors to pmfs, states, POVMs and
//! classical channels. Every output satisfies its type's invariants.

use crate::error::{Error, Result};
use crate::qlin::{c, hermitize, identity, psd_inv_sqrt, CMatrix, CVector, DensityOperator, Povm, Subsystem};

/// Ridge added to each POVM Gram block so the normalizer stays invertible.
const POVM_RIDGE: f64 = 1e-9;

/// Softmax; an all-equal block gives the uniform pmf.
pub fn pmf(raw: &[f64]) -> Vec<f64> {
    let m = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = raw.iter().map(|x| (x - m).exp()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

pub fn pmf_len(n: usize) -> usize {
    n
}

/// Normalized ket from `(re, im)` pairs; the zero vector maps to `|0⟩`.
pub fn pure_ket(raw: &[f64]) -> CVector {
    let d = raw.len() / 2;
    let v = CVector::from_fn(d, |i, _| c(raw[2 * i], raw[2 * i + 1]));
    let n = v.norm();
    if n == 0.0 || !n.is_finite() {
        let mut e = CVector::zeros(d);
        e[0] = c(1.0, 0.0);
        return e;
    }
    v.unscale(n)
}

pub fn pure_len(d: usize) -> usize {
    2 * d
}

/// `A A† / tr(A A†)` for a `d × d` complex `A`; zero maps to `1/d`.
pub fn mixed_matrix(raw: &[f64], d: usize) -> CMatrix {
    let a = gram_factor(raw, d);
    let g = &a * a.adjoint();
    let t = g.trace().re;
    if t <= 0.0 || !t.is_finite() {
        return identity(d).unscale(d as f64);
    }
    hermitize(&g.unscale(t))
}

pub fn mixed_len(d: usize) -> usize {
    2 * d * d
}

fn gram_factor(raw: &[f64], d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        let k = 2 * (i * d + j);
        c(raw[k], raw[k + 1])
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
    /// Computational basis state `|x mod d⟩`; no free parameters.
    Basis,
}

impl StateKind {
    pub fn len(self, d: usize) -> usize {
        match self {
            StateKind::Pure => pure_len(d),
            StateKind::Mixed => mixed_len(d),
            StateKind::Basis => 0,
        }
    }
}

/// Build the `x`-th state of a table on `labels`.
pub fn state(kind: StateKind, labels: &[Subsystem], raw: &[f64], x: usize) -> Result<DensityOperator> {
    let d: usize = labels.iter().map(|l| l.dim).product();
    match kind {
        StateKind::Pure => DensityOperator::pure(labels.to_vec(), &pure_ket(raw)),
        StateKind::Mixed => DensityOperator::new(labels.to_vec(), mixed_matrix(raw, d)),
        StateKind::Basis => {
            let mut m = CMatrix::zeros(d, d);
            m[(x % d, x % d)] = c(1.0, 0.0);
            DensityOperator::new(labels.to_vec(), m)
        }
    }
}

/// POVM from Gram blocks `G_y = A_y A_y† + ε·1`, normalized by
/// `S^{-1/2} G_y S^{-1/2}` with `S = Σ G_y`.
pub fn povm(raw: &[f64], outcomes: usize, d: usize) -> Result<Povm> {
    let step = mixed_len(d);
    if raw.len() != outcomes * step {
        return Err(Error::Dimension(format!("POVM needs {} parameters, got {}", outcomes * step, raw.len())));
    }
    let ridge = identity(d).scale(POVM_RIDGE);
    let blocks: Vec<CMatrix> = (0..outcomes)
        .map(|y| {
            let a = gram_factor(&raw[y * step..(y + 1) * step], d);
            &a * a.adjoint() + &ridge
        })
        .collect();
    let s = blocks.iter().fold(CMatrix::zeros(d, d), |acc, g| acc + g);
    let t = psd_inv_sqrt(&s, 0.0);
    let elements = blocks.iter().map(|g| hermitize(&(&t * g * &t))).collect();
    Povm::new((0..outcomes).map(|y| y.to_string()).collect(), elements)
}

pub fn povm_len(outcomes: usize, d: usize) -> usize {
    outcomes * mixed_len(d)
}

/// Row-stochastic matrix, one softmax per row.
pub fn stochastic(raw: &[f64], rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|r| pmf(&raw[r * cols..(r + 1) * cols])).collect()
}

/// Cursor handing out consecutive slices of a raw parameter vector.
pub(crate) struct Cursor<'a> {
    raw: &'a [f64],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(raw: &'a [f64]) -> Self {
        Self { raw, pos: 0 }
    }

    pub fn take(&mut self, n: usize) -> &'a [f64] {
        let s = &self.raw[self.pos..self.pos + n];
        self.pos += n;
        s
    }
}
