//! Random states, channels and POVMs shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use qrelay::qlin::{c, CMatrix, DensityOperator, Povm, QuantumChannel, Subsystem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn ginibre(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(StandardNormal.sample(r), StandardNormal.sample(r)))
}

/// `G G† / tr` with `G` of the given rank.
pub fn random_density_matrix(r: &mut ChaCha8Rng, d: usize, rank: usize) -> CMatrix {
    let g = ginibre(r, d, rank);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    m.unscale(t)
}

pub fn random_state(r: &mut ChaCha8Rng, labels: Vec<Subsystem>) -> DensityOperator {
    let d: usize = labels.iter().map(|l| l.dim).product();
    let rank = r.random_range(1..=d);
    DensityOperator::new(labels, random_density_matrix(r, d, rank)).unwrap()
}

/// Isometry `V: C^din → C^(dout·k)` from a QR step, cut into `k` Kraus
/// operators.
pub fn random_kraus(r: &mut ChaCha8Rng, din: usize, dout: usize, k: usize) -> Vec<CMatrix> {
    let g = ginibre(r, dout * k, din);
    let q = g.qr().q();
    (0..k).map(|i| q.rows(i * dout, dout).into_owned()).collect()
}

pub fn random_channel(r: &mut ChaCha8Rng, inputs: Vec<Subsystem>, outputs: Vec<Subsystem>) -> QuantumChannel {
    let din: usize = inputs.iter().map(|l| l.dim).product();
    let dout: usize = outputs.iter().map(|l| l.dim).product();
    let k = r.random_range(din.div_ceil(dout)..=din * dout);
    QuantumChannel::new(inputs, outputs, random_kraus(r, din, dout, k)).unwrap()
}

pub fn random_unitary(r: &mut ChaCha8Rng, d: usize) -> CMatrix {
    ginibre(r, d, d).qr().q()
}

/// POVM from normalizing random positive operators, `S^{-1/2} A_i S^{-1/2}`.
pub fn random_povm(r: &mut ChaCha8Rng, d: usize, outcomes: usize) -> Povm {
    let parts: Vec<CMatrix> = (0..outcomes).map(|_| {
        let g = ginibre(r, d, d);
        &g * g.adjoint()
    }).collect();
    let s = parts.iter().fold(CMatrix::zeros(d, d), |a, p| a + p);
    let t = qrelay::qlin::psd_inv_sqrt(&s, 1e-12);
    let elements = parts.iter().map(|p| qrelay::qlin::hermitize(&(&t * p * &t))).collect();
    Povm::new((0..outcomes).map(|i| i.to_string()).collect(), elements).unwrap()
}

/// Operator with spectrum in `[0, 1]`.
pub fn random_effect(r: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let u = random_unitary(r, d);
    let diag = DMatrix::from_fn(d, d, |i, j| if i == j { c(r.random::<f64>(), 0.0) } else { c(0.0, 0.0) });
    qrelay::qlin::hermitize(&(&u * diag * u.adjoint()))
}

/// Eigenvalues by an independent route: the real symmetric embedding.
pub fn eigenvalues_oracle(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let e = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut v: Vec<f64> = e.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    // each eigenvalue appears twice
    v.into_iter().step_by(2).collect()
}

pub fn entropy_oracle(m: &CMatrix) -> f64 {
    eigenvalues_oracle(m).into_iter().filter(|&x| x > 1e-13).map(|x| -x * x.log2()).sum()
}

pub fn h2(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        -t * t.log2() - (1.0 - t) * (1.0 - t).log2()
    }
}
