//! Ready-made channels and configurations used by the fixtures, examples and
//! tests.

use std::collections::BTreeMap;

use crate::bounds::{uniform, AFConfig, Ensemble, X0, X1, X2};
use crate::channels::{make_cq_relay, make_hadamard_relay, HadamardSpec, RelayChannel};
use crate::error::Result;
use crate::qlin::{basis_projector, c, identity, paulis, CVector, DensityOperator, Povm, Subsystem};

fn q(name: &str, d: usize) -> Subsystem {
    Subsystem::quantum(name, d)
}

fn ket(dim: usize, amp: impl Fn(usize) -> f64) -> CVector {
    CVector::from_fn(dim, |i, _| c(amp(i), 0.0))
}

/// Partial decode-forward ensemble for the wired relay: `X₀ = (a, b)`
/// uniform, `U = a` travels to the relay on `A₀`, `b` goes straight to
/// `B₁` on `A₁`, and an independent uniform `X₁` rides on `D`.
pub fn wired_pdf_ensemble() -> Result<Ensemble> {
    let mut sender = Vec::new();
    for x0 in 0..4 {
        let (a, b) = (x0 / 2, x0 % 2);
        let s = DensityOperator::basis(q("A1", 2), b)?.tensor(&DensityOperator::basis(q("A0", 8), a * 4)?)?;
        sender.push(s);
    }
    let relay = (0..2).map(|x| DensityOperator::basis(q("D", 2), x)).collect::<Result<Vec<_>>>()?;
    let mut pmf = vec![0.0; 2 * 4 * 2];
    for u in 0..2 {
        for x0 in 0..4 {
            for x1 in 0..2 {
                if x0 / 2 == u {
                    pmf[(u * 4 + x0) * 2 + x1] = 1.0 / 8.0;
                }
            }
        }
    }
    Ensemble::new(
        vec![Subsystem::classical("U", 2), Subsystem::classical(X0, 4), Subsystem::classical(X1, 2)],
        pmf,
        BTreeMap::from([(X0.to_string(), sender), (X1.to_string(), relay)]),
    )
}

/// Assist-forward configuration for the wired relay. `X₁ = (a, b)` is
/// written on two qubits of `A₀`; `G₀` shares an EPR pair through `A₁` and
/// `G₁` through the third qubit of `A₀`; `X₂` selects one of four Bell states
/// on `(G₂, D)` for superdense coding.
pub fn wired_af_config() -> Result<AFConfig> {
    let labels = vec![q("G0", 2), q("G1", 2), q("A1", 2), q("A0", 8)];
    let mut states = Vec::new();
    for x1 in 0..4 {
        let amp = |i: usize| {
            let (g0, g1, a1, a0) = (i / 32, (i / 16) % 2, (i / 8) % 2, i % 8);
            if a0 / 2 == x1 && g0 == a1 && g1 == a0 % 2 {
                0.5
            } else {
                0.0
            }
        };
        states.push(DensityOperator::pure(labels.clone(), &ket(64, amp))?);
    }
    let ens1 = Ensemble::single(Subsystem::classical(X1, 4), uniform(4), states)?;
    let phi = ket(4, |i| if i == 0 || i == 3 { 0.5f64.sqrt() } else { 0.0 });
    let mut bells = Vec::new();
    for p in paulis() {
        let v = identity(2).kronecker(&p) * &phi;
        bells.push(DensityOperator::pure(vec![q("G2", 2), q("D", 2)], &v)?);
    }
    let ens2 = Ensemble::single(Subsystem::classical(X2, 4), uniform(4), bells)?;
    AFConfig::new(ens1, ens2)
}

/// Measure qubit `A` in the computational basis (ignoring `D`), report the
/// bit to the relay as `Y1` and prepare `|y⟩` at the destination `B`.
pub fn bit_pipe_spec() -> Result<HadamardSpec> {
    let povm = Povm::new(
        vec!["0".into(), "1".into()],
        vec![basis_projector(2, 0).kronecker(&identity(2)), basis_projector(2, 1).kronecker(&identity(2))],
    )?;
    let prepare = (0..2).map(|y| DensityOperator::basis(q("B", 2), y)).collect::<Result<Vec<_>>>()?;
    Ok(HadamardSpec { sender: vec![q("A", 2)], relay_in: q("D", 2), measure: povm, prepare, relay_out: "Y1".into() })
}

pub fn bit_pipe_relay() -> Result<RelayChannel> {
    make_hadamard_relay(&bit_pipe_spec()?)
}

fn bsc_state(flip: f64, x: usize) -> Result<DensityOperator> {
    let mut v = vec![flip, flip];
    v[x] = 1.0 - flip;
    DensityOperator::embed_classical(&v, Subsystem::classical("B", 2))
}

fn trivial_e() -> Result<DensityOperator> {
    DensityOperator::basis(q("E", 1), 0)
}

/// Output table of the binary symmetric channel `X → B` with a trivial `E`.
pub fn bsc_cq_table(flip: f64) -> Result<Vec<DensityOperator>> {
    (0..2).map(|x| bsc_state(flip, x)?.tensor(&trivial_e()?)).collect()
}

/// Relay-less binary symmetric channel `X → B` as a c-q relay with trivial
/// `X₁` and `E`.
pub fn bsc_cq_relay(flip: f64) -> Result<RelayChannel> {
    make_cq_relay(Subsystem::classical("X", 2), Subsystem::classical("X1", 1), &bsc_cq_table(flip)?, "E")
}

/// Output table `0 ↦ |0⟩`, `1 ↦ |+⟩` with a trivial `E`.
pub fn pure_pair_cq_table() -> Result<Vec<DensityOperator>> {
    let plus = ket(2, |_| 0.5f64.sqrt());
    Ok(vec![
        DensityOperator::basis(q("B", 2), 0)?.tensor(&trivial_e()?)?,
        DensityOperator::pure(vec![q("B", 2)], &plus)?.tensor(&trivial_e()?)?,
    ])
}

/// Relay-less c-q channel `0 ↦ |0⟩`, `1 ↦ |+⟩`.
pub fn pure_pair_cq_relay() -> Result<RelayChannel> {
    make_cq_relay(Subsystem::classical("X", 2), Subsystem::classical("X1", 1), &pure_pair_cq_table()?, "E")
}

/// Anti-degraded c-q relay: the relay input picks the destination's
/// crossover, `flips[x₁]`, and `E` sees `B` through a further BSC(`extra`).
pub fn anti_degraded_cq_relay(flips: &[f64], extra: f64) -> Result<RelayChannel> {
    let b = Subsystem::classical("B", 2);
    let e = Subsystem::classical("E", 2);
    let mut table = Vec::new();
    for x in 0..2 {
        for &f in flips {
            let mut pmf = vec![0.0; 4];
            for bv in 0..2 {
                let pb = if bv == x { 1.0 - f } else { f };
                for ev in 0..2 {
                    pmf[bv * 2 + ev] = pb * if ev == bv { 1.0 - extra } else { extra };
                }
            }
            let joint = DensityOperator::embed_classical(&pmf, Subsystem::classical("BE", 4))?;
            table.push(DensityOperator::classical_quantum(&[], &[b.clone(), e.clone()], |_| {
                Ok(Some((1.0, joint.matrix().clone())))
            })?);
        }
    }
    make_cq_relay(Subsystem::classical("X", 2), Subsystem::classical("X1", flips.len()), &table, "E")
}

/// Ensemble over `(X0, X1)` for a c-q relay with point-mass inputs.
pub fn cq_ensemble(ch: &RelayChannel, pmf: Vec<f64>) -> Result<Ensemble> {
    let x = ch.sender_labels()[0].clone();
    let x1 = ch.relay_in_label().clone();
    let sender = (0..x.dim).map(|i| DensityOperator::basis(x.clone(), i)).collect::<Result<Vec<_>>>()?;
    let relay = (0..x1.dim).map(|i| DensityOperator::basis(x1.clone(), i)).collect::<Result<Vec<_>>>()?;
    Ensemble::new(
        vec![Subsystem::classical(X0, x.dim), Subsystem::classical(X1, x1.dim)],
        pmf,
        BTreeMap::from([(X0.to_string(), sender), (X1.to_string(), relay)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{eval_af, eval_full_df, eval_hadamard_capacity, eval_pdf, holevo_information, BoundRecord};
    use crate::channels::{is_degraded, make_wired_relay};
    use crate::entropy::binary_entropy;

    #[test]
    fn wired_pdf_reaches_two() {
        let ch = make_wired_relay().unwrap();
        let r = eval_pdf(&ch, &wired_pdf_ensemble().unwrap()).unwrap();
        assert!((r.rate - 2.0).abs() < 1e-9, "{r:?}");
        assert!((r.multicast - 2.0).abs() < 1e-9);
        assert!((r.relay_decode - 1.0).abs() < 1e-9 && (r.direct - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wired_af_reaches_two() {
        let ch = make_wired_relay().unwrap();
        let r = eval_af(&ch, &wired_af_config().unwrap()).unwrap();
        let want = [2.0, 2.0, 2.0];
        for ((_, g), w) in r.bracket().iter().zip(want) {
            assert!((g - w).abs() < 1e-9, "{r:?}");
        }
        assert!((r.q.value - 1.0).abs() < 1e-9 && r.direct_holevo.abs() < 1e-9);
        assert!((r.direct_coherent - 1.0).abs() < 1e-9);
        assert!((r.rate - 2.0).abs() < 1e-9);
    }

    #[test]
    fn bit_pipe_full_df_is_one() {
        let ch = bit_pipe_relay().unwrap();
        assert!(is_degraded(&ch).unwrap().degraded);
        let x0: Vec<DensityOperator> = (0..2).map(|i| DensityOperator::basis(q("A", 2), i).unwrap()).collect();
        let x1 = vec![DensityOperator::basis(q("D", 2), 0).unwrap()];
        let ens = Ensemble::new(
            vec![Subsystem::classical(X0, 2), Subsystem::classical(X1, 1)],
            uniform(2),
            BTreeMap::from([(X0.to_string(), x0), (X1.to_string(), x1)]),
        )
        .unwrap();
        let df = eval_full_df(&ch, &ens).unwrap();
        assert!((df.rate - 1.0).abs() < 1e-12, "{df:?}");
        let had = eval_hadamard_capacity(&ch, &ens).unwrap();
        assert!((had.rate - df.rate).abs() < 1e-10);
    }

    #[test]
    fn bsc_holevo_at_uniform() {
        let ch = bsc_cq_relay(0.11).unwrap();
        let ens = cq_ensemble(&ch, uniform(2)).unwrap();
        let chi = holevo_information(&ch, &ens).unwrap();
        assert!((chi - (1.0 - binary_entropy(0.11))).abs() < 1e-12);
    }

    #[test]
    fn pure_pair_holevo() {
        let ch = pure_pair_cq_relay().unwrap();
        let ens = cq_ensemble(&ch, uniform(2)).unwrap();
        let chi = holevo_information(&ch, &ens).unwrap();
        let lam = (1.0 - 0.5f64.sqrt()) / 2.0;
        assert!((chi - binary_entropy(lam)).abs() < 1e-12);
    }

    #[test]
    fn hadamard_capacity_requires_hadamard() {
        let wired = make_wired_relay().unwrap();
        assert!(eval_hadamard_capacity(&wired, &wired_pdf_ensemble().unwrap()).is_err());
    }
}
