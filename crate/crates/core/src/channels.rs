//! Relay channels `N: A D → B E` and their structural classes.
//!
//! Constructors cover the wired relay, the Pauli-twirl depolarizing relay,
//! measure-and-prepare (Hadamard) relays and classical-quantum relays.
//! Classifiers work on the Choi state over the joint input `(A, D)`:
//!
//! - degraded: `I(R;B|E) ≈ 0`, the quantum Markov chain condition,
//! - orthogonal receiver components: Choi state factorizes across
//!   `(R_A, B₁, E)` and `(R_D, B₂)`,
//! - classical-quantum: the channel is invariant under dephasing its inputs.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::entropy::conditional_mutual_information;
use crate::error::{Error, Result};
use crate::qlin::{
    self, basis_ket, basis_projector, c, hermitian_eigen, max_abs, paulis, psd_sqrt, CMatrix, DensityOperator,
    Povm, QuantumChannel, Subsystem,
};

/// CMI threshold below which a channel is reported degraded.
pub const DEGRADED_THRESHOLD: f64 = 1e-6;
/// Trace-distance threshold for the Choi product test.
pub const ORC_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    SenderIn,
    RelayIn,
    DestOut1,
    DestOut2,
    RelayOut,
}

/// Assignment of channel factors to relay roles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roles {
    pub sender_in: Vec<String>,
    pub relay_in: String,
    pub dest_out_1: Vec<String>,
    pub dest_out_2: Vec<String>,
    pub relay_out: String,
}

impl Roles {
    /// Build from a label → role map. Labels are taken in `order` so that
    /// multi-label roles keep the channel's factor order.
    pub fn from_map(map: &BTreeMap<String, Role>, order: &[&str]) -> Result<Self> {
        let pick = |role: Role| -> Vec<String> {
            order.iter().filter(|n| map.get(**n) == Some(&role)).map(|n| n.to_string()).collect()
        };
        for name in map.keys() {
            if !order.contains(&name.as_str()) {
                return Err(Error::UnknownLabel(name.clone()));
            }
        }
        let single = |role: Role, what: &str| -> Result<String> {
            let v = pick(role);
            if v.len() != 1 {
                return Err(Error::Structure(format!("expected exactly one {what} label, found {}", v.len())));
            }
            Ok(v[0].clone())
        };
        Ok(Self {
            sender_in: pick(Role::SenderIn),
            relay_in: single(Role::RelayIn, "relay input")?,
            dest_out_1: pick(Role::DestOut1),
            dest_out_2: pick(Role::DestOut2),
            relay_out: single(Role::RelayOut, "relay output")?,
        })
    }

    pub fn to_map(&self) -> BTreeMap<String, Role> {
        let mut m = BTreeMap::new();
        for n in &self.sender_in {
            m.insert(n.clone(), Role::SenderIn);
        }
        m.insert(self.relay_in.clone(), Role::RelayIn);
        for n in &self.dest_out_1 {
            m.insert(n.clone(), Role::DestOut1);
        }
        for n in &self.dest_out_2 {
            m.insert(n.clone(), Role::DestOut2);
        }
        m.insert(self.relay_out.clone(), Role::RelayOut);
        m
    }

    /// All destination outputs `B = (B₁, B₂)`.
    pub fn dest(&self) -> Vec<String> {
        self.dest_out_1.iter().chain(&self.dest_out_2).cloned().collect()
    }
}

/// Result of the Choi-state Markov chain test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Degradedness {
    pub degraded: bool,
    /// `I(R;B|E)` on the Choi state, in bits.
    pub residual: f64,
}

/// Result of the Choi-state product test, with the two factors.
#[derive(Clone, Debug)]
pub struct OrcReport {
    pub is_orc: bool,
    pub trace_distance: f64,
    /// Broadcast part `M: A → B₁ E`.
    pub broadcast: QuantumChannel,
    /// Direct relay part `P: D → B₂`.
    pub direct: QuantumChannel,
}

/// Measure-and-prepare description of a Hadamard relay.
#[derive(Clone, Debug)]
pub struct HadamardSpec {
    pub sender: Vec<Subsystem>,
    pub relay_in: Subsystem,
    /// POVM on `(sender…, relay_in)`; its outcome is the relay's observation.
    pub measure: Povm,
    /// Destination state prepared for each outcome.
    pub prepare: Vec<DensityOperator>,
    /// Name of the classical relay output register.
    pub relay_out: String,
}

/// A relay channel with its role assignment and cached classifier results.
#[derive(Clone, Debug)]
pub struct RelayChannel {
    channel: QuantumChannel,
    roles: Roles,
    degraded: OnceLock<Degradedness>,
    orc: OnceLock<OrcReport>,
    constructed_hadamard: bool,
}

impl RelayChannel {
    pub fn new(channel: QuantumChannel, roles: Roles) -> Result<Self> {
        let ins = channel.input_names();
        let outs = channel.output_names();
        let mut seen_in: Vec<&str> = roles.sender_in.iter().map(|s| s.as_str()).collect();
        seen_in.push(&roles.relay_in);
        let mut seen_out: Vec<&str> = roles.dest().iter().map(|s| ins_lookup(&outs, s)).collect::<Result<_>>()?;
        seen_out.push(ins_lookup(&outs, &roles.relay_out)?);
        for n in &seen_in {
            ins_lookup(&ins, n)?;
        }
        seen_in.sort_unstable();
        seen_out.sort_unstable();
        let mut all_in = ins.clone();
        all_in.sort_unstable();
        let mut all_out = outs.clone();
        all_out.sort_unstable();
        if seen_in != all_in {
            return Err(Error::Structure("roles must cover every channel input exactly once".into()));
        }
        if seen_out != all_out {
            return Err(Error::Structure("roles must cover every channel output exactly once".into()));
        }
        Ok(Self {
            channel,
            roles,
            degraded: OnceLock::new(),
            orc: OnceLock::new(),
            constructed_hadamard: false,
        })
    }

    pub fn channel(&self) -> &QuantumChannel {
        &self.channel
    }

    pub fn roles(&self) -> &Roles {
        &self.roles
    }

    pub fn sender_labels(&self) -> Vec<Subsystem> {
        self.roles.sender_in.iter().filter_map(|n| self.channel.input(n).cloned()).collect()
    }

    pub fn relay_in_label(&self) -> &Subsystem {
        self.channel.input(&self.roles.relay_in).expect("validated role")
    }

    pub fn relay_out_label(&self) -> &Subsystem {
        self.channel.output(&self.roles.relay_out).expect("validated role")
    }

    pub fn dest_labels(&self) -> Vec<Subsystem> {
        self.roles.dest().iter().filter_map(|n| self.channel.output(n).cloned()).collect()
    }

    /// Output state for sender input `theta` (on the sender labels) and relay
    /// input `zeta` (on the relay input label).
    pub fn output(&self, theta: &DensityOperator, zeta: &DensityOperator) -> Result<DensityOperator> {
        self.channel.apply(&theta.tensor(zeta)?)
    }

    pub fn is_constructed_hadamard(&self) -> bool {
        self.constructed_hadamard
    }
}

fn ins_lookup<'a>(names: &[&'a str], n: &str) -> Result<&'a str> {
    names
        .iter()
        .find(|m| **m == n)
        .copied()
        .ok_or_else(|| Error::UnknownLabel(n.to_string()))
}

fn q(name: &str, d: usize) -> Subsystem {
    Subsystem::quantum(name, d)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::InvalidParameter(format!("{name} = {v} is outside [0, 1]")));
    }
    Ok(())
}

/// Broadcast channel `M: A → B₁ E` of the depolarizing relay: append
/// `θ₀ = (1−p)|0⟩⟨0| + p|1⟩⟨1|` on E, then apply a uniformly random `P ⊗ P`
/// Pauli.
pub fn pauli_twirl_broadcast(p: f64) -> Result<QuantumChannel> {
    check_unit("p", p)?;
    let weights = [1.0 - p, p];
    let mut kraus = Vec::new();
    for (k, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        // V_k = √w (1 ⊗ |k⟩): A → B₁ E
        let mut v = CMatrix::zeros(4, 2);
        for a in 0..2 {
            v[(a * 2 + k, a)] = c(w.sqrt(), 0.0);
        }
        for pm in paulis() {
            kraus.push(pm.kronecker(&pm).scale(0.5) * &v);
        }
    }
    QuantumChannel::new(vec![q("A", 2)], vec![q("B1", 2), q("E", 2)], kraus)
}

/// Qubit depolarizing channel `ρ ↦ (1−q)ρ + q·1/2`.
pub fn depolarizing(input: &str, output: &str, qv: f64) -> Result<QuantumChannel> {
    check_unit("q", qv)?;
    let p = paulis();
    let mut kraus = vec![p[0].scale((1.0 - 0.75 * qv).sqrt())];
    if qv > 0.0 {
        kraus.extend(p[1..].iter().map(|m| m.scale((qv / 4.0).sqrt())));
    }
    QuantumChannel::new(vec![q(input, 2)], vec![q(output, 2)], kraus)
}

/// The depolarizing relay `M_{A→B₁E} ⊗ P_{D→B₂}` with outputs `(B₁, B₂, E)`.
pub fn make_depolarizing_relay(p: f64, qv: f64) -> Result<RelayChannel> {
    let m = pauli_twirl_broadcast(p)?;
    let d = depolarizing("D", "B2", qv)?;
    let n = m.tensor(&d)?.reorder_outputs(&["B1", "B2", "E"])?;
    RelayChannel::new(n, orc_roles(&["A"], "D", "B1", "B2", "E"))
}

fn orc_roles(sender: &[&str], relay_in: &str, b1: &str, b2: &str, e: &str) -> Roles {
    Roles {
        sender_in: sender.iter().map(|s| s.to_string()).collect(),
        relay_in: relay_in.into(),
        dest_out_1: vec![b1.into()],
        dest_out_2: vec![b2.into()],
        relay_out: e.into(),
    }
}

/// Noiseless wired relay: `A₁ → B₁`, `D → B₂`, `A₀ → E` with `A₀`, `E` of
/// dimension eight and the rest qubits.
pub fn make_wired_relay() -> Result<RelayChannel> {
    let a1 = q("A1", 2);
    let a0 = q("A0", 8);
    let d = q("D", 2);
    let n = QuantumChannel::wire(&a1, "B1")?
        .tensor(&QuantumChannel::wire(&a0, "E")?)?
        .tensor(&QuantumChannel::wire(&d, "B2")?)?
        .reorder_outputs(&["B1", "B2", "E"])?;
    RelayChannel::new(n, orc_roles(&["A1", "A0"], "D", "B1", "B2", "E"))
}

/// Measure `(A, D)` with a POVM, hand the outcome to the relay as a classical
/// register and prepare the destination output from it.
pub fn make_hadamard_relay(spec: &HadamardSpec) -> Result<RelayChannel> {
    let mut inputs = spec.sender.clone();
    inputs.push(spec.relay_in.clone());
    let din: usize = inputs.iter().map(|l| l.dim).product();
    if spec.measure.dim() != din {
        return Err(Error::InvalidPovm(format!(
            "POVM dimension {} does not match the input dimension {din}",
            spec.measure.dim()
        )));
    }
    let ny = spec.measure.len();
    if spec.prepare.len() != ny {
        return Err(Error::Dimension(format!("{} prepared states for {ny} outcomes", spec.prepare.len())));
    }
    let dest = spec.prepare[0].labels().to_vec();
    for s in &spec.prepare {
        s.validate()?;
        if s.labels() != dest.as_slice() {
            return Err(Error::Dimension("prepared states disagree on their labels".into()));
        }
    }
    let db = spec.prepare[0].dim();
    let mut kraus = Vec::new();
    for (y, (gamma, sigma)) in spec.measure.elements().iter().zip(&spec.prepare).enumerate() {
        let root = psd_sqrt(gamma);
        let (mu, phi) = hermitian_eigen(sigma.matrix());
        for (l, m) in mu.iter().enumerate() {
            if *m <= 1e-14 {
                continue;
            }
            let out_vec = phi.column(l).kronecker(&basis_ket(ny, y)).scale(m.sqrt());
            for k in 0..din {
                let bra = root.row(k);
                let kk = &out_vec * bra;
                if max_abs(&kk) > 0.0 {
                    kraus.push(kk);
                }
            }
        }
    }
    debug_assert!(kraus.iter().all(|k| k.nrows() == db * ny));
    let mut outputs = dest.clone();
    outputs.push(Subsystem::classical(spec.relay_out.clone(), ny));
    let ch = QuantumChannel::new(inputs, outputs, kraus)?;
    let roles = Roles {
        sender_in: spec.sender.iter().map(|l| l.name.clone()).collect(),
        relay_in: spec.relay_in.name.clone(),
        dest_out_1: dest.iter().map(|l| l.name.clone()).collect(),
        dest_out_2: Vec::new(),
        relay_out: spec.relay_out.clone(),
    };
    let mut rc = RelayChannel::new(ch, roles)?;
    rc.constructed_hadamard = true;
    Ok(rc)
}

/// Classical-quantum relay: classical inputs `(x, x₁)` select a tabulated
/// output state on `(B…, E)`. `table` is row-major over `(x, x₁)`.
pub fn make_cq_relay(
    sender: Subsystem,
    relay_in: Subsystem,
    table: &[DensityOperator],
    relay_out: &str,
) -> Result<RelayChannel> {
    let sender = Subsystem::classical(sender.name, sender.dim);
    let relay_in = Subsystem::classical(relay_in.name, relay_in.dim);
    let din = sender.dim * relay_in.dim;
    if table.len() != din {
        return Err(Error::Dimension(format!("table has {} entries for {din} input pairs", table.len())));
    }
    let outputs = table[0].labels().to_vec();
    for s in table {
        s.validate()?;
        if s.labels() != outputs.as_slice() {
            return Err(Error::Dimension("table states disagree on their labels".into()));
        }
    }
    let mut kraus = Vec::new();
    for (x, s) in table.iter().enumerate() {
        let (mu, phi) = hermitian_eigen(s.matrix());
        for (l, m) in mu.iter().enumerate() {
            if *m <= 1e-14 {
                continue;
            }
            let col = phi.column(l).scale(m.sqrt());
            let mut k = CMatrix::zeros(s.dim(), din);
            k.set_column(x, &col);
            kraus.push(k);
        }
    }
    let dest: Vec<String> = outputs.iter().filter(|l| l.name != relay_out).map(|l| l.name.clone()).collect();
    if dest.len() + 1 != outputs.len() {
        return Err(Error::UnknownLabel(relay_out.to_string()));
    }
    let roles = Roles {
        sender_in: vec![sender.name.clone()],
        relay_in: relay_in.name.clone(),
        dest_out_1: dest,
        dest_out_2: Vec::new(),
        relay_out: relay_out.to_string(),
    };
    let ch = QuantumChannel::new(vec![sender, relay_in], outputs, kraus)?;
    RelayChannel::new(ch, roles)
}

/// Markov chain test `I(R;B|E)` on the Choi state over the joint input.
pub fn is_degraded(ch: &RelayChannel) -> Result<Degradedness> {
    if let Some(d) = ch.degraded.get() {
        return Ok(*d);
    }
    let xi = ch.channel.choi_state()?;
    let refs: Vec<String> = ch.channel.input_names().iter().map(|n| qlin::reference_name(n)).collect();
    let dest = ch.roles.dest();
    let residual = conditional_mutual_information(&xi, &refs, &dest, std::slice::from_ref(&ch.roles.relay_out))?;
    let d = Degradedness { degraded: residual <= DEGRADED_THRESHOLD, residual };
    Ok(*ch.degraded.get_or_init(|| d))
}

/// Choi product test for `N = M_{A→B₁E} ⊗ P_{D→B₂}`.
pub fn is_orc(ch: &RelayChannel) -> Result<&OrcReport> {
    if let Some(r) = ch.orc.get() {
        return Ok(r);
    }
    let roles = &ch.roles;
    if roles.dest_out_1.is_empty() || roles.dest_out_2.is_empty() {
        return Err(Error::Structure("no B₁/B₂ split declared; orthogonal components not testable".into()));
    }
    let xi = ch.channel.choi_state()?;
    let r_sender: Vec<String> = roles.sender_in.iter().map(|n| qlin::reference_name(n)).collect();
    let r_relay = qlin::reference_name(&roles.relay_in);
    let mut left: Vec<String> = r_sender.clone();
    left.extend(roles.dest_out_1.iter().cloned());
    left.push(roles.relay_out.clone());
    let mut right = vec![r_relay];
    right.extend(roles.dest_out_2.iter().cloned());
    let xl = xi.partial_trace(&left)?;
    let xr = xi.partial_trace(&right)?;
    let product = xl.tensor(&xr)?;
    let trace_distance = product.trace_distance(&xi)?;

    let fixed_relay: Vec<(&str, usize)> = vec![(roles.relay_in.as_str(), 0)];
    let traced_b2: Vec<&str> = roles.dest_out_2.iter().map(|s| s.as_str()).collect();
    let broadcast = ch.channel.restrict(&fixed_relay, &traced_b2)?;
    let fixed_sender: Vec<(&str, usize)> = roles.sender_in.iter().map(|s| (s.as_str(), 0)).collect();
    let mut traced_rest: Vec<&str> = roles.dest_out_1.iter().map(|s| s.as_str()).collect();
    traced_rest.push(&roles.relay_out);
    let direct = ch.channel.restrict(&fixed_sender, &traced_rest)?;
    let report = OrcReport { is_orc: trace_distance <= ORC_THRESHOLD, trace_distance, broadcast, direct };
    Ok(ch.orc.get_or_init(|| report))
}

/// Degraded with a classical relay output.
pub fn is_hadamard(ch: &RelayChannel) -> Result<bool> {
    Ok(ch.relay_out_label().is_classical() && is_degraded(ch)?.degraded)
}

/// Whether the channel only depends on the computational-basis diagonal of
/// its inputs, i.e. `N ∘ Δ = N` for the full dephasing `Δ`.
pub fn is_classical_quantum(ch: &RelayChannel) -> Result<bool> {
    let inputs = ch.channel.inputs().to_vec();
    let d: usize = inputs.iter().map(|l| l.dim).product();
    let dephase = QuantumChannel::new(inputs.clone(), inputs, (0..d).map(|i| basis_projector(d, i)).collect())?;
    let a = ch.channel.choi_state()?;
    let b = dephase.then(&ch.channel)?.choi_state()?;
    Ok(max_abs(&(a.matrix() - b.matrix())) <= 1e-9)
}

/// All classifier results in one record.
#[derive(Clone, Debug)]
pub struct StructureReport {
    pub degraded: Degradedness,
    /// `None` when no B₁/B₂ split is declared.
    pub orc: Option<(bool, f64)>,
    pub hadamard: bool,
    pub classical_quantum: bool,
}

pub fn classify(ch: &RelayChannel) -> Result<StructureReport> {
    let degraded = is_degraded(ch)?;
    let orc = match is_orc(ch) {
        Ok(r) => Some((r.is_orc, r.trace_distance)),
        Err(Error::Structure(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(StructureReport {
        degraded,
        orc,
        hadamard: ch.relay_out_label().is_classical() && degraded.degraded,
        classical_quantum: is_classical_quantum(ch)?,
    })
}
