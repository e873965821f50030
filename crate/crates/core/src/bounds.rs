//! Achievable-rate evaluators for a fixed ensemble and auxiliary choice.
//!
//! Each evaluator builds the relevant classical-quantum state and returns
//! every bracket term next to the minimum, so bottlenecks stay visible.
//! Maximization lives in [`crate::optimizer`].
//!
//! Register names are fixed by convention: partial decode-forward reads
//! `U` (optional), `X0` and `X1`; the sender table hangs off `X0` and the
//! relay table off `X1`.

use std::collections::BTreeMap;

use crate::channels::{is_hadamard, is_orc, RelayChannel};
use crate::entropy::{
    binary_convolution, binary_entropy, coherent_information, conditional_mutual_information, mutual_information,
};
use crate::error::{Error, Result};
use crate::qlin::{c, CMatrix, DensityOperator, Povm, QuantumChannel, Subsystem};

pub const U: &str = "U";
pub const X0: &str = "X0";
pub const X1: &str = "X1";
pub const X2: &str = "X2";
pub const Y1: &str = "Y1";
pub const Z1: &str = "Z1";

/// Slack on the measure-forward rate constraint.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Minimum purity for assist-forward input states.
pub const PURITY_TOL: f64 = 1e-9;
const PMF_TOL: f64 = 1e-12;

/// Joint pmf over classical registers with per-register input states.
#[derive(Clone, Debug)]
pub struct Ensemble {
    registers: Vec<Subsystem>,
    pmf: Vec<f64>,
    tables: BTreeMap<String, Vec<DensityOperator>>,
}

impl Ensemble {
    /// `pmf` is row-major over `registers` (first register most significant).
    pub fn new(
        registers: Vec<Subsystem>,
        pmf: Vec<f64>,
        tables: BTreeMap<String, Vec<DensityOperator>>,
    ) -> Result<Self> {
        let registers: Vec<Subsystem> = registers.into_iter().map(|r| Subsystem::classical(r.name, r.dim)).collect();
        crate::qlin::validate_labels(&registers)?;
        let n: usize = registers.iter().map(|r| r.dim).product();
        if pmf.len() != n {
            return Err(Error::InvalidDistribution(format!("pmf has {} entries for {n} joint symbols", pmf.len())));
        }
        check_pmf(&pmf)?;
        for (name, states) in &tables {
            let reg = registers
                .iter()
                .find(|r| &r.name == name)
                .ok_or_else(|| Error::UnknownLabel(name.clone()))?;
            if states.len() != reg.dim {
                return Err(Error::Dimension(format!(
                    "register `{name}` has {} symbols but {} states",
                    reg.dim,
                    states.len()
                )));
            }
            for s in states {
                s.validate()?;
                if s.labels() != states[0].labels() {
                    return Err(Error::Dimension(format!("states of `{name}` disagree on their labels")));
                }
            }
        }
        Ok(Self { registers, pmf, tables })
    }

    /// One register with its marginal and states.
    pub fn single(register: Subsystem, pmf: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        let name = register.name.clone();
        Self::new(vec![register], pmf, BTreeMap::from([(name, states)]))
    }

    pub fn registers(&self) -> &[Subsystem] {
        &self.registers
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn tables(&self) -> &BTreeMap<String, Vec<DensityOperator>> {
        &self.tables
    }

    pub fn table(&self, name: &str) -> Option<&[DensityOperator]> {
        self.tables.get(name).map(|v| v.as_slice())
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.registers.iter().position(|r| r.name == name)
    }

    /// Per-register symbols of a joint index.
    pub fn digits(&self, mut joint: usize) -> Vec<usize> {
        let mut out = vec![0; self.registers.len()];
        for (k, r) in self.registers.iter().enumerate().rev() {
            out[k] = joint % r.dim;
            joint /= r.dim;
        }
        out
    }

    pub fn marginal(&self, name: &str) -> Result<Vec<f64>> {
        let k = self.position(name).ok_or_else(|| Error::UnknownLabel(name.to_string()))?;
        let mut out = vec![0.0; self.registers[k].dim];
        for (j, p) in self.pmf.iter().enumerate() {
            out[self.digits(j)[k]] += p;
        }
        Ok(out)
    }

    fn register_states(&self, name: &str) -> Result<&[DensityOperator]> {
        self.table(name)
            .ok_or_else(|| Error::Structure(format!("ensemble has no state table for `{name}`")))
    }
}

pub(crate) fn check_pmf(pmf: &[f64]) -> Result<()> {
    if pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidDistribution("negative or non-finite probability".into()));
    }
    let s: f64 = pmf.iter().sum();
    if (s - 1.0).abs() > PMF_TOL {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {s}")));
    }
    Ok(())
}

/// Uniform pmf of size `n`.
pub fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Common interface of evaluator records.
pub trait BoundRecord {
    fn rate(&self) -> f64;
    /// Terms entering the outer minimum.
    fn bracket(&self) -> Vec<(&'static str, f64)>;
    /// Every diagnostic column, bracket terms included.
    fn terms(&self) -> Vec<(&'static str, f64)> {
        self.bracket()
    }
    fn feasible(&self) -> bool {
        true
    }
    /// Bracket terms within `tol` of the smallest one.
    fn binding(&self, tol: f64) -> Vec<&'static str> {
        let b = self.bracket();
        let m = b.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
        b.into_iter().filter(|t| t.1 <= m + tol).map(|t| t.0).collect()
    }
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdfRecord {
    pub rate: f64,
    /// `I(X₀X₁;B)`
    pub multicast: f64,
    /// `I(U;E|X₁) + I(X₀;B|X₁U)`
    pub relay_plus_direct: f64,
    /// `I(U;E|X₁)`
    pub relay_decode: f64,
    /// `I(X₀;B|X₁U)`
    pub direct: f64,
}

impl BoundRecord for PdfRecord {
    fn rate(&self) -> f64 {
        self.rate
    }
    fn bracket(&self) -> Vec<(&'static str, f64)> {
        vec![("multicast", self.multicast), ("relay_plus_direct", self.relay_plus_direct)]
    }
    fn terms(&self) -> Vec<(&'static str, f64)> {
        let mut t = self.bracket();
        t.push(("relay_decode", self.relay_decode));
        t.push(("direct", self.direct));
        t
    }
}

/// Two-term record shared by full decode-forward and the Hadamard capacity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DfRecord {
    pub rate: f64,
    /// `I(X₀X₁;B)`
    pub multicast: f64,
    /// `I(X₀;E|X₁)`, with `E = Y₁` for Hadamard channels.
    pub relay_decode: f64,
}

impl BoundRecord for DfRecord {
    fn rate(&self) -> f64 {
        self.rate
    }
    fn bracket(&self) -> Vec<(&'static str, f64)> {
        vec![("multicast", self.multicast), ("relay_decode", self.relay_decode)]
    }
}

/// Output states `N(θ^{x₀} ⊗ ζ^{x₁})`, computed once per input pair.
struct OutputCache<'a> {
    ch: &'a RelayChannel,
    sender: &'a [DensityOperator],
    relay: &'a [DensityOperator],
    out: Vec<Option<CMatrix>>,
}

impl<'a> OutputCache<'a> {
    fn new(ch: &'a RelayChannel, sender: &'a [DensityOperator], relay: &'a [DensityOperator]) -> Result<Self> {
        check_table_labels(ch, sender, &ch.roles().sender_in, X0)?;
        check_table_labels(ch, relay, std::slice::from_ref(&ch.roles().relay_in), X1)?;
        Ok(Self { ch, sender, relay, out: vec![None; sender.len() * relay.len()] })
    }

    fn get(&mut self, x0: usize, x1: usize) -> Result<&CMatrix> {
        let k = x0 * self.relay.len() + x1;
        if self.out[k].is_none() {
            let o = self.ch.output(&self.sender[x0], &self.relay[x1])?;
            let names = self.ch.channel().output_names();
            self.out[k] = Some(o.reorder(&names)?.into_matrix());
        }
        Ok(self.out[k].as_ref().expect("filled above"))
    }
}

/// Tables must act on exactly the expected channel inputs; a table reaching
/// into the other party's inputs would describe a non-product input.
fn check_table_labels(ch: &RelayChannel, table: &[DensityOperator], want: &[String], reg: &str) -> Result<()> {
    let have: Vec<&str> = table[0].names();
    let mut a: Vec<&str> = have.clone();
    let mut b: Vec<&str> = want.iter().map(|s| s.as_str()).collect();
    a.sort_unstable();
    b.sort_unstable();
    if a == b {
        for name in &have {
            let l = table[0].label(name).expect("present");
            let ci = ch.channel().input(name).expect("present");
            if l.dim != ci.dim {
                return Err(Error::Dimension(format!("`{name}` has dimension {} but the channel expects {}", l.dim, ci.dim)));
            }
        }
        return Ok(());
    }
    let inputs = ch.channel().input_names();
    if have.iter().all(|n| inputs.contains(n)) {
        return Err(Error::NonProductInput(format!(
            "states of `{reg}` act on {have:?}; expected exactly {b:?}"
        )));
    }
    Err(Error::Structure(format!("states of `{reg}` act on {have:?}; expected exactly {b:?}")))
}

/// `ω_{registers, B, E} = Σ p |r⟩⟨r| ⊗ N(θ^{x₀} ⊗ ζ^{x₁})` over the
/// ensemble's registers.
pub fn relay_output_state(ch: &RelayChannel, ens: &Ensemble) -> Result<DensityOperator> {
    let k0 = ens.position(X0).ok_or_else(|| Error::UnknownLabel(X0.into()))?;
    let k1 = ens.position(X1).ok_or_else(|| Error::UnknownLabel(X1.into()))?;
    let mut cache = OutputCache::new(ch, ens.register_states(X0)?, ens.register_states(X1)?)?;
    let outputs = ch.channel().outputs().to_vec();
    DensityOperator::classical_quantum(ens.registers(), &outputs, |j| {
        let p = ens.pmf()[j];
        if p == 0.0 {
            return Ok(None);
        }
        let d = ens.digits(j);
        Ok(Some((p, cache.get(d[k0], d[k1])?.clone())))
    })
}

fn names(v: &[String]) -> Vec<&str> {
    v.iter().map(|s| s.as_str()).collect()
}

/// Partial decode-forward: `min{I(X₀X₁;B), I(U;E|X₁) + I(X₀;B|X₁U)}`.
pub fn eval_pdf(ch: &RelayChannel, ens: &Ensemble) -> Result<PdfRecord> {
    let omega = relay_output_state(ch, ens)?;
    let dest = ch.roles().dest();
    let b = names(&dest);
    let e = [ch.roles().relay_out.as_str()];
    let multicast = mutual_information(&omega, &[X0, X1], &b)?;
    let (relay_decode, direct) = if ens.position(U).is_some() {
        (
            conditional_mutual_information(&omega, &[U], &e, &[X1])?,
            conditional_mutual_information(&omega, &[X0], &b, &[X1, U])?,
        )
    } else {
        (0.0, conditional_mutual_information(&omega, &[X0], &b, &[X1])?)
    };
    let relay_plus_direct = relay_decode + direct;
    Ok(PdfRecord { rate: multicast.min(relay_plus_direct), multicast, relay_plus_direct, relay_decode, direct })
}

/// Full decode-forward: `min{I(X₀X₁;B), I(X₀;E|X₁)}`.
pub fn eval_full_df(ch: &RelayChannel, ens: &Ensemble) -> Result<DfRecord> {
    let omega = relay_output_state(ch, ens)?;
    let dest = ch.roles().dest();
    let b = names(&dest);
    let multicast = mutual_information(&omega, &[X0, X1], &b)?;
    let relay_decode = conditional_mutual_information(&omega, &[X0], &[ch.roles().relay_out.as_str()], &[X1])?;
    Ok(DfRecord { rate: multicast.min(relay_decode), multicast, relay_decode })
}

/// Capacity objective of a Hadamard relay: `min{I(X₀X₁;B), I(X₀;Y₁|X₁)}`.
pub fn eval_hadamard_capacity(ch: &RelayChannel, ens: &Ensemble) -> Result<DfRecord> {
    if !is_hadamard(ch)? {
        return Err(Error::Structure("channel is not a Hadamard relay (degraded with classical relay output)".into()));
    }
    eval_full_df(ch, ens)
}

/// Holevo information `I(X₀;B)` of the ensemble's output state.
pub fn holevo_information(ch: &RelayChannel, ens: &Ensemble) -> Result<f64> {
    let omega = relay_output_state(ch, ens)?;
    let dest = ch.roles().dest();
    mutual_information(&omega, &[X0], &names(&dest))
}

/// `1 − h(p ∗ q/2)`.
pub fn eval_depolarizing_closed_form(p: f64, q: f64) -> Result<f64> {
    for (n, v) in [("p", p), ("q", q)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!("{n} = {v} is outside [0, 1]")));
        }
    }
    Ok(1.0 - binary_entropy(binary_convolution(p, q / 2.0)))
}

/// Measure-forward configuration: product sender/relay ensembles, a relay
/// POVM on E and a classical compressor `p(z₁|x₁,y₁)`.
#[derive(Clone, Debug)]
pub struct MFConfig {
    pub ens0: Ensemble,
    pub ens1: Ensemble,
    pub relay_povm: Povm,
    /// Rows indexed by `x₁·|Y₁| + y₁`, each a pmf over `Z₁`.
    pub compressor: Vec<Vec<f64>>,
}

impl MFConfig {
    pub fn new(ens0: Ensemble, ens1: Ensemble, relay_povm: Povm, compressor: Vec<Vec<f64>>) -> Result<Self> {
        for (e, reg) in [(&ens0, X0), (&ens1, X1)] {
            if e.registers().len() != 1 || e.registers()[0].name != reg {
                return Err(Error::Structure(format!("measure-forward ensembles need a single register `{reg}`")));
            }
        }
        let rows = ens1.registers()[0].dim * relay_povm.len();
        if compressor.len() != rows {
            return Err(Error::Dimension(format!("compressor has {} rows, expected {rows}", compressor.len())));
        }
        let nz = compressor[0].len();
        for r in &compressor {
            if r.len() != nz {
                return Err(Error::Dimension("compressor rows differ in length".into()));
            }
            check_pmf(r)?;
        }
        Ok(Self { ens0, ens1, relay_povm, compressor })
    }

    pub fn card_z1(&self) -> usize {
        self.compressor[0].len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MfRecord {
    /// `I(X₀;Z₁B|X₁)`
    pub rate: f64,
    pub feasible: bool,
    /// `I(Z₁;Y₁|X₁B)`
    pub lhs_constraint: f64,
    /// `I(X₁;B)`
    pub rhs_constraint: f64,
}

impl BoundRecord for MfRecord {
    fn rate(&self) -> f64 {
        self.rate
    }
    fn bracket(&self) -> Vec<(&'static str, f64)> {
        vec![("objective", self.rate)]
    }
    fn terms(&self) -> Vec<(&'static str, f64)> {
        vec![("objective", self.rate), ("lhs_constraint", self.lhs_constraint), ("rhs_constraint", self.rhs_constraint)]
    }
    fn feasible(&self) -> bool {
        self.feasible
    }
}

/// `tr_E[(1 ⊗ Γ_y) ω]` for each POVM element, with E the last factor.
fn measure_last(omega: &CMatrix, de: usize, povm: &Povm) -> Vec<CMatrix> {
    let db = omega.nrows() / de;
    povm.elements()
        .iter()
        .map(|g| {
            CMatrix::from_fn(db, db, |i, j| {
                let mut s = c(0.0, 0.0);
                for e in 0..de {
                    for f in 0..de {
                        s += omega[(i * de + e, j * de + f)] * g[(f, e)];
                    }
                }
                s
            })
        })
        .collect()
}

/// The state `ω_{X₀X₁Y₁Z₁B}` of the measure-forward bound.
pub fn mf_state(ch: &RelayChannel, cfg: &MFConfig) -> Result<DensityOperator> {
    let e = ch.relay_out_label().clone();
    if cfg.relay_povm.dim() != e.dim {
        return Err(Error::Dimension(format!(
            "relay POVM acts on dimension {} but `{}` has dimension {}",
            cfg.relay_povm.dim(),
            e.name,
            e.dim
        )));
    }
    let sender = cfg.ens0.register_states(X0)?;
    let relay = cfg.ens1.register_states(X1)?;
    let mut cache = OutputCache::new(ch, sender, relay)?;
    let dest = ch.dest_labels();
    let mut order: Vec<&str> = dest.iter().map(|l| l.name.as_str()).collect();
    order.push(&e.name);
    let (n0, n1, ny, nz) = (sender.len(), relay.len(), cfg.relay_povm.len(), cfg.card_z1());
    let mut blocks = Vec::with_capacity(n0 * n1);
    let out_names = ch.channel().outputs().to_vec();
    for x0 in 0..n0 {
        for x1 in 0..n1 {
            if cfg.ens0.pmf()[x0] * cfg.ens1.pmf()[x1] == 0.0 {
                blocks.push(None);
                continue;
            }
            let m = cache.get(x0, x1)?.clone();
            let w = DensityOperator::from_parts(out_names.clone(), m)?.reorder(&order)?;
            blocks.push(Some(measure_last(w.matrix(), e.dim, &cfg.relay_povm)));
        }
    }
    let registers = vec![
        Subsystem::classical(X0, n0),
        Subsystem::classical(X1, n1),
        Subsystem::classical(Y1, ny),
        Subsystem::classical(Z1, nz),
    ];
    DensityOperator::classical_quantum(&registers, &dest, |j| {
        let (z, rest) = (j % nz, j / nz);
        let (y, rest) = (rest % ny, rest / ny);
        let (x1, x0) = (rest % n1, rest / n1);
        let p = cfg.ens0.pmf()[x0] * cfg.ens1.pmf()[x1] * cfg.compressor[x1 * ny + y][z];
        if p == 0.0 {
            return Ok(None);
        }
        let sigma = &blocks[x0 * n1 + x1].as_ref().expect("positive weight")[y];
        Ok(Some((p, sigma.clone())))
    })
}

/// Measure-forward objective `I(X₀;Z₁B|X₁)` and its rate constraint
/// `I(Z₁;Y₁|X₁B) ≤ I(X₁;B)`. Infeasible points are flagged, not rejected.
pub fn eval_mf(ch: &RelayChannel, cfg: &MFConfig) -> Result<MfRecord> {
    let omega = mf_state(ch, cfg)?;
    let dest = ch.roles().dest();
    let b = names(&dest);
    let mut z1b = vec![Z1];
    z1b.extend(&b);
    let mut x1b = vec![X1];
    x1b.extend(&b);
    let rate = conditional_mutual_information(&omega, &[X0], &z1b, &[X1])?;
    let lhs = conditional_mutual_information(&omega, &[Z1], &[Y1], &x1b)?;
    let rhs = mutual_information(&omega, &[X1], &b)?;
    Ok(MfRecord { rate, feasible: lhs <= rhs + FEASIBILITY_TOL, lhs_constraint: lhs, rhs_constraint: rhs })
}

/// The measure-forward configuration for the depolarizing relay: uniform
/// computational-basis inputs on A and D, computational relay POVM, and
/// `Z₁ = Y₁ ⊕ Bernoulli(α)`.
pub fn depolarizing_mf_config(alpha: f64) -> Result<MFConfig> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} is outside [0, 1]")));
    }
    let basis = |name: &str| -> Result<Vec<DensityOperator>> {
        (0..2).map(|i| DensityOperator::basis(Subsystem::quantum(name, 2), i)).collect()
    };
    let ens0 = Ensemble::single(Subsystem::classical(X0, 2), uniform(2), basis("A")?)?;
    let ens1 = Ensemble::single(Subsystem::classical(X1, 2), uniform(2), basis("D")?)?;
    let flip = |y: usize| if y == 0 { vec![1.0 - alpha, alpha] } else { vec![alpha, 1.0 - alpha] };
    let compressor = (0..2).flat_map(|_| (0..2).map(flip)).collect();
    MFConfig::new(ens0, ens1, Povm::computational(2), compressor)
}

/// Assist-forward configuration: pure states on `(G₀, G₁, sender…)` indexed
/// by `X₁` and pure states on `(G₂, relay input)` indexed by `X₂`.
#[derive(Clone, Debug)]
pub struct AFConfig {
    pub ens1: Ensemble,
    pub ens2: Ensemble,
    pub g0: String,
    pub g1: String,
    pub g2: String,
    /// Floor a negative `Q(M,θ)` at zero inside the limited-assistance term.
    pub floor_q: bool,
}

impl AFConfig {
    pub fn new(ens1: Ensemble, ens2: Ensemble) -> Result<Self> {
        let cfg = Self { ens1, ens2, g0: "G0".into(), g1: "G1".into(), g2: "G2".into(), floor_q: false };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (e, reg) in [(&self.ens1, X1), (&self.ens2, X2)] {
            if e.registers().len() != 1 || e.registers()[0].name != reg {
                return Err(Error::Structure(format!("assist-forward ensembles need a single register `{reg}`")));
            }
            for s in e.register_states(reg)? {
                let purity = s.purity();
                if purity < 1.0 - PURITY_TOL {
                    return Err(Error::InvalidState(format!("`{reg}` state has purity {purity:.12}; pure states required")));
                }
            }
        }
        Ok(())
    }
}

/// Entanglement-distribution rate `Q(M,θ) = min{I(G₀⟩B₁X₁), I(G₁⟩EX₁)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QAssist {
    pub value: f64,
    /// `I(G₀⟩B₁X₁)`
    pub receiver: f64,
    /// `I(G₁⟩EX₁)`
    pub relay: f64,
}

/// `Σ p |x⟩⟨x| ⊗ (id ⊗ ch)(state_x)` with the quantum part in `order`.
fn push_through(ch: &QuantumChannel, ens: &Ensemble, reg: &str, order: &[&str]) -> Result<DensityOperator> {
    let states = ens.register_states(reg)?;
    let mut outs = Vec::with_capacity(states.len());
    for s in states {
        outs.push(ch.apply(s)?.reorder(order)?);
    }
    let quantum = outs[0].labels().to_vec();
    DensityOperator::classical_quantum(ens.registers(), &quantum, |x| {
        let p = ens.pmf()[x];
        Ok((p > 0.0).then(|| (p, outs[x].matrix().clone())))
    })
}

fn check_af_labels(states: &[DensityOperator], expected: &[&str], reg: &str) -> Result<()> {
    let mut have = states[0].names();
    let mut want = expected.to_vec();
    have.sort_unstable();
    want.sort_unstable();
    if have != want {
        return Err(Error::Structure(format!("states of `{reg}` act on {have:?}; expected {want:?}")));
    }
    Ok(())
}

/// `Q(M,θ)` for a broadcast channel `M: A → B₁ E` whose relay output is
/// `relay_out`. `ens1` carries states on `(g0, g1, A…)` indexed by `X1`.
pub fn eval_q_assist(m: &QuantumChannel, relay_out: &str, ens1: &Ensemble, g0: &str, g1: &str) -> Result<QAssist> {
    let mut expected = vec![g0, g1];
    expected.extend(m.input_names());
    check_af_labels(ens1.register_states(X1)?, &expected, X1)?;
    let b1: Vec<&str> = m.output_names().into_iter().filter(|n| *n != relay_out).collect();
    if b1.len() + 1 != m.outputs().len() {
        return Err(Error::UnknownLabel(relay_out.to_string()));
    }
    let mut order = vec![g0, g1];
    order.extend(&b1);
    order.push(relay_out);
    let theta = push_through(m, ens1, X1, &order)?;
    let mut b1x1 = b1.clone();
    b1x1.push(X1);
    let receiver = coherent_information(&theta, &[g0], &b1x1)?;
    let relay = coherent_information(&theta, &[g1], &[relay_out, X1])?;
    Ok(QAssist { value: receiver.min(relay), receiver, relay })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AfRecord {
    /// `max(0, min of the three terms)`
    pub rate: f64,
    /// `I(X₁;E)`
    pub t_relay_decode: f64,
    /// `I(X₂G₂;B₂)`
    pub t_ea_full: f64,
    /// `I(X₂;B₂) + I(G₂⟩B₂X₂) + Q(M,θ)`
    pub t_ea_limited: f64,
    pub q: QAssist,
    /// `I(X₂;B₂)`
    pub direct_holevo: f64,
    /// `I(G₂⟩B₂X₂)`
    pub direct_coherent: f64,
}

impl BoundRecord for AfRecord {
    fn rate(&self) -> f64 {
        self.rate
    }
    fn bracket(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("relay_decode", self.t_relay_decode),
            ("ea_full", self.t_ea_full),
            ("ea_limited", self.t_ea_limited),
        ]
    }
    fn terms(&self) -> Vec<(&'static str, f64)> {
        let mut t = self.bracket();
        t.extend([
            ("q_assist", self.q.value),
            ("q_receiver", self.q.receiver),
            ("q_relay", self.q.relay),
            ("direct_holevo", self.direct_holevo),
            ("direct_coherent", self.direct_coherent),
        ]);
        t
    }
}

/// Assist-forward rate for a channel with orthogonal receiver components.
pub fn eval_af(ch: &RelayChannel, cfg: &AFConfig) -> Result<AfRecord> {
    cfg.validate()?;
    let orc = is_orc(ch)?;
    if !orc.is_orc {
        return Err(Error::Structure(format!(
            "channel does not have orthogonal receiver components (Choi product distance {:.3e})",
            orc.trace_distance
        )));
    }
    let roles = ch.roles();
    let e = roles.relay_out.as_str();
    let q = eval_q_assist(&orc.broadcast, e, &cfg.ens1, &cfg.g0, &cfg.g1)?;

    let mut order = vec![cfg.g0.as_str(), cfg.g1.as_str()];
    order.extend(names(&roles.dest_out_1));
    order.push(e);
    let theta = push_through(&orc.broadcast, &cfg.ens1, X1, &order)?;
    let t_relay_decode = mutual_information(&theta, &[X1], &[e])?;

    let mut expected = vec![cfg.g2.as_str()];
    expected.push(roles.relay_in.as_str());
    check_af_labels(cfg.ens2.register_states(X2)?, &expected, X2)?;
    let b2 = names(&roles.dest_out_2);
    let mut order = vec![cfg.g2.as_str()];
    order.extend(&b2);
    let zeta = push_through(&orc.direct, &cfg.ens2, X2, &order)?;
    let g2 = [cfg.g2.as_str()];
    let t_ea_full = mutual_information(&zeta, &[X2, cfg.g2.as_str()], &b2)?;
    let direct_holevo = mutual_information(&zeta, &[X2], &b2)?;
    let mut b2x2 = b2.clone();
    b2x2.push(X2);
    let direct_coherent = coherent_information(&zeta, &g2, &b2x2)?;
    let qv = if cfg.floor_q { q.value.max(0.0) } else { q.value };
    let t_ea_limited = direct_holevo + direct_coherent + qv;
    let rate = min_of(&[t_relay_decode, t_ea_full, t_ea_limited]).max(0.0);
    Ok(AfRecord { rate, t_relay_decode, t_ea_full, t_ea_limited, q, direct_holevo, direct_coherent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{make_depolarizing_relay, make_wired_relay};

    #[test]
    fn closed_form_corners() {
        assert!((eval_depolarizing_closed_form(0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        for q in [0.0, 0.3, 1.0] {
            assert!(eval_depolarizing_closed_form(0.5, q).unwrap().abs() < 1e-12);
        }
        assert!(eval_depolarizing_closed_form(1.5, 0.0).is_err());
    }

    #[test]
    fn depolarizing_mf_matches_closed_form() {
        let (p, q) = (0.1, 0.3);
        let ch = make_depolarizing_relay(p, q).unwrap();
        let rec = eval_mf(&ch, &depolarizing_mf_config(q / 2.0).unwrap()).unwrap();
        // p ∗ q/2 = 0.9·0.15 + 0.1·0.85 = 0.22
        let h = -(0.22f64 * 0.22f64.log2() + 0.78 * 0.78f64.log2());
        assert!((rec.rate - (1.0 - h)).abs() < 1e-9, "{rec:?}");
        assert!((rec.lhs_constraint - rec.rhs_constraint).abs() < 1e-9);
        assert!(rec.feasible);
    }

    #[test]
    fn mf_alpha_zero_is_infeasible_and_half_is_useless() {
        let ch = make_depolarizing_relay(0.2, 0.4).unwrap();
        let r0 = eval_mf(&ch, &depolarizing_mf_config(0.0).unwrap()).unwrap();
        assert!(!r0.feasible);
        assert!((r0.lhs_constraint - 1.0).abs() < 1e-9);
        let r = eval_mf(&ch, &depolarizing_mf_config(0.5).unwrap()).unwrap();
        assert!(r.rate.abs() < 1e-9 && r.feasible);
    }

    #[test]
    fn mf_rejects_povm_on_wrong_space() {
        let ch = make_depolarizing_relay(0.2, 0.4).unwrap();
        let mut cfg = depolarizing_mf_config(0.1).unwrap();
        cfg.relay_povm = Povm::computational(4);
        cfg.compressor = vec![vec![1.0]; 8];
        assert!(matches!(eval_mf(&ch, &cfg), Err(Error::Dimension(_))));
    }

    #[test]
    fn non_product_table_rejected() {
        let ch = make_depolarizing_relay(0.2, 0.4).unwrap();
        let joint: Vec<DensityOperator> = (0..2)
            .map(|i| {
                DensityOperator::basis(Subsystem::quantum("A", 2), i)
                    .unwrap()
                    .tensor(&DensityOperator::basis(Subsystem::quantum("D", 2), i).unwrap())
                    .unwrap()
            })
            .collect();
        let zeta: Vec<DensityOperator> =
            vec![DensityOperator::basis(Subsystem::quantum("D", 2), 0).unwrap()];
        let ens = Ensemble::new(
            vec![Subsystem::classical(X0, 2), Subsystem::classical(X1, 1)],
            uniform(2),
            BTreeMap::from([(X0.to_string(), joint), (X1.to_string(), zeta)]),
        )
        .unwrap();
        assert!(matches!(eval_pdf(&ch, &ens), Err(Error::NonProductInput(_))));
    }

    #[test]
    fn ensemble_marginals_and_digits() {
        let ens = Ensemble::new(
            vec![Subsystem::classical("U", 2), Subsystem::classical("X0", 3)],
            vec![0.1, 0.2, 0.3, 0.0, 0.25, 0.15],
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(ens.digits(4), vec![1, 1]);
        let m = ens.marginal("X0").unwrap();
        assert!((m[0] - 0.1).abs() < 1e-15 && (m[1] - 0.45).abs() < 1e-15 && (m[2] - 0.45).abs() < 1e-15);
        assert!(Ensemble::new(vec![Subsystem::classical("U", 2)], vec![0.5, 0.6], BTreeMap::new()).is_err());
    }

    #[test]
    fn af_rejects_mixed_states_and_non_orc() {
        let mixed = DensityOperator::maximally_mixed(vec![
            Subsystem::quantum("G0", 1),
            Subsystem::quantum("G1", 1),
            Subsystem::quantum("A", 2),
        ])
        .unwrap();
        let ens1 = Ensemble::single(Subsystem::classical(X1, 1), vec![1.0], vec![mixed]).unwrap();
        let pure = DensityOperator::basis(Subsystem::quantum("D", 2), 0).unwrap();
        let ens2 = Ensemble::single(Subsystem::classical(X2, 1), vec![1.0], vec![pure]).unwrap();
        assert!(matches!(AFConfig::new(ens1, ens2), Err(Error::InvalidState(_))));
        let _ = make_wired_relay().unwrap();
    }
}
