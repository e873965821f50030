//! Random-restart simplex maximization of the rate evaluators over
//! parameterized ensembles with user-chosen cardinalities.
//!
//! Restarts run in parallel. Restart `i` draws its start from a ChaCha
//! stream `i` under the master seed, so results do not depend on thread
//! scheduling or on how many restarts follow it.

pub mod nelder_mead;
pub mod param;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    eval_af, eval_full_df, eval_mf, eval_pdf, AFConfig, BoundRecord, Ensemble, MFConfig, U, X0, X1, X2,
};
use crate::channels::RelayChannel;
use crate::error::{Error, Result};
use crate::qlin::{check_cap, Povm, Subsystem};
use nelder_mead::{minimize, NmOptions};
pub use param::StateKind;
use param::Cursor;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_evals: usize,
    pub seed: u64,
    /// Weight of `max(0, lhs − rhs)` in the penalized measure-forward objective.
    pub penalty_weight: f64,
    /// Allowed constraint violation for a point to count as feasible.
    pub tolerance: f64,
    /// Extra starting points, tried before the random ones.
    #[serde(default)]
    pub initial: Vec<Vec<f64>>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 8, max_evals: 1500, seed: 42, penalty_weight: 10.0, tolerance: 1e-9, initial: Vec::new() }
    }
}

/// Plain rate and constraint violation of one configuration.
#[derive(Clone, Copy, Debug)]
pub struct Evaluation {
    pub rate: f64,
    pub violation: f64,
}

impl Evaluation {
    pub fn of<R: BoundRecord>(r: &R) -> Self {
        Self { rate: r.rate(), violation: 0.0 }
    }
}

/// A parameter space: raw vectors of a fixed length mapped onto configurations.
pub trait Space: Sync {
    type Config: Clone + Send;
    fn len(&self) -> usize;
    fn build(&self, raw: &[f64]) -> Result<Self::Config>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self, raw: &[f64]) -> Result<()> {
        if raw.len() != self.len() {
            return Err(Error::Dimension(format!("expected {} parameters, got {}", self.len(), raw.len())));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RestartTrace {
    pub index: usize,
    pub evals: usize,
    /// Best feasible plain rate found in this restart.
    pub best_rate: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Optimum<C> {
    pub best_rate: f64,
    pub best_raw: Vec<f64>,
    pub best_config: C,
    pub trace: Vec<RestartTrace>,
}

struct RestartOutcome {
    trace: RestartTrace,
    best: Option<(f64, Vec<f64>)>,
    min_violation: f64,
}

fn start_point(seed: u64, index: usize, n: usize, initial: &[Vec<f64>]) -> Vec<f64> {
    if let Some(x) = initial.get(index) {
        return x.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Maximize `objective` over `space`. Points with violation above
/// `cfg.tolerance` are penalized during the search and never reported.
pub fn maximize<S, F>(space: &S, objective: F, cfg: &OptimizerConfig) -> Result<Optimum<S::Config>>
where
    S: Space,
    F: Fn(&S::Config) -> Result<Evaluation> + Sync,
{
    if cfg.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    for x in &cfg.initial {
        space.check(x)?;
    }
    let n = space.len();
    let count = cfg.restarts.max(cfg.initial.len());
    let outcomes: Vec<RestartOutcome> = (0..count)
        .into_par_iter()
        .map(|i| {
            let x0 = start_point(cfg.seed, i, n, &cfg.initial);
            let mut best: Option<(f64, Vec<f64>)> = None;
            let mut min_violation = f64::INFINITY;
            let mut f = |x: &[f64]| -> f64 {
                let Ok(Ok(ev)) = space.build(x).map(|c| objective(&c)) else {
                    return f64::INFINITY;
                };
                if !ev.rate.is_finite() {
                    return f64::INFINITY;
                }
                min_violation = min_violation.min(ev.violation);
                if ev.violation <= cfg.tolerance && best.as_ref().is_none_or(|b| ev.rate > b.0) {
                    best = Some((ev.rate, x.to_vec()));
                }
                -(ev.rate - cfg.penalty_weight * ev.violation.max(0.0))
            };
            let r = minimize(&mut f, &x0, NmOptions { max_evals: cfg.max_evals, ..Default::default() });
            RestartOutcome {
                trace: RestartTrace { index: i, evals: r.evals, best_rate: best.as_ref().map(|b| b.0) },
                best,
                min_violation,
            }
        })
        .collect();
    let mut winner: Option<(f64, Vec<f64>)> = None;
    for o in &outcomes {
        if let Some((r, x)) = &o.best {
            if winner.as_ref().is_none_or(|w| *r > w.0) {
                winner = Some((*r, x.clone()));
            }
        }
    }
    let Some((best_rate, best_raw)) = winner else {
        let violation = outcomes.iter().map(|o| o.min_violation).fold(f64::INFINITY, f64::min);
        return Err(Error::Infeasible { violation, tolerance: cfg.tolerance });
    };
    let best_config = space.build(&best_raw)?;
    Ok(Optimum { best_rate, best_raw, best_config, trace: outcomes.into_iter().map(|o| o.trace).collect() })
}

fn state_table(
    kind: StateKind,
    labels: &[Subsystem],
    card: usize,
    cur: &mut Cursor,
) -> Result<Vec<crate::qlin::DensityOperator>> {
    let d: usize = labels.iter().map(|l| l.dim).product();
    (0..card).map(|x| param::state(kind, labels, cur.take(kind.len(d)), x)).collect()
}

fn check_kind(kind: StateKind, labels: &[Subsystem]) -> Result<()> {
    if kind != StateKind::Basis && labels.iter().any(|l| l.is_classical()) {
        return Err(Error::InvalidParameter(
            "classical channel inputs need basis input states".into(),
        ));
    }
    Ok(())
}

fn dim(labels: &[Subsystem]) -> usize {
    labels.iter().map(|l| l.dim).product()
}

/// Ensembles over `(U, X0, X1)` for partial or full decode-forward.
#[derive(Clone, Debug)]
pub struct PdfSpace {
    pub card_u: usize,
    pub card_x0: usize,
    pub card_x1: usize,
    pub state_kind: StateKind,
    pub sender: Vec<Subsystem>,
    pub relay: Subsystem,
}

impl PdfSpace {
    pub fn for_channel(ch: &RelayChannel, card_u: usize, card_x0: usize, card_x1: usize, kind: StateKind) -> Result<Self> {
        let s = Self {
            card_u,
            card_x0,
            card_x1,
            state_kind: kind,
            sender: ch.sender_labels(),
            relay: ch.relay_in_label().clone(),
        };
        if card_u == 0 || card_x0 == 0 || card_x1 == 0 {
            return Err(Error::InvalidParameter("cardinalities must be at least 1".into()));
        }
        check_kind(kind, &s.sender)?;
        check_kind(kind, std::slice::from_ref(&s.relay))?;
        check_cap(card_u * card_x0 * card_x1 * ch.channel().output_dim())?;
        Ok(s)
    }

    fn joint(&self) -> usize {
        self.card_u * self.card_x0 * self.card_x1
    }

    /// Raw vector of a space with `card_u = new` whose ensemble puts an
    /// independent uniform `U` on top of this space's point.
    pub fn lift_u(&self, raw: &[f64], new: usize) -> Result<Vec<f64>> {
        self.check(raw)?;
        let j = self.joint();
        let pairs = self.card_x0 * self.card_x1;
        let mut logits = vec![0.0; new * pairs];
        for k in 0..pairs {
            // logits of U = 0 for this (x0, x1); same for every new u
            let mut acc = f64::NEG_INFINITY;
            for u in 0..self.card_u {
                acc = log_add(acc, raw[u * pairs + k]);
            }
            for u in 0..new {
                logits[u * pairs + k] = acc;
            }
        }
        let mut out = logits;
        out.extend_from_slice(&raw[j..]);
        Ok(out)
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

impl Space for PdfSpace {
    type Config = Ensemble;

    fn len(&self) -> usize {
        self.joint()
            + self.card_x0 * self.state_kind.len(dim(&self.sender))
            + self.card_x1 * self.state_kind.len(self.relay.dim)
    }

    fn build(&self, raw: &[f64]) -> Result<Ensemble> {
        self.check(raw)?;
        let mut cur = Cursor::new(raw);
        let pmf = param::pmf(cur.take(self.joint()));
        let sender = state_table(self.state_kind, &self.sender, self.card_x0, &mut cur)?;
        let relay = state_table(self.state_kind, std::slice::from_ref(&self.relay), self.card_x1, &mut cur)?;
        let mut registers = Vec::new();
        if self.card_u > 1 {
            registers.push(Subsystem::classical(U, self.card_u));
        }
        registers.push(Subsystem::classical(X0, self.card_x0));
        registers.push(Subsystem::classical(X1, self.card_x1));
        Ensemble::new(registers, pmf, BTreeMap::from([(X0.to_string(), sender), (X1.to_string(), relay)]))
    }
}

/// Measure-forward configurations; the relay POVM can be held fixed.
#[derive(Clone, Debug)]
pub struct MfSpace {
    pub card_x0: usize,
    pub card_x1: usize,
    pub card_y1: usize,
    pub card_z1: usize,
    pub state_kind: StateKind,
    pub sender: Vec<Subsystem>,
    pub relay: Subsystem,
    pub relay_out_dim: usize,
    pub fixed_povm: Option<Povm>,
}

impl MfSpace {
    pub fn for_channel(
        ch: &RelayChannel,
        cards: (usize, usize, usize, usize),
        kind: StateKind,
        fixed_povm: Option<Povm>,
    ) -> Result<Self> {
        let (card_x0, card_x1, mut card_y1, card_z1) = cards;
        if [card_x0, card_x1, card_y1, card_z1].contains(&0) {
            return Err(Error::InvalidParameter("cardinalities must be at least 1".into()));
        }
        let e = ch.relay_out_label().dim;
        if let Some(p) = &fixed_povm {
            if p.dim() != e {
                return Err(Error::Dimension(format!("fixed POVM has dimension {} but E has {e}", p.dim())));
            }
            card_y1 = p.len();
        }
        let s = Self {
            card_x0,
            card_x1,
            card_y1,
            card_z1,
            state_kind: kind,
            sender: ch.sender_labels(),
            relay: ch.relay_in_label().clone(),
            relay_out_dim: e,
            fixed_povm,
        };
        check_kind(kind, &s.sender)?;
        check_kind(kind, std::slice::from_ref(&s.relay))?;
        let b: usize = ch.dest_labels().iter().map(|l| l.dim).product();
        check_cap(card_x0 * card_x1 * card_y1 * card_z1 * b)?;
        Ok(s)
    }

    fn povm_len(&self) -> usize {
        if self.fixed_povm.is_some() {
            0
        } else {
            param::povm_len(self.card_y1, self.relay_out_dim)
        }
    }
}

impl Space for MfSpace {
    type Config = MFConfig;

    fn len(&self) -> usize {
        self.card_x0
            + self.card_x1
            + self.card_x0 * self.state_kind.len(dim(&self.sender))
            + self.card_x1 * self.state_kind.len(self.relay.dim)
            + self.povm_len()
            + self.card_x1 * self.card_y1 * self.card_z1
    }

    fn build(&self, raw: &[f64]) -> Result<MFConfig> {
        self.check(raw)?;
        let mut cur = Cursor::new(raw);
        let p0 = param::pmf(cur.take(self.card_x0));
        let p1 = param::pmf(cur.take(self.card_x1));
        let sender = state_table(self.state_kind, &self.sender, self.card_x0, &mut cur)?;
        let relay = state_table(self.state_kind, std::slice::from_ref(&self.relay), self.card_x1, &mut cur)?;
        let povm = match &self.fixed_povm {
            Some(p) => p.clone(),
            None => param::povm(cur.take(self.povm_len()), self.card_y1, self.relay_out_dim)?,
        };
        let rows = self.card_x1 * self.card_y1;
        let compressor = param::stochastic(cur.take(rows * self.card_z1), rows, self.card_z1);
        MFConfig::new(
            Ensemble::single(Subsystem::classical(X0, self.card_x0), p0, sender)?,
            Ensemble::single(Subsystem::classical(X1, self.card_x1), p1, relay)?,
            povm,
            compressor,
        )
    }
}

/// Assist-forward configurations: pure states on `(G0, G1, sender…)` and
/// `(G2, relay input)`.
#[derive(Clone, Debug)]
pub struct AfSpace {
    pub card_x1: usize,
    pub card_x2: usize,
    pub g_dims: [usize; 3],
    pub sender: Vec<Subsystem>,
    pub relay: Subsystem,
}

impl AfSpace {
    pub fn for_channel(ch: &RelayChannel, card_x1: usize, card_x2: usize, g_dims: [usize; 3]) -> Result<Self> {
        if card_x1 == 0 || card_x2 == 0 || g_dims.contains(&0) {
            return Err(Error::InvalidParameter("cardinalities and dimensions must be at least 1".into()));
        }
        let s = Self { card_x1, card_x2, g_dims, sender: ch.sender_labels(), relay: ch.relay_in_label().clone() };
        check_kind(StateKind::Pure, &s.sender)?;
        check_kind(StateKind::Pure, std::slice::from_ref(&s.relay))?;
        check_cap(g_dims[0] * g_dims[1] * dim(&s.sender))?;
        Ok(s)
    }

    fn theta_labels(&self) -> Vec<Subsystem> {
        let mut l = vec![Subsystem::quantum("G0", self.g_dims[0]), Subsystem::quantum("G1", self.g_dims[1])];
        l.extend(self.sender.iter().cloned());
        l
    }

    fn zeta_labels(&self) -> Vec<Subsystem> {
        vec![Subsystem::quantum("G2", self.g_dims[2]), self.relay.clone()]
    }
}

impl Space for AfSpace {
    type Config = AFConfig;

    fn len(&self) -> usize {
        self.card_x1
            + self.card_x2
            + self.card_x1 * param::pure_len(dim(&self.theta_labels()))
            + self.card_x2 * param::pure_len(dim(&self.zeta_labels()))
    }

    fn build(&self, raw: &[f64]) -> Result<AFConfig> {
        self.check(raw)?;
        let mut cur = Cursor::new(raw);
        let p1 = param::pmf(cur.take(self.card_x1));
        let p2 = param::pmf(cur.take(self.card_x2));
        let theta = state_table(StateKind::Pure, &self.theta_labels(), self.card_x1, &mut cur)?;
        let zeta = state_table(StateKind::Pure, &self.zeta_labels(), self.card_x2, &mut cur)?;
        AFConfig::new(
            Ensemble::single(Subsystem::classical(X1, self.card_x1), p1, theta)?,
            Ensemble::single(Subsystem::classical(X2, self.card_x2), p2, zeta)?,
        )
    }
}

pub fn optimize_pdf(ch: &RelayChannel, space: &PdfSpace, cfg: &OptimizerConfig) -> Result<Optimum<Ensemble>> {
    maximize(space, |e| eval_pdf(ch, e).map(|r| Evaluation::of(&r)), cfg)
}

pub fn optimize_full_df(ch: &RelayChannel, space: &PdfSpace, cfg: &OptimizerConfig) -> Result<Optimum<Ensemble>> {
    maximize(space, |e| eval_full_df(ch, e).map(|r| Evaluation::of(&r)), cfg)
}

pub fn optimize_mf(ch: &RelayChannel, space: &MfSpace, cfg: &OptimizerConfig) -> Result<Optimum<MFConfig>> {
    maximize(
        space,
        |c| {
            eval_mf(ch, c).map(|r| Evaluation { rate: r.rate, violation: (r.lhs_constraint - r.rhs_constraint).max(0.0) })
        },
        cfg,
    )
}

pub fn optimize_af(ch: &RelayChannel, space: &AfSpace, cfg: &OptimizerConfig) -> Result<Optimum<AFConfig>> {
    maximize(space, |c| eval_af(ch, c).map(|r| Evaluation::of(&r)), cfg)
}
