//! Command front end shared by the `qrelay` binary and the tests.
//!
//! Every command takes a [`RunManifest`] and produces a [`Table`]. Each row
//! starts with a short SHA-256 digest of the manifest and of the input
//! files it names, so a CSV can be traced back to the run that produced it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{
    depolarizing_mf_config, eval_af, eval_depolarizing_closed_form, eval_full_df, eval_hadamard_capacity, eval_mf,
    eval_pdf, BoundRecord, U, X0, X1, X2, Y1, Z1,
};
use crate::channels::{classify, make_depolarizing_relay, RelayChannel};
use crate::codesim::{direct_table, holevo_of_table, simulate_direct_code, SimulationParams};
use crate::error::{Error, Result};
use crate::formats::{af_from_parts, load_channel, load_config, mf_from_parts, to_json, ConfigFile, LoadedChannel, Target};
use crate::optimizer::{
    optimize_af, optimize_full_df, optimize_mf, optimize_pdf, AfSpace, MfSpace, OptimizerConfig, PdfSpace, RestartTrace,
    StateKind,
};
use crate::qlin::Povm;

/// Exit status for malformed input, failed validation and evaluation errors.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status when the optimizer finds no feasible point.
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Eval,
    Sweep,
    Classify,
    Simulate,
    Optimize,
}

/// Everything that determines a run's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    pub channel: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub seed: u64,
    pub restarts: Option<usize>,
    pub out: Option<PathBuf>,
    pub cards: BTreeMap<String, usize>,
    pub tol: Option<f64>,
}

impl RunManifest {
    pub fn new(command: Command) -> Self {
        Self { command, channel: None, config: None, seed: 42, restarts: None, out: None, cards: BTreeMap::new(), tol: None }
    }

    pub fn with_channel(mut self, p: impl Into<PathBuf>) -> Self {
        self.channel = Some(p.into());
        self
    }

    pub fn with_config(mut self, p: impl Into<PathBuf>) -> Self {
        self.config = Some(p.into());
        self
    }

    /// First 16 hex digits of SHA-256 over the manifest (output path
    /// excluded) followed by the bytes of the channel and config files.
    pub fn hash(&self) -> Result<String> {
        let mut h = Sha256::new();
        let mut m = self.clone();
        m.out = None;
        h.update(serde_json::to_vec(&m)?);
        for p in [&self.channel, &self.config].into_iter().flatten() {
            h.update(std::fs::read(p)?);
        }
        Ok(hex::encode(h.finalize())[..16].to_string())
    }

    fn channel(&self) -> Result<LoadedChannel> {
        let p = self.channel.as_deref().ok_or_else(|| Error::Format("--channel is required".into()))?;
        load_channel(p)
    }

    fn config(&self) -> Result<ConfigFile> {
        let p = self.config.as_deref().ok_or_else(|| Error::Format("--config is required".into()))?;
        load_config(p)
    }

    fn card(&self, name: &str) -> usize {
        self.cards.get(name).copied().unwrap_or(2)
    }

    fn check_cards(&self, allowed: &[&str]) -> Result<()> {
        for (k, &v) in &self.cards {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::InvalidParameter(format!("cardinality `{k}` does not apply here; expected one of {allowed:?}")));
            }
            if v == 0 {
                return Err(Error::InvalidParameter(format!("cardinality `{k}` must be at least 1")));
            }
        }
        Ok(())
    }
}

/// Parse `U=2,X0=3`.
pub fn parse_cards(s: &str) -> Result<BTreeMap<String, usize>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("cardinality `{part}` is not of the form NAME=N")))?;
        let v: usize = v.trim().parse().map_err(|_| Error::Format(format!("cardinality `{part}` is not an integer")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible { .. } => EXIT_INFEASIBLE,
        _ => EXIT_VALIDATION,
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }

    /// Column-aligned text for terminals.
    pub fn to_pretty(&self) -> String {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|j| self.rows.iter().map(|r| r[j].len()).chain([self.header[j].len()]).max().unwrap_or(0))
            .collect();
        let mut s = String::new();
        for r in std::iter::once(&self.header).chain(&self.rows) {
            let line: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(s, "{}", line.join("  ").trim_end());
        }
        s
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j].as_str()).collect())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

fn num(x: f64) -> String {
    // below print precision, and -0.0, print as zero
    let x = if x.abs() < 5e-13 { 0.0 } else { x + 0.0 };
    format!("{x:.12}")
}

fn flag(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

/// Evaluate one bound configuration on one channel.
pub fn cmd_eval(m: &RunManifest) -> Result<Table> {
    let hash = m.hash()?;
    let loaded = m.channel()?;
    let ch = loaded.relay()?;
    let cfg = m.config()?;
    let tol = m.tol.unwrap_or(1e-9);
    let row = |name: &str, r: &dyn BoundRecordDyn| -> Table {
        let terms = r.terms_dyn();
        let mut header = vec!["manifest", "bound", "rate", "feasible", "binding"];
        header.extend(terms.iter().map(|t| t.0));
        let mut t = Table::new(&header);
        let mut row = vec![hash.clone(), name.to_string(), num(r.rate_dyn()), flag(r.feasible_dyn()), r.binding_dyn(tol)];
        row.extend(terms.iter().map(|t| num(t.1)));
        t.rows.push(row);
        t
    };
    Ok(match &cfg {
        ConfigFile::Pdf { ensemble } => row("pdf", &eval_pdf(ch, &ensemble.build()?)?),
        ConfigFile::FullDf { ensemble } => row("full_df", &eval_full_df(ch, &ensemble.build()?)?),
        ConfigFile::Hadamard { ensemble } => row("hadamard", &eval_hadamard_capacity(ch, &ensemble.build()?)?),
        ConfigFile::Mf { ens0, ens1, relay_povm, compressor } => {
            row("mf", &eval_mf(ch, &mf_from_parts(ens0, ens1, relay_povm, compressor)?)?)
        }
        ConfigFile::Af { ens1, ens2, g0, g1, g2, floor_q } => {
            row("af", &eval_af(ch, &af_from_parts(ens1, ens2, [g0, g1, g2], *floor_q)?)?)
        }
        other => return Err(Error::Format(format!("`{}` is not an evaluator configuration", other.name()))),
    })
}

/// Object-safe view of [`BoundRecord`] for the row builder.
trait BoundRecordDyn {
    fn rate_dyn(&self) -> f64;
    fn terms_dyn(&self) -> Vec<(&'static str, f64)>;
    fn feasible_dyn(&self) -> bool;
    fn binding_dyn(&self, tol: f64) -> String;
}

impl<R: BoundRecord> BoundRecordDyn for R {
    fn rate_dyn(&self) -> f64 {
        self.rate()
    }
    fn terms_dyn(&self) -> Vec<(&'static str, f64)> {
        self.terms()
    }
    fn feasible_dyn(&self) -> bool {
        self.feasible()
    }
    fn binding_dyn(&self, tol: f64) -> String {
        self.binding(tol).join("+")
    }
}

fn optimizer_config(m: &RunManifest, max_evals: Option<usize>) -> OptimizerConfig {
    let d = OptimizerConfig::default();
    OptimizerConfig {
        restarts: m.restarts.unwrap_or(d.restarts),
        max_evals: max_evals.unwrap_or(d.max_evals),
        seed: m.seed,
        tolerance: m.tol.unwrap_or(d.tolerance),
        ..d
    }
}

/// Depolarizing-relay grid: closed form, the explicit measure-forward
/// construction and (optionally) the measure-forward optimizer.
pub fn cmd_sweep(m: &RunManifest) -> Result<Table> {
    let hash = m.hash()?;
    let ConfigFile::Sweep { p, q, optimize } = m.config()? else {
        return Err(Error::Format("sweep needs a `sweep` configuration".into()));
    };
    if p.is_empty() || q.is_empty() {
        return Err(Error::InvalidParameter("sweep grid is empty".into()));
    }
    if p.iter().chain(&q).any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidParameter("sweep grid values must lie in [0, 1]".into()));
    }
    let cfg = OptimizerConfig { restarts: m.restarts.unwrap_or(4), ..optimizer_config(m, Some(800)) };
    let grid: Vec<(f64, f64)> = p.iter().flat_map(|&a| q.iter().map(move |&b| (a, b))).collect();
    let rows = grid
        .par_iter()
        .map(|&(p, q)| -> Result<Vec<String>> {
            let ch = make_depolarizing_relay(p, q)?;
            let closed = eval_depolarizing_closed_form(p, q)?;
            let mf = eval_mf(&ch, &depolarizing_mf_config(q / 2.0)?)?;
            let best = if optimize {
                let space = MfSpace::for_channel(&ch, (2, 2, 2, 2), StateKind::Basis, Some(Povm::computational(2)))?;
                match optimize_mf(&ch, &space, &cfg) {
                    Ok(o) => num(o.best_rate),
                    Err(Error::Infeasible { .. }) => "infeasible".into(),
                    Err(e) => return Err(e),
                }
            } else {
                String::new()
            };
            Ok(vec![
                hash.clone(),
                num(p),
                num(q),
                num(closed),
                num(mf.rate),
                num(mf.lhs_constraint),
                num(mf.rhs_constraint),
                flag(mf.feasible),
                best,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["manifest", "p", "q", "closed_form", "mf", "mf_lhs", "mf_rhs", "mf_feasible", "optimizer"]);
    t.rows = rows;
    Ok(t)
}

/// Structural classes of a channel. Without a role map every test is
/// reported as not testable.
pub fn cmd_classify(m: &RunManifest) -> Result<Table> {
    let hash = m.hash()?;
    let mut t = Table::new(&[
        "manifest",
        "degraded",
        "degraded_residual",
        "orc",
        "orc_distance",
        "hadamard",
        "classical_quantum",
    ]);
    let na = || "not_testable".to_string();
    match m.channel()? {
        LoadedChannel::Plain(_) => t.rows.push(vec![hash, na(), na(), na(), na(), na(), na()]),
        LoadedChannel::Relay(ch) => {
            let r = classify(&ch)?;
            let (orc, dist) = match r.orc {
                Some((b, d)) => (flag(b), format!("{d:.3e}")),
                None => (na(), na()),
            };
            t.rows.push(vec![
                hash,
                flag(r.degraded.degraded),
                format!("{:.3e}", r.degraded.residual),
                orc,
                dist,
                flag(r.hadamard),
                flag(r.classical_quantum),
            ]);
        }
    }
    Ok(t)
}

/// Random-code simulation on the direct link of a c-q relay.
pub fn cmd_simulate(m: &RunManifest) -> Result<Table> {
    let hash = m.hash()?;
    let ch = m.channel()?;
    let ConfigFile::Simulate { pmf, rates, holevo_fractions, n, delta, code_delta, trials, relay_value } = m.config()?
    else {
        return Err(Error::Format("simulate needs a `simulate` configuration".into()));
    };
    let table = direct_table(ch.relay()?, relay_value)?;
    let holevo = holevo_of_table(&table, &pmf)?;
    let mut all_rates = rates.clone();
    all_rates.extend(holevo_fractions.iter().map(|f| f * holevo));
    if all_rates.is_empty() || n.is_empty() {
        return Err(Error::InvalidParameter("simulate needs at least one rate and one block length".into()));
    }
    let mut t = Table::new(&[
        "manifest", "seed", "n", "rate", "messages", "holevo", "trial", "error", "epsilon", "h", "H", "bound", "holds",
        "mean_error",
    ]);
    for &rate in &all_rates {
        for &len in &n {
            let params = SimulationParams { rate, n: len, delta, code_delta, trials, seed: m.seed };
            let rec = simulate_direct_code(&table, &pmf, &params)?;
            for tr in &rec.trials {
                t.rows.push(vec![
                    hash.clone(),
                    m.seed.to_string(),
                    len.to_string(),
                    num(rate),
                    rec.messages.to_string(),
                    num(holevo),
                    tr.trial.to_string(),
                    num(tr.error),
                    num(tr.epsilon),
                    num(tr.h),
                    num(tr.big_h),
                    num(tr.bound),
                    flag(tr.holds),
                    num(rec.mean_error),
                ]);
            }
        }
    }
    Ok(t)
}

/// Result of [`cmd_optimize`]: the per-restart table and the best
/// configuration in the config-file format.
#[derive(Clone, Debug)]
pub struct OptimizeOutput {
    pub table: Table,
    pub best: ConfigFile,
}

pub fn cmd_optimize(m: &RunManifest) -> Result<OptimizeOutput> {
    let hash = m.hash()?;
    let loaded = m.channel()?;
    let ch = loaded.relay()?;
    let ConfigFile::Optimize { target, state_kind, fixed_povm, max_evals } = m.config()? else {
        return Err(Error::Format("optimize needs an `optimize` configuration".into()));
    };
    let cfg = optimizer_config(m, max_evals);
    let (rate, trace, best) = run_target(m, ch, target, state_kind, fixed_povm, &cfg)?;
    let name = serde_json::to_value(target)?.as_str().unwrap_or_default().to_string();
    let mut t = Table::new(&["manifest", "target", "seed", "restart", "evals", "rate"]);
    for r in &trace {
        let rate = r.best_rate.map(num).unwrap_or_else(|| "infeasible".into());
        t.rows.push(vec![hash.clone(), name.clone(), m.seed.to_string(), r.index.to_string(), r.evals.to_string(), rate]);
    }
    let evals: usize = trace.iter().map(|r| r.evals).sum();
    t.rows.push(vec![hash, name, m.seed.to_string(), "best".into(), evals.to_string(), num(rate)]);
    Ok(OptimizeOutput { table: t, best })
}

fn run_target(
    m: &RunManifest,
    ch: &RelayChannel,
    target: Target,
    kind: StateKind,
    fixed_povm: bool,
    cfg: &OptimizerConfig,
) -> Result<(f64, Vec<RestartTrace>, ConfigFile)> {
    Ok(match target {
        Target::Pdf | Target::FullDf => {
            m.check_cards(&[U, X0, X1])?;
            let space = PdfSpace::for_channel(ch, m.card(U), m.card(X0), m.card(X1), kind)?;
            if target == Target::Pdf {
                let o = optimize_pdf(ch, &space, cfg)?;
                (o.best_rate, o.trace, ConfigFile::pdf(&o.best_config))
            } else {
                let o = optimize_full_df(ch, &space, cfg)?;
                (o.best_rate, o.trace, ConfigFile::full_df(&o.best_config))
            }
        }
        Target::Mf => {
            m.check_cards(&[X0, X1, Y1, Z1])?;
            let povm = fixed_povm.then(|| Povm::computational(ch.relay_out_label().dim));
            let cards = (m.card(X0), m.card(X1), m.card(Y1), m.card(Z1));
            let space = MfSpace::for_channel(ch, cards, kind, povm)?;
            let o = optimize_mf(ch, &space, cfg)?;
            (o.best_rate, o.trace, ConfigFile::mf(&o.best_config))
        }
        Target::Af => {
            m.check_cards(&[X1, X2, "G0", "G1", "G2"])?;
            let g = [m.card("G0"), m.card("G1"), m.card("G2")];
            let space = AfSpace::for_channel(ch, m.card(X1), m.card(X2), g)?;
            let o = optimize_af(ch, &space, cfg)?;
            (o.best_rate, o.trace, ConfigFile::af(&o.best_config))
        }
    })
}

/// Run a manifest and write its outputs. The CSV goes to `out` (with a
/// column-aligned copy on stdout) or to stdout when no path is given. An
/// optimize run also writes its best configuration next to the CSV.
pub fn execute(m: &RunManifest) -> Result<()> {
    let (table, best) = match m.command {
        Command::Eval => (cmd_eval(m)?, None),
        Command::Sweep => (cmd_sweep(m)?, None),
        Command::Classify => (cmd_classify(m)?, None),
        Command::Simulate => (cmd_simulate(m)?, None),
        Command::Optimize => {
            let o = cmd_optimize(m)?;
            (o.table, Some(o.best))
        }
    };
    let csv = table.to_csv()?;
    match &m.out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            if let Some(best) = best {
                std::fs::write(best_config_path(path), to_json(&best)?)?;
            }
            print!("{}", table.to_pretty());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

/// `run.csv` → `run.best.json`
pub fn best_config_path(out: &Path) -> PathBuf {
    out.with_extension("best.json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cards_parse() {
        let c = parse_cards("U=2, X0=3,X1=1").unwrap();
        assert_eq!(c.get("X0"), Some(&3));
        assert_eq!(c.len(), 3);
        assert!(parse_cards("U2").is_err());
        assert!(parse_cards("U=two").is_err());
    }

    #[test]
    fn hash_ignores_output_path() {
        let mut a = RunManifest::new(Command::Sweep);
        let h = a.hash().unwrap();
        a.out = Some("elsewhere.csv".into());
        assert_eq!(a.hash().unwrap(), h);
        a.seed = 7;
        assert_ne!(a.hash().unwrap(), h);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Infeasible { violation: 0.1, tolerance: 0.0 }), EXIT_INFEASIBLE);
        assert_eq!(exit_code(&Error::NotTracePreserving { residual: 0.3 }), EXIT_VALIDATION);
    }

    #[test]
    fn csv_and_pretty_agree_on_cells() {
        let mut t = Table::new(&["a", "bb"]);
        t.rows.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(t.to_csv().unwrap(), "a,bb\n1,\"x,y\"\n");
        assert!(t.to_pretty().starts_with("a  bb"));
    }
}
