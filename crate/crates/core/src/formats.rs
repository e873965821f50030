//! JSON file formats for channels and run configurations.
//!
//! Matrices are row-major nested arrays whose entries are either a plain
//! number (real) or an `[re, im]` pair. A channel file is either an explicit
//! Kraus list with an optional role map or one of the built-in families:
//!
//! ```json
//! { "family": "kraus",
//!   "inputs":  [{ "name": "A", "dim": 2 }, { "name": "D", "dim": 2 }],
//!   "outputs": [{ "name": "B1", "dim": 2 }, { "name": "B2", "dim": 2 }, { "name": "E", "dim": 2 }],
//!   "kraus":   [[[1, 0, ...], ...], ...],
//!   "roles":   { "A": "sender_in", "D": "relay_in", "B1": "dest_out_1", "B2": "dest_out_2", "E": "relay_out" } }
//! ```
//!
//! `{ "family": "depolarizing", "p": 0.1, "q": 0.3 }` and
//! `{ "family": "wired" }` are shorthands for the two example relays.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{AFConfig, Ensemble, MFConfig};
use crate::channels::{make_cq_relay, make_depolarizing_relay, make_hadamard_relay, make_wired_relay};
use crate::channels::{HadamardSpec, RelayChannel, Role, Roles};
use crate::error::{Error, Result};
use crate::optimizer::StateKind;
use crate::qlin::{c, CMatrix, DensityOperator, Povm, QuantumChannel, Subsystem};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

pub type MatrixJson = Vec<Vec<Entry>>;

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    if z.im == 0.0 {
                        Entry::Real(z.re)
                    } else {
                        Entry::Complex([z.re, z.im])
                    }
                })
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    if nr == 0 || nc == 0 || rows.iter().any(|r| r.len() != nc) {
        return Err(Error::Format("matrices must be non-empty and rectangular".into()));
    }
    Ok(CMatrix::from_fn(nr, nc, |i, j| match rows[i][j] {
        Entry::Real(x) => c(x, 0.0),
        Entry::Complex([re, im]) => c(re, im),
    }))
}

fn matrices_from_json(v: &[MatrixJson]) -> Result<Vec<CMatrix>> {
    v.iter().map(matrix_from_json).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub labels: Vec<Subsystem>,
    pub matrix: MatrixJson,
}

impl StateJson {
    pub fn from_state(s: &DensityOperator) -> Self {
        Self { labels: s.labels().to_vec(), matrix: matrix_to_json(s.matrix()) }
    }

    pub fn build(&self) -> Result<DensityOperator> {
        DensityOperator::new(self.labels.clone(), matrix_from_json(&self.matrix)?)
    }
}

fn states_from_json(v: &[StateJson]) -> Result<Vec<DensityOperator>> {
    v.iter().map(StateJson::build).collect()
}

/// Joint pmf (row-major over `registers`) and per-register state tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub registers: Vec<Subsystem>,
    pub pmf: Vec<f64>,
    pub tables: BTreeMap<String, Vec<StateJson>>,
}

impl EnsembleJson {
    pub fn from_ensemble(e: &Ensemble) -> Self {
        Self {
            registers: e.registers().to_vec(),
            pmf: e.pmf().to_vec(),
            tables: e
                .tables()
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(StateJson::from_state).collect()))
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Ensemble> {
        let tables = self
            .tables
            .iter()
            .map(|(k, v)| Ok((k.clone(), states_from_json(v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ensemble::new(self.registers.clone(), self.pmf.clone(), tables)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ChannelFile {
    Kraus {
        inputs: Vec<Subsystem>,
        outputs: Vec<Subsystem>,
        kraus: Vec<MatrixJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        roles: Option<BTreeMap<String, Role>>,
    },
    Depolarizing {
        p: f64,
        q: f64,
    },
    Wired,
    /// Measure `(sender…, relay_in)` with `measure`, prepare `prepare[y]`
    /// for the destination and hand `y` to the relay.
    Hadamard {
        sender: Vec<Subsystem>,
        relay_in: Subsystem,
        measure: Vec<MatrixJson>,
        prepare: Vec<StateJson>,
        relay_out: String,
    },
    /// `table` is row-major over (sender symbol, relay symbol).
    Cq {
        sender: Subsystem,
        relay_in: Subsystem,
        table: Vec<StateJson>,
        relay_out: String,
    },
}

/// A parsed channel; relay roles are optional for explicit Kraus files.
#[derive(Clone, Debug)]
pub enum LoadedChannel {
    Relay(Box<RelayChannel>),
    Plain(QuantumChannel),
}

impl LoadedChannel {
    pub fn channel(&self) -> &QuantumChannel {
        match self {
            Self::Relay(r) => r.channel(),
            Self::Plain(c) => c,
        }
    }

    pub fn relay(&self) -> Result<&RelayChannel> {
        match self {
            Self::Relay(r) => Ok(r),
            Self::Plain(_) => Err(Error::Structure("channel file has no role map".into())),
        }
    }
}

impl ChannelFile {
    /// Explicit Kraus form of a relay channel, roles included.
    pub fn from_relay(ch: &RelayChannel) -> Self {
        let q = ch.channel();
        Self::Kraus {
            inputs: q.inputs().to_vec(),
            outputs: q.outputs().to_vec(),
            kraus: q.kraus().iter().map(matrix_to_json).collect(),
            roles: Some(ch.roles().to_map()),
        }
    }

    pub fn hadamard(spec: &HadamardSpec) -> Self {
        Self::Hadamard {
            sender: spec.sender.clone(),
            relay_in: spec.relay_in.clone(),
            measure: spec.measure.elements().iter().map(matrix_to_json).collect(),
            prepare: spec.prepare.iter().map(StateJson::from_state).collect(),
            relay_out: spec.relay_out.clone(),
        }
    }

    pub fn cq(sender: Subsystem, relay_in: Subsystem, table: &[DensityOperator], relay_out: &str) -> Self {
        Self::Cq { sender, relay_in, table: table.iter().map(StateJson::from_state).collect(), relay_out: relay_out.into() }
    }

    pub fn build(&self) -> Result<LoadedChannel> {
        Ok(match self {
            Self::Kraus { inputs, outputs, kraus, roles } => {
                let ch = QuantumChannel::new(inputs.clone(), outputs.clone(), matrices_from_json(kraus)?)?;
                match roles {
                    None => LoadedChannel::Plain(ch),
                    Some(map) => {
                        let mut order: Vec<&str> = ch.input_names();
                        order.extend(ch.output_names());
                        let roles = Roles::from_map(map, &order)?;
                        LoadedChannel::Relay(Box::new(RelayChannel::new(ch, roles)?))
                    }
                }
            }
            Self::Depolarizing { p, q } => LoadedChannel::Relay(Box::new(make_depolarizing_relay(*p, *q)?)),
            Self::Wired => LoadedChannel::Relay(Box::new(make_wired_relay()?)),
            Self::Hadamard { sender, relay_in, measure, prepare, relay_out } => {
                let elements = matrices_from_json(measure)?;
                let outcomes = (0..elements.len()).map(|y| y.to_string()).collect();
                let spec = HadamardSpec {
                    sender: sender.clone(),
                    relay_in: relay_in.clone(),
                    measure: Povm::new(outcomes, elements)?,
                    prepare: states_from_json(prepare)?,
                    relay_out: relay_out.clone(),
                };
                LoadedChannel::Relay(Box::new(make_hadamard_relay(&spec)?))
            }
            Self::Cq { sender, relay_in, table, relay_out } => {
                LoadedChannel::Relay(Box::new(make_cq_relay(
                    sender.clone(),
                    relay_in.clone(),
                    &states_from_json(table)?,
                    relay_out,
                )?))
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Pdf,
    FullDf,
    Mf,
    Af,
}

fn default_g(i: usize) -> String {
    format!("G{i}")
}

fn g0() -> String {
    default_g(0)
}

fn g1() -> String {
    default_g(1)
}

fn g2() -> String {
    default_g(2)
}

fn default_state_kind() -> StateKind {
    StateKind::Pure
}

fn default_trials() -> usize {
    50
}

fn default_delta() -> f64 {
    0.5
}

fn default_true() -> bool {
    true
}

/// What to run. Evaluator configurations carry their ensembles; `sweep`,
/// `simulate` and `optimize` carry run parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConfigFile {
    Pdf {
        ensemble: EnsembleJson,
    },
    FullDf {
        ensemble: EnsembleJson,
    },
    Hadamard {
        ensemble: EnsembleJson,
    },
    Mf {
        ens0: EnsembleJson,
        ens1: EnsembleJson,
        relay_povm: Vec<MatrixJson>,
        /// Rows indexed by `x₁·|Y₁| + y₁`.
        compressor: Vec<Vec<f64>>,
    },
    Af {
        ens1: EnsembleJson,
        ens2: EnsembleJson,
        #[serde(default = "g0")]
        g0: String,
        #[serde(default = "g1")]
        g1: String,
        #[serde(default = "g2")]
        g2: String,
        #[serde(default)]
        floor_q: bool,
    },
    /// Depolarizing relay grid: closed form, measure-forward with
    /// `α = q/2`, and optionally the optimizer.
    Sweep {
        p: Vec<f64>,
        q: Vec<f64>,
        #[serde(default = "default_true")]
        optimize: bool,
    },
    Simulate {
        pmf: Vec<f64>,
        /// Absolute rates in bits per channel use.
        #[serde(default)]
        rates: Vec<f64>,
        /// Rates given as fractions of the Holevo information of `pmf`.
        #[serde(default)]
        holevo_fractions: Vec<f64>,
        n: Vec<usize>,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default)]
        code_delta: Option<f64>,
        #[serde(default = "default_trials")]
        trials: usize,
        #[serde(default)]
        relay_value: usize,
    },
    Optimize {
        target: Target,
        #[serde(default = "default_state_kind")]
        state_kind: StateKind,
        /// Keep the computational-basis relay POVM fixed (measure-forward).
        #[serde(default)]
        fixed_povm: bool,
        #[serde(default)]
        max_evals: Option<usize>,
    },
}

impl ConfigFile {
    pub fn pdf(e: &Ensemble) -> Self {
        Self::Pdf { ensemble: EnsembleJson::from_ensemble(e) }
    }

    pub fn full_df(e: &Ensemble) -> Self {
        Self::FullDf { ensemble: EnsembleJson::from_ensemble(e) }
    }

    pub fn hadamard(e: &Ensemble) -> Self {
        Self::Hadamard { ensemble: EnsembleJson::from_ensemble(e) }
    }

    pub fn mf(cfg: &MFConfig) -> Self {
        Self::Mf {
            ens0: EnsembleJson::from_ensemble(&cfg.ens0),
            ens1: EnsembleJson::from_ensemble(&cfg.ens1),
            relay_povm: cfg.relay_povm.elements().iter().map(matrix_to_json).collect(),
            compressor: cfg.compressor.clone(),
        }
    }

    pub fn af(cfg: &AFConfig) -> Self {
        Self::Af {
            ens1: EnsembleJson::from_ensemble(&cfg.ens1),
            ens2: EnsembleJson::from_ensemble(&cfg.ens2),
            g0: cfg.g0.clone(),
            g1: cfg.g1.clone(),
            g2: cfg.g2.clone(),
            floor_q: cfg.floor_q,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Pdf { .. } => "pdf",
            Self::FullDf { .. } => "full_df",
            Self::Hadamard { .. } => "hadamard",
            Self::Mf { .. } => "mf",
            Self::Af { .. } => "af",
            Self::Sweep { .. } => "sweep",
            Self::Simulate { .. } => "simulate",
            Self::Optimize { .. } => "optimize",
        }
    }
}

pub fn mf_from_parts(ens0: &EnsembleJson, ens1: &EnsembleJson, povm: &[MatrixJson], compressor: &[Vec<f64>]) -> Result<MFConfig> {
    let elements = matrices_from_json(povm)?;
    let outcomes = (0..elements.len()).map(|y| y.to_string()).collect();
    MFConfig::new(ens0.build()?, ens1.build()?, Povm::new(outcomes, elements)?, compressor.to_vec())
}

pub fn af_from_parts(ens1: &EnsembleJson, ens2: &EnsembleJson, g: [&str; 3], floor_q: bool) -> Result<AFConfig> {
    let cfg = AFConfig {
        ens1: ens1.build()?,
        ens2: ens2.build()?,
        g0: g[0].to_string(),
        g1: g[1].to_string(),
        g2: g[2].to_string(),
        floor_q,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn load_channel(path: &Path) -> Result<LoadedChannel> {
    read_json::<ChannelFile>(path)?.build()
}

pub fn load_config(path: &Path) -> Result<ConfigFile> {
    read_json(path)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::depolarizing_mf_config;
    use crate::presets::{bit_pipe_relay, wired_af_config, wired_pdf_ensemble};
    use crate::qlin::max_abs;

    #[test]
    fn entries_accept_reals_and_pairs() {
        let rows: MatrixJson = serde_json::from_str("[[1, [0, -1]], [[0, 1], 0.5]]").unwrap();
        let m = matrix_from_json(&rows).unwrap();
        assert_eq!(m[(0, 1)], c(0.0, -1.0));
        assert_eq!(m[(1, 1)], c(0.5, 0.0));
        assert!(matrix_from_json(&vec![vec![Entry::Real(1.0)], vec![]]).is_err());
    }

    #[test]
    fn relay_round_trips_through_kraus_form() {
        let ch = bit_pipe_relay().unwrap();
        let text = to_json(&ChannelFile::from_relay(&ch)).unwrap();
        let back: ChannelFile = serde_json::from_str(&text).unwrap();
        let loaded = back.build().unwrap();
        let r = loaded.relay().unwrap();
        assert_eq!(r.roles(), ch.roles());
        assert_eq!(r.channel().outputs(), ch.channel().outputs());
        let (a, b) = (r.channel().choi_state().unwrap(), ch.channel().choi_state().unwrap());
        assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-15);
    }

    #[test]
    fn malformed_kraus_reports_residual() {
        let text = r#"{"family":"kraus","inputs":[{"name":"A","dim":2}],"outputs":[{"name":"B","dim":2}],
            "kraus":[[[1,0],[0,0.7]]]}"#;
        let f: ChannelFile = serde_json::from_str(text).unwrap();
        match f.build() {
            Err(Error::NotTracePreserving { residual }) => assert!(residual > 0.3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn configs_round_trip() {
        for cfg in [
            ConfigFile::pdf(&wired_pdf_ensemble().unwrap()),
            ConfigFile::mf(&depolarizing_mf_config(0.15).unwrap()),
            ConfigFile::af(&wired_af_config().unwrap()),
        ] {
            let text = to_json(&cfg).unwrap();
            assert_eq!(serde_json::from_str::<ConfigFile>(&text).unwrap(), cfg);
        }
    }
}
