//! Desk-scale coding primitives: typical sets and projectors, random
//! codebooks decoded by the square-root measurement, and the gentle
//! measurement check.
//!
//! Error probabilities are exact trace formulas. Randomness only enters
//! through codebook sampling, one ChaCha stream per trial.

mod gentle;
mod packing;
mod typical;

pub use gentle::{gentle_measurement_check, GentleRecord};
pub use packing::{average_error, build_sqrt_measurement, measure_constants, PackingConstants, SqrtMeasurement};
pub use typical::{
    conditional_typical_projector, epsilon_delta, sequence_probability, typical_projector, typical_set,
    typical_set_capped, TypeProfile, TypicalChecks, TypicalProjector, ENUMERATION_CAP,
};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::RelayChannel;
use crate::entropy::spectral_entropy;
use crate::error::{Error, Result};
use crate::qlin::{hermitian_eigenvalues, identity, CMatrix, DensityOperator};

/// Largest composite output dimension `dⁿ` the simulator accepts.
pub const OUTPUT_DIM_CAP: usize = 256;
/// Slack on the per-codebook check `error ≤ min(1, bound)`.
pub const BOUND_SLACK: f64 = 1e-9;

/// Destination output states `ρ_x` of a c-q relay with the relay input held
/// at `relay_value`.
pub fn direct_table(ch: &RelayChannel, relay_value: usize) -> Result<Vec<CMatrix>> {
    let sender = ch.sender_labels();
    if sender.len() != 1 {
        return Err(Error::Structure("direct coding needs a single sender input".into()));
    }
    let x = &sender[0];
    let zeta = DensityOperator::basis(ch.relay_in_label().clone(), relay_value)?;
    let dest = ch.dest_labels();
    let keep: Vec<&str> = dest.iter().map(|l| l.name.as_str()).collect();
    (0..x.dim)
        .map(|a| {
            let out = ch.output(&DensityOperator::basis(x.clone(), a)?, &zeta)?;
            Ok(out.partial_trace(&keep)?.into_matrix())
        })
        .collect()
}

/// `I(X;B) = H(Σ p_x ρ_x) − Σ p_x H(ρ_x)`
pub fn holevo_of_table(table: &[CMatrix], p: &[f64]) -> Result<f64> {
    let d = table[0].nrows();
    let avg = table.iter().zip(p).fold(CMatrix::zeros(d, d), |a, (r, &w)| a + r.scale(w));
    let mut h = spectral_entropy(&hermitian_eigenvalues(&avg))?;
    for (r, &w) in table.iter().zip(p) {
        h -= w * spectral_entropy(&hermitian_eigenvalues(r))?;
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationParams {
    pub rate: f64,
    pub n: usize,
    /// Typicality parameter of the codeword projectors.
    pub delta: f64,
    /// Typicality parameter of the code projector; `None` uses the identity.
    pub code_delta: Option<f64>,
    pub trials: usize,
    pub seed: u64,
}

/// One sampled codebook with its induced output states and decoder.
#[derive(Clone, Debug)]
pub struct CodebookInstance {
    pub rate: f64,
    pub n: usize,
    pub codewords: Vec<Vec<usize>>,
    pub states: Vec<CMatrix>,
    pub decoder: SqrtMeasurement,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub error: f64,
    pub epsilon: f64,
    pub h: f64,
    pub big_h: f64,
    pub bound: f64,
    /// `error ≤ min(1, bound)` up to [`BOUND_SLACK`].
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationRecord {
    pub params: SimulationParams,
    pub messages: usize,
    pub holevo: f64,
    pub trials: Vec<TrialRecord>,
    pub mean_error: f64,
    pub mean_bound: f64,
}

impl SimulationRecord {
    pub fn all_hold(&self) -> bool {
        self.trials.iter().all(|t| t.holds)
    }
}

/// `M = ⌈2^{nR}⌉`, at least one message.
pub fn message_count(rate: f64, n: usize) -> usize {
    (2f64.powf(n as f64 * rate) - 1e-9).ceil().max(1.0) as usize
}

fn tensor_power_state(table: &[CMatrix], word: &[usize]) -> CMatrix {
    word.iter().skip(1).fold(table[word[0]].clone(), |acc, &a| acc.kronecker(&table[a]))
}

/// Sample a codebook and build its decoder. `code_proj` is shared across
/// trials.
pub fn sample_codebook(
    table: &[CMatrix],
    p: &[f64],
    params: &SimulationParams,
    code_proj: &CMatrix,
    rng: &mut ChaCha8Rng,
) -> Result<(CodebookInstance, Vec<CMatrix>)> {
    let m = message_count(params.rate, params.n);
    let dist = WeightedIndex::new(p).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let codewords: Vec<Vec<usize>> = (0..m).map(|_| (0..params.n).map(|_| dist.sample(rng)).collect()).collect();
    let states: Vec<CMatrix> = codewords.iter().map(|w| tensor_power_state(table, w)).collect();
    let words = codewords
        .iter()
        .map(|w| conditional_typical_projector(table, w, params.delta))
        .collect::<Result<Vec<_>>>()?;
    let decoder = build_sqrt_measurement(code_proj, &words)?;
    Ok((CodebookInstance { rate: params.rate, n: params.n, codewords, states, decoder }, words))
}

fn check_params(table: &[CMatrix], p: &[f64], params: &SimulationParams) -> Result<usize> {
    crate::bounds::check_pmf(p)?;
    if table.is_empty() || table.len() != p.len() {
        return Err(Error::Dimension(format!("{} states for {} letters", table.len(), p.len())));
    }
    let d = table[0].nrows();
    if table.iter().any(|r| r.shape() != (d, d)) {
        return Err(Error::Dimension("table states differ in dimension".into()));
    }
    if params.n == 0 || params.rate.is_nan() || params.rate < 0.0 || params.trials == 0 {
        return Err(Error::InvalidParameter("need n ≥ 1, R ≥ 0 and at least one trial".into()));
    }
    let dim = d.checked_pow(params.n as u32).unwrap_or(usize::MAX);
    if dim > OUTPUT_DIM_CAP {
        return Err(Error::DimensionCap { dim, cap: OUTPUT_DIM_CAP });
    }
    Ok(dim)
}

/// Random codes for the c-q channel `x ↦ table[x]` with i.i.d. `p`
/// codewords. Each trial reports its exact average error together with the
/// packing bound evaluated from constants measured on that codebook.
pub fn simulate_direct_code(table: &[CMatrix], p: &[f64], params: &SimulationParams) -> Result<SimulationRecord> {
    let dim = check_params(table, p, params)?;
    let d = table[0].nrows();
    let code_proj = match params.code_delta {
        None => identity(dim),
        Some(cd) => {
            let avg = table.iter().zip(p).fold(CMatrix::zeros(d, d), |a, (r, &w)| a + r.scale(w));
            typical_projector(&avg, params.n, cd)?.projector
        }
    };
    let trials = (0..params.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(trial as u64);
            let (cb, words) = sample_codebook(table, p, params, &code_proj, &mut rng)?;
            let error = average_error(&cb.decoder, &cb.states);
            let k = measure_constants(&code_proj, &words, &cb.states);
            let bound = k.bound();
            Ok(TrialRecord {
                trial,
                error,
                epsilon: k.epsilon,
                h: k.h,
                big_h: k.big_h,
                bound,
                holds: error <= bound.min(1.0) + BOUND_SLACK,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let count = trials.len() as f64;
    Ok(SimulationRecord {
        params: params.clone(),
        messages: message_count(params.rate, params.n),
        holevo: holevo_of_table(table, p)?,
        mean_error: trials.iter().map(|t| t.error).sum::<f64>() / count,
        mean_bound: trials.iter().map(|t| t.bound).sum::<f64>() / count,
        trials,
    })
}
