use crate::error::{Error, Result};
use crate::qlin::{hermitian_eigenvalues, hermitize, psd_sqrt, trace_norm, CMatrix};

const OPERATOR_TOL: f64 = 1e-9;

/// Outcome of the gentle-measurement check `‖ρ − ρ̃‖₁ ≤ 2√δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GentleRecord {
    pub success_prob: f64,
    /// `1 − tr(Λρ)`
    pub delta: f64,
    /// `‖ρ − ρ̃‖₁` (full trace norm)
    pub trace_distance: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Post-measurement state `√Λ ρ √Λ / tr(Λρ)` compared with `ρ`.
pub fn gentle_measurement_check(rho: &CMatrix, lambda: &CMatrix) -> Result<GentleRecord> {
    if rho.shape() != lambda.shape() {
        return Err(Error::Dimension("state and measurement operator differ in shape".into()));
    }
    let ev = hermitian_eigenvalues(lambda);
    if ev[0] < -OPERATOR_TOL || ev[ev.len() - 1] > 1.0 + OPERATOR_TOL {
        return Err(Error::InvalidParameter(format!(
            "measurement operator spectrum [{:.3e}, {:.3e}] leaves [0, 1]",
            ev[0],
            ev[ev.len() - 1]
        )));
    }
    let success_prob = (lambda * rho).trace().re;
    if success_prob <= 0.0 {
        return Err(Error::InvalidParameter("the outcome has probability zero".into()));
    }
    let root = psd_sqrt(lambda);
    let post = hermitize(&(&root * rho * &root)).unscale(success_prob);
    let trace_distance = trace_norm(&(rho - post));
    let delta = (1.0 - success_prob).max(0.0);
    let bound = 2.0 * delta.sqrt();
    Ok(GentleRecord { success_prob, delta, trace_distance, bound, holds: trace_distance <= bound + 1e-9 })
}
