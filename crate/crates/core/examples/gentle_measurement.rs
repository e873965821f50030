//! A measurement that succeeds with high probability barely disturbs the
//! state: ‖ρ − ρ̃‖₁ ≤ 2√δ with δ = 1 − tr(Λρ).
//!
//! ```bash
//! cargo run --example gentle_measurement
//! ```

use qrelay::codesim::gentle_measurement_check;
use qrelay::qlin::{c, CMatrix};

fn main() -> qrelay::Result<()> {
    let rho = CMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.3, 0.0), c(0.3, 0.0), c(0.4, 0.0)]);
    let (co, si) = (1.0f64.cos(), 1.0f64.sin());
    let rot = CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-si, 0.0), c(si, 0.0), c(co, 0.0)]);
    println!("  t     success  distance   2√δ");
    for t in [1.0, 0.95, 0.8, 0.5, 0.2, 0.0] {
        // Λ = R diag(1, t) Rᵀ, tilted away from ρ's eigenbasis
        let d = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(t, 0.0)]);
        let lam = &rot * d * rot.transpose();
        let g = gentle_measurement_check(&rho, &lam)?;
        println!("{t:<5} {:>9.5} {:>9.5} {:>7.5}  {}", g.success_prob, g.trace_distance, g.bound, if g.holds { "ok" } else { "violated" });
    }
    Ok(())
}
