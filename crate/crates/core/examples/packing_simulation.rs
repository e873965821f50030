//! Random codes on the pure-state channel 0 ↦ |0⟩, 1 ↦ |+⟩ decoded with the
//! square-root measurement. Below the Holevo rate the error falls with n;
//! above it the error stays large.
//!
//! ```bash
//! cargo run --release --example packing_simulation
//! ```

use qrelay::codesim::{direct_table, holevo_of_table, simulate_direct_code, SimulationParams};
use qrelay::presets::pure_pair_cq_relay;

fn main() -> qrelay::Result<()> {
    let table = direct_table(&pure_pair_cq_relay()?, 0)?;
    let p = [0.5, 0.5];
    let chi = holevo_of_table(&table, &p)?;
    println!("Holevo information {chi:.6}");
    println!("R/chi  n  messages  mean error  mean bound  all hold");
    for frac in [0.5, 1.5] {
        for n in [2, 4, 6] {
            let params = SimulationParams { rate: frac * chi, n, delta: 0.5, code_delta: None, trials: 30, seed: 42 };
            let r = simulate_direct_code(&table, &p, &params)?;
            println!(
                "{frac:<5} {n:>2} {:>9} {:>11.4} {:>11.4} {:>9}",
                r.messages,
                r.mean_error,
                r.mean_bound,
                r.all_hold()
            );
        }
    }
    Ok(())
}
