//! Typical sets and projectors: sizes, the three standard properties, and a
//! conditional projector for a fixed input sequence.
//!
//! ```bash
//! cargo run --example typical_projectors
//! ```

use qrelay::codesim::{conditional_typical_projector, typical_projector, typical_set};
use qrelay::qlin::{c, identity, CMatrix};

fn main() -> qrelay::Result<()> {
    for n in [4, 8, 12] {
        let t = typical_set(&[0.25, 0.75], n, 0.3)?;
        println!("p = (1/4, 3/4), n = {n:>2}, δ = 0.3: {} typical sequences of {}", t.len(), 1usize << n);
    }

    // spectrum (0.7, 0.3) in a rotated basis; ε only becomes informative at
    // block lengths well beyond what fits in memory, so 1 − ε is often negative
    let rho = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.2, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
    println!("\n  n    δ   rank  bound    mass   1-eps  sandwich   bound");
    for n in [4, 6, 8] {
        for delta in [0.3, 0.6] {
            let tp = typical_projector(&rho, n, delta)?;
            let k = &tp.checks;
            println!(
                "{n:>3} {delta:>4} {:>6} {:>6.1} {:>7.4} {:>7.4} {:>9.2e} {:>7.2e}  {}",
                k.rank,
                k.rank_bound,
                k.mass.max(0.0),
                1.0 - k.epsilon,
                k.sandwich,
                k.sandwich_bound,
                if k.all_hold() { "ok" } else { "violated" }
            );
        }
    }

    let half = identity(2).unscale(2.0);
    let pure = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let p = conditional_typical_projector(&[pure, half], &[0, 1, 1, 0, 1], 0.5)?;
    println!("\nconditional projector for x = 01101: rank {:.0}", p.trace().re);
    Ok(())
}
