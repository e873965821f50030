//! Measure-forward on the depolarizing relay. With the relay measuring in
//! the computational basis and flipping its bit with probability α, the
//! rate constraint is tight at α = q/2 and the rate is 1 − h(p ∗ q/2).
//!
//! ```bash
//! cargo run --example depolarizing_sweep
//! ```

use qrelay::bounds::{depolarizing_mf_config, eval_depolarizing_closed_form, eval_mf};
use qrelay::channels::make_depolarizing_relay;

fn main() -> qrelay::Result<()> {
    println!("   p    q   closed      mf");
    for p in [0.0, 0.1, 0.25, 0.4] {
        for q in [0.0, 0.3, 0.6, 1.0] {
            let ch = make_depolarizing_relay(p, q)?;
            let r = eval_mf(&ch, &depolarizing_mf_config(q / 2.0)?)?;
            println!("{p:>4} {q:>4}  {:.6}  {:.6}", eval_depolarizing_closed_form(p, q)?, r.rate);
        }
    }

    // Below q/2 the compressed description is too fine for the relay link.
    let (p, q) = (0.1, 0.3);
    let ch = make_depolarizing_relay(p, q)?;
    println!("\np = {p}, q = {q}");
    println!("alpha    rate    I(Z1;Y1|X1B)  I(X1;B)  feasible");
    for alpha in [0.05, 0.1, 0.15, 0.2, 0.3] {
        let r = eval_mf(&ch, &depolarizing_mf_config(alpha)?)?;
        println!("{alpha:<6} {:.5}  {:>11.5}  {:>7.5}  {}", r.rate, r.lhs_constraint, r.rhs_constraint, r.feasible);
    }
    Ok(())
}
