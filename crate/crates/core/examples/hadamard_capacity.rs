//! Capacity formula of a Hadamard relay, evaluated on the bit pipe: the relay
//! measures the sender's qubit and the destination receives the outcome.
//!
//! ```bash
//! cargo run --example hadamard_capacity
//! ```

use std::collections::BTreeMap;

use qrelay::bounds::{eval_hadamard_capacity, Ensemble, X0, X1};
use qrelay::channels::is_hadamard;
use qrelay::presets::bit_pipe_relay;
use qrelay::qlin::{DensityOperator, Subsystem};

fn main() -> qrelay::Result<()> {
    let ch = bit_pipe_relay()?;
    println!("hadamard: {}", is_hadamard(&ch)?);
    let a = Subsystem::quantum("A", 2);
    let d = Subsystem::quantum("D", 2);
    let sender = vec![DensityOperator::basis(a.clone(), 0)?, DensityOperator::basis(a, 1)?];
    let relay = vec![DensityOperator::basis(d, 0)?];
    for bias in [0.5, 0.2, 0.05] {
        let ens = Ensemble::new(
            vec![Subsystem::classical(X0, 2), Subsystem::classical(X1, 1)],
            vec![bias, 1.0 - bias],
            BTreeMap::from([(X0.to_string(), sender.clone()), (X1.to_string(), relay.clone())]),
        )?;
        let r = eval_hadamard_capacity(&ch, &ens)?;
        println!("P(X0=0) = {bias:<4}  rate {:.6}  (I(X0X1;B) {:.6}, I(X0;Y1|X1) {:.6})", r.rate, r.multicast, r.relay_decode);
    }
    Ok(())
}
