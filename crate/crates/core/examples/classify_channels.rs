//! Structural tests on the preset relay channels.
//!
//! ```bash
//! cargo run --example classify_channels
//! ```

use qrelay::channels::{classify, make_depolarizing_relay, make_wired_relay, RelayChannel};
use qrelay::presets::{anti_degraded_cq_relay, bit_pipe_relay, bsc_cq_relay};

fn main() -> qrelay::Result<()> {
    let channels: Vec<(&str, RelayChannel)> = vec![
        ("wired relay", make_wired_relay()?),
        ("depolarizing p=0.1 q=0.3", make_depolarizing_relay(0.1, 0.3)?),
        ("bit pipe (Hadamard)", bit_pipe_relay()?),
        ("BSC c-q, flip 0.1", bsc_cq_relay(0.1)?),
        ("anti-degraded c-q", anti_degraded_cq_relay(&[0.05, 0.2], 0.1)?),
    ];
    println!("{:<28} {:>9} {:>10} {:>6} {:>9} {:>5}", "channel", "degraded", "I(R;B|E)", "orc", "hadamard", "c-q");
    for (name, ch) in &channels {
        let r = classify(ch)?;
        let orc = match r.orc {
            Some((yes, _)) => if yes { "yes" } else { "no" },
            None => "n/a",
        };
        println!(
            "{name:<28} {:>9} {:>10.4} {orc:>6} {:>9} {:>5}",
            r.degraded.degraded, r.degraded.residual, r.hadamard, r.classical_quantum
        );
    }
    Ok(())
}
