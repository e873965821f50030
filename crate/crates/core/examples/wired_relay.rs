//! The two-qubit wired relay reaches 2 bits per use both by partial
//! decode-forward and by superdense-coding assist-forward.
//!
//! ```bash
//! cargo run --example wired_relay
//! ```

use qrelay::bounds::{eval_af, eval_pdf, BoundRecord};
use qrelay::channels::make_wired_relay;
use qrelay::presets::{wired_af_config, wired_pdf_ensemble};

fn show(name: &str, r: &impl BoundRecord) {
    println!("{name}: rate {:.6}, binding {}", r.rate(), r.binding(1e-9).join(" + "));
    for (t, v) in r.terms() {
        println!("    {t:<18} {v:.6}");
    }
}

fn main() -> qrelay::Result<()> {
    let ch = make_wired_relay()?;
    show("partial decode-forward", &eval_pdf(&ch, &wired_pdf_ensemble()?)?);
    show("assist-forward", &eval_af(&ch, &wired_af_config()?)?);
    Ok(())
}
