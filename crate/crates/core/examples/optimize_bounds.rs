//! Random-restart Nelder-Mead over input ensembles. The binary symmetric
//! channel has capacity 1 − h(flip); measure-forward on the depolarizing
//! relay should recover 1 − h(p ∗ q/2).
//!
//! ```bash
//! cargo run --release --example optimize_bounds
//! ```

use qrelay::bounds::eval_depolarizing_closed_form;
use qrelay::channels::make_depolarizing_relay;
use qrelay::entropy::binary_entropy;
use qrelay::optimizer::{optimize_mf, optimize_pdf, MfSpace, OptimizerConfig, PdfSpace, StateKind};
use qrelay::presets::bsc_cq_relay;
use qrelay::qlin::Povm;

fn main() -> qrelay::Result<()> {
    let cfg = OptimizerConfig::default();
    for flip in [0.1, 0.25] {
        let ch = bsc_cq_relay(flip)?;
        let space = PdfSpace::for_channel(&ch, 1, 2, 1, StateKind::Basis)?;
        let o = optimize_pdf(&ch, &space, &cfg)?;
        println!("BSC({flip}): optimizer {:.6}, 1 - h(flip) = {:.6}", o.best_rate, 1.0 - binary_entropy(flip));
    }

    let (p, q) = (0.1, 0.3);
    let ch = make_depolarizing_relay(p, q)?;
    let space = MfSpace::for_channel(&ch, (2, 2, 2, 2), StateKind::Basis, Some(Povm::computational(2)))?;
    let o = optimize_mf(&ch, &space, &cfg)?;
    println!("depolarizing MF: optimizer {:.6}, closed form {:.6}", o.best_rate, eval_depolarizing_closed_form(p, q)?);
    for t in &o.trace {
        let rate = t.best_rate.map_or("infeasible".to_string(), |r| format!("{r:.6}"));
        println!("  restart {} ({} evals): {rate}", t.index, t.evals);
    }
    Ok(())
}
