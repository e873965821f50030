//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints exactly one PASS/FAIL line; the process fails if any
//! check does.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use common::*;
use qrelay::bounds::{
    depolarizing_mf_config, eval_af, eval_full_df, eval_mf, eval_pdf, BoundRecord, Ensemble, U, X0, X1,
};
use qrelay::channels::{is_degraded, make_depolarizing_relay, make_hadamard_relay, HadamardSpec, RelayChannel, Roles};
use qrelay::cli::{cmd_optimize, Command, RunManifest};
use qrelay::codesim::{direct_table, gentle_measurement_check, simulate_direct_code, typical_projector, SimulationParams};
use qrelay::entropy::{conditional_mutual_information, mutual_information, von_neumann_entropy};
use qrelay::fixtures::fixture_path;
use qrelay::formats::{load_channel, load_config, ConfigFile};
use qrelay::optimizer::{optimize_pdf, OptimizerConfig, PdfSpace, StateKind};
use qrelay::presets::{bsc_cq_relay, pure_pair_cq_relay};
use qrelay::qlin::{identity, CMatrix, DensityOperator, Subsystem};
use rand::Rng;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(t: Instant, budget: Duration) -> Result<(), String> {
    ensure(t.elapsed() <= budget, || format!("took {:?}, budget {:?}", t.elapsed(), budget))
}

fn q(name: &str, d: usize) -> Subsystem {
    Subsystem::quantum(name, d)
}

// 36-point grid against 1 − h(p ∗ q/2), computed here from scratch.
fn depolarizing_grid() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for p in [0.0, 0.1, 0.2, 0.3, 0.4, 0.5] {
        for q in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0] {
            let ch = make_depolarizing_relay(p, q).map_err(|e| e.to_string())?;
            let r = eval_mf(&ch, &depolarizing_mf_config(q / 2.0).unwrap()).map_err(|e| e.to_string())?;
            let a = q / 2.0;
            let want = 1.0 - h2(p * (1.0 - a) + (1.0 - p) * a);
            worst = worst.max((r.rate - want).abs());
            worst_gap = worst_gap.max((r.lhs_constraint - r.rhs_constraint).abs());
            ensure(r.feasible, || format!("infeasible at p={p} q={q}"))?;
        }
    }
    ensure(worst <= 1e-9, || format!("rate deviation {worst:.3e}"))?;
    ensure(worst_gap <= 1e-9, || format!("|lhs - rhs| up to {worst_gap:.3e}"))?;
    within_budget(t, Duration::from_secs(10))?;
    Ok(format!("max rate deviation {worst:.1e}, max |lhs-rhs| {worst_gap:.1e}, {:?}", t.elapsed()))
}

// Bundled wired relay with the bundled decode-forward and superdense
// assist-forward configurations.
fn wired_relay_capacity() -> Outcome {
    let t = Instant::now();
    let loaded = load_channel(&fixture_path("wired_relay.json")).map_err(|e| e.to_string())?;
    let ch = loaded.relay().map_err(|e| e.to_string())?;
    let ConfigFile::Pdf { ensemble } = load_config(&fixture_path("wired_pdf.json")).unwrap() else {
        return Err("wired_pdf.json is not a pdf config".into());
    };
    let pdf = eval_pdf(ch, &ensemble.build().unwrap()).map_err(|e| e.to_string())?;
    let ConfigFile::Af { ens1, ens2, g0, g1, g2, floor_q } = load_config(&fixture_path("wired_af.json")).unwrap() else {
        return Err("wired_af.json is not an af config".into());
    };
    let cfg = qrelay::formats::af_from_parts(&ens1, &ens2, [&g0, &g1, &g2], floor_q).map_err(|e| e.to_string())?;
    let af = eval_af(ch, &cfg).map_err(|e| e.to_string())?;
    ensure((pdf.rate - 2.0).abs() <= 1e-9, || format!("pdf rate {}", pdf.rate))?;
    ensure((af.rate - 2.0).abs() <= 1e-9, || format!("af rate {}", af.rate))?;
    for (name, v) in af.bracket() {
        ensure((v - 2.0).abs() <= 1e-9, || format!("af term {name} = {v}"))?;
    }
    within_budget(t, Duration::from_secs(5))?;
    Ok(format!("pdf {:.12}, af {:.12} with terms (2, 2, 2), {:?}", pdf.rate, af.rate, t.elapsed()))
}

fn random_relay(r: &mut rand_chacha::ChaCha8Rng) -> RelayChannel {
    let ch = random_channel(r, vec![q("A", 2), q("D", 2)], vec![q("B", 2), q("E", 2)]);
    let roles = Roles {
        sender_in: vec!["A".into()],
        relay_in: "D".into(),
        dest_out_1: vec!["B".into()],
        dest_out_2: vec![],
        relay_out: "E".into(),
    };
    RelayChannel::new(ch, roles).unwrap()
}

fn random_pmf(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| r.random::<f64>() + 0.05).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

// Independent Holevo quantity from the output states and eigenvalues.
fn holevo_oracle(ch: &RelayChannel, p: &[f64], sender: &[DensityOperator], zeta: &DensityOperator) -> f64 {
    let outs: Vec<CMatrix> = sender
        .iter()
        .map(|s| ch.output(s, zeta).unwrap().partial_trace(&["B"]).unwrap().into_matrix())
        .collect();
    let avg = outs.iter().zip(p).fold(CMatrix::zeros(2, 2), |a, (o, w)| a + o.scale(*w));
    entropy_oracle(&avg) - outs.iter().zip(p).map(|(o, w)| w * entropy_oracle(o)).sum::<f64>()
}

// Trivial U gives the Holevo quantity; U = X0 gives full decode-forward.
fn reduction_identities() -> Outcome {
    let mut r = rng(3);
    let (mut d1, mut d2): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let ch = random_relay(&mut r);
        let k0 = r.random_range(2..=3);
        let sender: Vec<DensityOperator> = (0..k0).map(|_| random_state(&mut r, vec![q("A", 2)])).collect();
        let zeta = random_state(&mut r, vec![q("D", 2)]);
        let p0 = random_pmf(&mut r, k0);

        let trivial = Ensemble::new(
            vec![Subsystem::classical(U, 1), Subsystem::classical(X0, k0), Subsystem::classical(X1, 1)],
            p0.clone(),
            BTreeMap::from([(X0.to_string(), sender.clone()), (X1.to_string(), vec![zeta.clone()])]),
        )
        .unwrap();
        let pdf = eval_pdf(&ch, &trivial).map_err(|e| e.to_string())?;
        d1 = d1.max((pdf.rate - holevo_oracle(&ch, &p0, &sender, &zeta)).abs());

        let relay_states: Vec<DensityOperator> = (0..2).map(|_| random_state(&mut r, vec![q("D", 2)])).collect();
        let pj = random_pmf(&mut r, k0 * 2);
        let mut pmf = vec![0.0; k0 * k0 * 2];
        for x0 in 0..k0 {
            for x1 in 0..2 {
                pmf[(x0 * k0 + x0) * 2 + x1] = pj[x0 * 2 + x1];
            }
        }
        let tables = BTreeMap::from([(X0.to_string(), sender.clone()), (X1.to_string(), relay_states.clone())]);
        let copy = Ensemble::new(
            vec![Subsystem::classical(U, k0), Subsystem::classical(X0, k0), Subsystem::classical(X1, 2)],
            pmf,
            tables.clone(),
        )
        .unwrap();
        let plain = Ensemble::new(vec![Subsystem::classical(X0, k0), Subsystem::classical(X1, 2)], pj, tables).unwrap();
        let a = eval_pdf(&ch, &copy).map_err(|e| e.to_string())?.rate;
        let b = eval_full_df(&ch, &plain).map_err(|e| e.to_string())?.rate;
        d2 = d2.max((a - b).abs());
    }
    ensure(d1 <= 1e-10, || format!("trivial-U deviation from Holevo {d1:.3e}"))?;
    ensure(d2 <= 1e-10, || format!("U = X0 deviation from full decode-forward {d2:.3e}"))?;
    Ok(format!("20 channels, max deviations {d1:.1e} and {d2:.1e}"))
}

fn random_hadamard(r: &mut rand_chacha::ChaCha8Rng) -> RelayChannel {
    let ny = r.random_range(2..=4);
    let measure = random_povm(r, 4, ny);
    let prepare = (0..ny).map(|_| random_state(r, vec![q("B", 2)])).collect();
    make_hadamard_relay(&HadamardSpec { sender: vec![q("A", 2)], relay_in: q("D", 2), measure, prepare, relay_out: "Y1".into() })
        .unwrap()
}

fn degradedness_classifier() -> Outcome {
    let t = Instant::now();
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let d = is_degraded(&random_hadamard(&mut r)).map_err(|e| e.to_string())?;
        ensure(d.degraded, || format!("random Hadamard channel {i} not degraded (residual {:.3e})", d.residual))?;
        worst = worst.max(d.residual);
    }
    ensure(worst <= 1e-6, || format!("residual {worst:.3e}"))?;
    let wired = load_channel(&fixture_path("wired_relay.json")).map_err(|e| e.to_string())?;
    let w = is_degraded(wired.relay().unwrap()).map_err(|e| e.to_string())?;
    ensure(!w.degraded && w.residual >= 0.1, || format!("wired relay: degraded={} residual {:.3e}", w.degraded, w.residual))?;
    within_budget(t, Duration::from_secs(30))?;
    Ok(format!("50 Hadamard channels, worst residual {worst:.1e}; wired residual {:.3}, {:?}", w.residual, t.elapsed()))
}

fn entropic_properties() -> Outcome {
    let mut r = rng(5);
    for i in 0..500 {
        let d = r.random_range(2..=8);
        let rho = random_state(&mut r, vec![q("A", d)]);
        let h = von_neumann_entropy(&rho).map_err(|e| e.to_string())?;
        ensure(h >= 0.0 && h <= (d as f64).log2() + 1e-9, || format!("state {i}: H = {h} for d = {d}"))?;
    }
    for i in 0..200 {
        let rho = random_state(&mut r, vec![q("A", 2), q("B", 2), q("C", 2)]);
        let v = conditional_mutual_information(&rho, &["A"], &["B"], &["C"]).map_err(|e| e.to_string())?;
        ensure(v >= -1e-8, || format!("state {i}: I(A;B|C) = {v:.3e}"))?;
    }
    for i in 0..100 {
        let da = r.random_range(2..=3);
        let rho = random_state(&mut r, vec![q("R", 2), q("A", da)]);
        let ch = random_channel(&mut r, vec![q("A", da)], vec![q("B", 2)]);
        let before = mutual_information(&rho, &["R"], &["A"]).map_err(|e| e.to_string())?;
        let after = mutual_information(&ch.apply(&rho).unwrap(), &["R"], &["B"]).map_err(|e| e.to_string())?;
        ensure(after <= before + 1e-8, || format!("pair {i}: I(R;B) = {after} > I(R;A) = {before}"))?;
    }
    Ok("500 entropy ranges, 200 strong subadditivity, 100 data processing".into())
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

// Uniform bit: every type count is binomial, so the rank and all three
// constants are known in closed form.
fn typical_projector_constants() -> Outcome {
    let half = identity(2).unscale(2.0);
    for n in [6usize, 8, 10] {
        for delta in [0.2, 0.4] {
            let tp = typical_projector(&half, n, delta).map_err(|e| e.to_string())?;
            let rank: u64 = (0..=n as u64)
                .filter(|&k| (k as f64 / n as f64 - 0.5).abs() <= 0.5 * delta + 1e-12)
                .map(|k| binomial(n as u64, k))
                .sum();
            let nf = n as f64;
            let mass = rank as f64 / 2f64.powi(n as i32);
            let eps = 4.0 * (-nf * 0.5 * delta * delta).exp();
            ensure(tp.sequences.len() as u64 == rank, || format!("n={n} δ={delta}: rank {} vs {rank}", tp.sequences.len()))?;
            ensure((tp.projector.trace().re - rank as f64).abs() < 1e-9, || "projector trace differs from rank".into())?;
            ensure(mass >= 1.0 - eps, || format!("n={n} δ={delta}: mass {mass} < 1 - {eps}"))?;
            ensure(rank as f64 <= 2f64.powf(nf * (1.0 + delta)), || "rank above 2^{n(1+δ)H}".into())?;
            ensure(2f64.powf(-nf) <= 2f64.powf(-nf * (1.0 - delta)), || "sandwich bound".into())?;
            ensure(tp.checks.all_hold(), || format!("n={n} δ={delta}: reported checks {:?}", tp.checks))?;
            ensure((tp.checks.mass - mass).abs() < 1e-12, || "reported mass differs".into())?;
        }
    }
    let tp = typical_projector(&half, 8, 0.3).map_err(|e| e.to_string())?;
    ensure(tp.sequences.len() == 182, || format!("n=8 δ=0.3 rank {}", tp.sequences.len()))?;
    Ok("n ∈ {6, 8, 10}, δ ∈ {0.2, 0.4} all hold; n=8 δ=0.3 rank 182".into())
}

fn packing_simulation() -> Outcome {
    let t = Instant::now();
    let table = direct_table(&pure_pair_cq_relay().unwrap(), 0).unwrap();
    let p = [0.5, 0.5];
    // Holevo information of {|0⟩, |+⟩}: binary entropy of cos²(π/8)
    let holevo = h2(0.5 + 0.5 * 0.5f64.sqrt());
    let run = |frac: f64, n: usize| {
        let params = SimulationParams { rate: frac * holevo, n, delta: 0.5, code_delta: None, trials: 50, seed: 42 };
        simulate_direct_code(&table, &p, &params).map_err(|e| e.to_string())
    };
    let low3 = run(0.5, 3)?;
    let low6 = run(0.5, 6)?;
    let high6 = run(1.5, 6)?;
    ensure((low3.holevo - holevo).abs() < 1e-12, || format!("holevo {} vs {holevo}", low3.holevo))?;
    for rec in [&low3, &low6, &high6] {
        for tr in &rec.trials {
            ensure(tr.error <= tr.bound.min(1.0) + 1e-9, || {
                format!("n={} trial {}: error {} above bound {}", rec.params.n, tr.trial, tr.error, tr.bound)
            })?;
        }
    }
    ensure(low6.mean_error < low3.mean_error, || format!("mean error {} at n=6 vs {} at n=3", low6.mean_error, low3.mean_error))?;
    ensure(high6.mean_error > 0.2, || format!("mean error above capacity {}", high6.mean_error))?;
    within_budget(t, Duration::from_secs(120))?;
    Ok(format!(
        "bound holds in 150 codebooks; R=0.5χ: {:.4} (n=3) > {:.4} (n=6); R=1.5χ: {:.4}; {:?}",
        low3.mean_error,
        low6.mean_error,
        high6.mean_error,
        t.elapsed()
    ))
}

fn gentle_measurement() -> Outcome {
    let mut r = rng(8);
    let mut count = 0;
    let mut worst_ratio: f64 = 0.0;
    while count < 200 {
        let d = r.random_range(2..=4);
        let rank = r.random_range(1..=d);
        let rho = random_density_matrix(&mut r, d, rank);
        let lam = random_effect(&mut r, d);
        if (&lam * &rho).trace().re < 0.5 {
            continue;
        }
        count += 1;
        let g = gentle_measurement_check(&rho, &lam).map_err(|e| e.to_string())?;
        ensure(g.holds && g.trace_distance <= 2.0 * g.delta.sqrt() + 1e-9, || format!("pair {count}: {g:?}"))?;
        if g.bound > 0.0 {
            worst_ratio = worst_ratio.max(g.trace_distance / g.bound);
        }
    }
    Ok(format!("200 pairs, largest distance/bound ratio {worst_ratio:.3}"))
}

// Exhaustive pmf grid with step 1e-3 is the oracle for the binary symmetric
// channel.
fn optimizer_sanity() -> Outcome {
    let t = Instant::now();
    for flip in [0.1, 0.25] {
        let oracle = (0..=1000)
            .map(|i| {
                let a = i as f64 / 1000.0;
                h2(a * (1.0 - flip) + (1.0 - a) * flip) - h2(flip)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let ch = bsc_cq_relay(flip).unwrap();
        let space = PdfSpace::for_channel(&ch, 1, 2, 1, StateKind::Basis).unwrap();
        let best = optimize_pdf(&ch, &space, &OptimizerConfig::default()).map_err(|e| e.to_string())?.best_rate;
        ensure((best - oracle).abs() <= 1e-4, || format!("flip {flip}: optimizer {best} vs grid {oracle}"))?;
        ensure((oracle - (1.0 - h2(flip))).abs() <= 1e-9, || "grid oracle misses 1 - h(flip)".into())?;
    }
    let m = RunManifest::new(Command::Optimize)
        .with_channel(fixture_path("depolarizing.json"))
        .with_config(fixture_path("optimize_mf.json"));
    let first = cmd_optimize(&m).map_err(|e| e.to_string())?;
    let second = cmd_optimize(&m).map_err(|e| e.to_string())?;
    let closed = 1.0 - h2(0.1 * 0.85 + 0.9 * 0.15);
    let best: f64 = first.table.rows.last().unwrap()[5].parse().unwrap();
    ensure(best >= closed - 1e-4, || format!("mf optimizer {best} vs closed form {closed}"))?;
    let (a, b) = (first.table.to_csv().unwrap(), second.table.to_csv().unwrap());
    ensure(a == b, || "repeated seed-42 runs differ".into())?;
    Ok(format!("bsc within 1e-4 of grid; mf {best:.6} vs {closed:.6}; identical CSV bytes; {:?}", t.elapsed()))
}

fn main() {
    let checks: [Check; 9] = [
        ("depolarizing relay closed form over the 6x6 grid", depolarizing_grid),
        ("wired relay capacity 2 by decode-forward and assist-forward", wired_relay_capacity),
        ("decode-forward reductions on 20 random relays", reduction_identities),
        ("degradedness classifier", degradedness_classifier),
        ("entropic inequalities on random states", entropic_properties),
        ("typical projector constants", typical_projector_constants),
        ("random codes with square-root decoding", packing_simulation),
        ("gentle measurement on 200 random pairs", gentle_measurement),
        ("optimizer against grid and closed form, determinism", optimizer_sanity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        match f() {
            Ok(detail) => println!("[PASS] {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
