//! The JSON files bundled under `fixtures/`, generated from [`crate::presets`].
//!
//! `cargo run --example write_fixtures` rewrites them; a test checks that the
//! files on disk still match.

use std::path::PathBuf;

use crate::bounds::{depolarizing_mf_config, uniform};
use crate::channels::make_wired_relay;
use crate::error::Result;
use crate::formats::{to_json, ChannelFile, ConfigFile, MatrixJson, Target};
use crate::optimizer::StateKind;
use crate::presets::{bit_pipe_spec, bsc_cq_table, pure_pair_cq_table, wired_af_config, wired_pdf_ensemble};
use crate::qlin::Subsystem;

/// Directory holding the bundled files.
pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixture_dir().join(name)
}

fn cq(table: &[crate::qlin::DensityOperator]) -> ChannelFile {
    ChannelFile::cq(Subsystem::classical("X", 2), Subsystem::classical("X1", 1), table, "E")
}

/// `(file name, contents)` for every bundled file.
pub fn bundled() -> Result<Vec<(&'static str, String)>> {
    let grid = |v: &[f64]| v.to_vec();
    let malformed = ChannelFile::Kraus {
        inputs: vec![Subsystem::quantum("A", 2)],
        outputs: vec![Subsystem::quantum("B", 2)],
        kraus: vec![serde_json::from_str::<MatrixJson>("[[1, 0], [0, 0.83666002653407556]]")?],
        roles: None,
    };
    Ok(vec![
        ("wired_relay.json", to_json(&ChannelFile::from_relay(&make_wired_relay()?))?),
        ("depolarizing.json", to_json(&ChannelFile::Depolarizing { p: 0.1, q: 0.3 })?),
        ("bit_pipe.json", to_json(&ChannelFile::hadamard(&bit_pipe_spec()?))?),
        ("bsc_cq.json", to_json(&cq(&bsc_cq_table(0.1)?))?),
        ("pure_pair_cq.json", to_json(&cq(&pure_pair_cq_table()?))?),
        ("malformed_kraus.json", to_json(&malformed)?),
        ("wired_pdf.json", to_json(&ConfigFile::pdf(&wired_pdf_ensemble()?))?),
        ("wired_af.json", to_json(&ConfigFile::af(&wired_af_config()?))?),
        ("depolarizing_mf.json", to_json(&ConfigFile::mf(&depolarizing_mf_config(0.15)?))?),
        (
            "sweep.json",
            to_json(&ConfigFile::Sweep {
                p: grid(&[0.0, 0.1, 0.2, 0.3, 0.4, 0.5]),
                q: grid(&[0.0, 0.2, 0.4, 0.6, 0.8, 1.0]),
                optimize: false,
            })?,
        ),
        (
            "simulate_pure_pair.json",
            to_json(&ConfigFile::Simulate {
                pmf: uniform(2),
                rates: Vec::new(),
                holevo_fractions: vec![0.5, 1.5],
                n: vec![3, 6],
                delta: 0.5,
                code_delta: None,
                trials: 50,
                relay_value: 0,
            })?,
        ),
        (
            "simulate_bsc.json",
            to_json(&ConfigFile::Simulate {
                pmf: uniform(2),
                rates: vec![0.3],
                holevo_fractions: Vec::new(),
                n: vec![3, 6],
                delta: 1.5,
                code_delta: None,
                trials: 50,
                relay_value: 0,
            })?,
        ),
        (
            "optimize_pdf.json",
            to_json(&ConfigFile::Optimize { target: Target::Pdf, state_kind: StateKind::Basis, fixed_povm: false, max_evals: None })?,
        ),
        (
            "optimize_mf.json",
            to_json(&ConfigFile::Optimize { target: Target::Mf, state_kind: StateKind::Basis, fixed_povm: true, max_evals: None })?,
        ),
    ])
}
