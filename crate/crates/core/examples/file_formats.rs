//! Channels and configurations as JSON files, and the library side of the
//! command line: build a run manifest and render its table.
//!
//! ```bash
//! cargo run --example file_formats
//! ```

use qrelay::cli::{cmd_classify, cmd_eval, Command, RunManifest};
use qrelay::fixtures::fixture_path;
use qrelay::formats::{load_channel, to_json, ChannelFile};

fn main() -> qrelay::Result<()> {
    let dep = ChannelFile::Depolarizing { p: 0.2, q: 0.5 };
    print!("depolarizing channel file:\n{}", to_json(&dep)?);
    let loaded = dep.build()?;
    println!("outputs: {:?}\n", loaded.channel().output_names());

    let wired = load_channel(&fixture_path("wired_relay.json"))?;
    println!("wired relay roles: {:?}\n", wired.relay()?.roles());

    let m = RunManifest::new(Command::Eval)
        .with_channel(fixture_path("depolarizing.json"))
        .with_config(fixture_path("depolarizing_mf.json"));
    println!("manifest {}", m.hash()?);
    print!("{}", cmd_eval(&m)?.to_pretty());

    let m = RunManifest::new(Command::Classify).with_channel(fixture_path("bit_pipe.json"));
    print!("\n{}", cmd_classify(&m)?.to_pretty());
    Ok(())
}
