//! Regenerate the bundled JSON files under `fixtures/` from the presets.

fn main() -> qrelay::Result<()> {
    let dir = qrelay::fixtures::fixture_dir();
    std::fs::create_dir_all(&dir)?;
    for (name, text) in qrelay::fixtures::bundled()? {
        std::fs::write(dir.join(name), text)?;
        println!("wrote {name}");
    }
    Ok(())
}
