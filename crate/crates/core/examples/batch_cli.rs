// Prepares a directory the `aes` binary can run against and prints the
// commands to try.
//
// cargo run --example batch_cli -- <dir>
// cargo run --bin aes -- featurize --config <dir>/config.json

use std::path::{Path, PathBuf};

use hindi_aes::synth::{generate, SynthConfig};

pub fn prepare(dir: &Path) -> hindi_aes::Result<PathBuf> {
    generate(&SynthConfig {
        n_essays: 200,
        n_raters: 2,
        ..Default::default()
    })
    .write_to(dir)?;
    let config = dir.join("config.json");
    std::fs::copy(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/config/batch.json"),
        &config,
    )
    .map_err(|e| hindi_aes::AesError::Config(format!("copying the sample config: {e}")))?;
    Ok(config)
}

pub fn run() -> hindi_aes::Result<String> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("aes-batch-example"));
    let config = prepare(&dir)?;
    let c = config.display();
    Ok(format!(
        "wrote {c}\n\
         aes featurize --config {c}\n\
         aes train     --config {c}\n\
         aes predict   --config {c}\n\
         aes evaluate  --config {c}\n\
         aes report    --config {c}\n"
    ))
}

#[allow(dead_code)]
fn main() -> hindi_aes::Result<()> {
    print!("{}", run()?);
    Ok(())
}
