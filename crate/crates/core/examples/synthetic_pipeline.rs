// Writes a synthetic corpus to a temporary directory and runs the file
// pipeline end to end: featurize, train GBT, evaluate.
//
// cargo run --release --example synthetic_pipeline

use hindi_aes::models::ModelSpec;
use hindi_aes::pipeline::{run_all, Run, RunConfig};
use hindi_aes::synth::{generate, SynthConfig};

pub fn run() -> hindi_aes::Result<String> {
    let dir = std::env::temp_dir().join(format!("aes-synthetic-{}", std::process::id()));
    generate(&SynthConfig {
        n_essays: 500,
        ..Default::default()
    })
    .write_to(&dir)?;
    let config = RunConfig {
        prompts: Some("prompts.tsv".into()),
        vectors: Some("vectors.txt".into()),
        ..RunConfig::new("corpus.tsv", 42, ModelSpec::gbt())
    };
    let run = Run::from_config(config, &dir, None, None)?;
    let report = run_all(&run);
    let _ = std::fs::remove_dir_all(&dir);
    Ok(report?.to_table())
}

#[allow(dead_code)]
fn main() -> hindi_aes::Result<()> {
    print!("{}", run()?);
    Ok(())
}
