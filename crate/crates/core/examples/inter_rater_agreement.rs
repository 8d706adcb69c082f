// Pairwise rater agreement from a corpus with `rater_<k>` columns.
//
// cargo run --example inter_rater_agreement

use hindi_aes::corpus::parse_corpus;
use hindi_aes::eval::{inter_rater_report, rater_table};
use hindi_aes::synth::{generate, SynthConfig};

pub fn run() -> hindi_aes::Result<String> {
    let synthetic = generate(&SynthConfig {
        n_essays: 150,
        n_raters: 3,
        ..Default::default()
    });
    let tsv = synthetic.corpus_tsv();
    let records = parse_corpus(tsv.as_bytes(), std::slice::from_ref(&synthetic.prompt))?;
    let report = inter_rater_report(&rater_table(&records)?, &synthetic.prompt)?;

    let mut out = format!(
        "prompt {}: {} essays, {} raters\n",
        report.prompt_id, report.n_essays, report.n_raters
    );
    for p in &report.pairs {
        out += &format!("  rater {} vs {}: {:.3}\n", p.rater_a, p.rater_b, p.kappa);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> hindi_aes::Result<()> {
    print!("{}", run()?);
    Ok(())
}
