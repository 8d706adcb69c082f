// Quadratic weighted kappa on a prompt scale, with the matrices behind it.
//
// cargo run --example quadratic_weighted_kappa

use hindi_aes::corpus::PromptSpec;
use hindi_aes::eval::{qwk, RatingMatrixSet};

pub fn run() -> hindi_aes::Result<String> {
    // scores 2..=12 become indices 0..=10
    let prompt = PromptSpec::new("P1", 2, 12)?;
    let gold = [8, 9, 10, 6, 7, 12, 4, 8, 9, 11];
    let predicted = [8, 8, 10, 7, 7, 11, 5, 9, 9, 10];
    let mut out = format!("QWK {:.4}\n", qwk(&gold, &predicted, &prompt)?);

    let small = PromptSpec::new("P3", 0, 3)?;
    let m = RatingMatrixSet::build(&[0, 1, 2, 3, 3], &[0, 1, 1, 3, 2], &small)?;
    out += "weights:\n";
    for row in &m.weights {
        out += &format!("  {row:?}\n");
    }
    out += "observed:\n";
    for row in &m.observed {
        out += &format!("  {row:?}\n");
    }
    out += &format!("kappa {:.4}\n", m.kappa());

    let flipped = qwk(&[0, 0, 1, 1], &[1, 1, 0, 0], &PromptSpec::new("B", 0, 1)?)?;
    out += &format!("complete disagreement on two levels: {flipped}\n");
    Ok(out)
}

#[allow(dead_code)]
fn main() -> hindi_aes::Result<()> {
    print!("{}", run()?);
    Ok(())
}
