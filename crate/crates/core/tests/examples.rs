//! Runs every example's `run()` so the walkthroughs cannot rot.

mod segment_devanagari {
    include!("../examples/segment_devanagari.rs");
}
mod readability_features {
    include!("../examples/readability_features.rs");
}
mod quadratic_weighted_kappa {
    include!("../examples/quadratic_weighted_kappa.rs");
}
mod inter_rater_agreement {
    include!("../examples/inter_rater_agreement.rs");
}
mod train_regressors {
    include!("../examples/train_regressors.rs");
}
mod synthetic_pipeline {
    include!("../examples/synthetic_pipeline.rs");
}
mod batch_cli {
    include!("../examples/batch_cli.rs");
}

#[test]
fn segmentation_walkthrough() {
    let out = segment_devanagari::run().unwrap();
    // the last sentence holds only a mention and stopwords, so it is dropped
    assert!(out.contains("2 sentences"), "{out}");
    assert!(
        out.contains("उज्ज्वल: 3 graphemes, 3 aksharas, 2 conjuncts"),
        "{out}"
    );
    assert!(!out.contains("@PERSON1") && !out.contains(" ने "), "{out}");
}

#[test]
fn focused_essay_is_more_coherent() {
    let out = readability_features::run().unwrap();
    let coherence: Vec<f64> = out
        .lines()
        .filter(|l| l.trim_start().starts_with("coherence"))
        .map(|l| l.split_whitespace().last().unwrap().parse().unwrap())
        .collect();
    assert_eq!(coherence.len(), 2);
    assert!(coherence[0] > coherence[1], "{out}");
    assert!(out.contains("readability at AWL 0, PSW 0: -2.34"));
}

#[test]
fn kappa_walkthrough() {
    let out = quadratic_weighted_kappa::run().unwrap();
    assert!(
        out.contains("complete disagreement on two levels: -1"),
        "{out}"
    );
}

#[test]
fn rater_walkthrough() {
    let out = inter_rater_agreement::run().unwrap();
    assert!(out.contains("3 raters"));
    assert_eq!(out.matches("rater ").count(), 3, "{out}");
}

#[test]
fn regressor_comparison() {
    let out = train_regressors::run().unwrap();
    for kind in ["linear", "svr", "random_forest", "gbt"] {
        let line = out.lines().find(|l| l.starts_with(kind)).unwrap();
        let q: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
        assert!(q > 0.5, "{line}");
    }
}

#[test]
fn pipeline_walkthrough() {
    let out = synthetic_pipeline::run().unwrap();
    assert!(out.contains("gbt") && out.contains("S1"), "{out}");
}

#[test]
fn batch_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = batch_cli::prepare(dir.path()).unwrap();
    let inv = hindi_aes::pipeline::Invocation {
        config,
        ..Default::default()
    };
    use hindi_aes::pipeline::{run_command, Command};
    for cmd in [
        Command::Featurize,
        Command::Train,
        Command::Predict,
        Command::Evaluate,
    ] {
        run_command(cmd, &inv).unwrap();
    }
    let report = run_command(Command::Report, &inv).unwrap();
    assert!(report.contains("Inter-rater QWK"), "{report}");
}
