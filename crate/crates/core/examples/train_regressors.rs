// Fits all four model families on one synthetic feature matrix and
// compares their test QWK.
//
// cargo run --release --example train_regressors

use hindi_aes::corpus::{normalize_score, split, SplitPart};
use hindi_aes::embeddings::load_vectors;
use hindi_aes::eval::evaluate_predictions;
use hindi_aes::features::{DocumentFrequency, ExtractionConfig, FeatureExtractor, FeatureSet};
use hindi_aes::models::{ForestParams, GbtParams, ModelSpec, TrainedModel};
use hindi_aes::synth::{generate, SynthConfig};
use hindi_aes::textseg::{SegmentedText, Stopwords};

pub fn run() -> hindi_aes::Result<String> {
    let data = generate(&SynthConfig {
        n_essays: 300,
        ..Default::default()
    });
    let table = load_vectors(data.lexicon.vector_file().as_bytes(), None)?;
    let stopwords = Stopwords::hindi_default();
    let parts = split(&data.records, 1)?;

    let segmented: Vec<SegmentedText> = data
        .records
        .iter()
        .map(|r| SegmentedText::segment(&r.text, &stopwords))
        .collect();
    let doc_freq = DocumentFrequency::from_documents(
        data.records
            .iter()
            .zip(&segmented)
            .filter(|(r, _)| parts.train.contains(&r.essay_id))
            .map(|(_, s)| s),
    );
    let lexicon = table.vocabulary();
    let extractor = FeatureExtractor {
        stopwords: &stopwords,
        lexicon: &lexicon,
        doc_freq: &doc_freq,
        embedder: Some(&table),
        config: ExtractionConfig::default(),
    };
    let set = FeatureSet::default();

    let (mut x_train, mut y_train, mut x_test, mut gold_test) = (vec![], vec![], vec![], vec![]);
    for (rec, seg) in data.records.iter().zip(&segmented) {
        let x = extractor.extract_segmented(seg)?.to_inputs(&set);
        let gold = rec.gold_score.expect("synthetic essays are scored");
        match parts.part_of(&rec.essay_id) {
            Some(SplitPart::Train) => {
                x_train.push(x);
                y_train.push(normalize_score(gold, &data.prompt)?);
            }
            Some(SplitPart::Test) => {
                x_test.push(x);
                gold_test.push(gold);
            }
            _ => {}
        }
    }

    let specs = [
        ModelSpec::linear(),
        ModelSpec::svr(),
        ModelSpec::RandomForest(ForestParams {
            n_trees: 50,
            ..Default::default()
        }),
        ModelSpec::Gbt(GbtParams::default()),
    ];
    let mut out = String::new();
    for spec in specs {
        let model = TrainedModel::fit(spec, set, &x_train, &y_train, data.prompt.clone(), 1)?;
        let preds = x_test
            .iter()
            .map(|x| model.predict(x))
            .collect::<hindi_aes::Result<Vec<_>>>()?;
        let report = evaluate_predictions(&data.prompt, &gold_test, &preds)?;
        out += &format!("{:<14} test QWK {:.4}\n", model.kind(), report.qwk);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> hindi_aes::Result<()> {
    print!("{}", run()?);
    Ok(())
}
