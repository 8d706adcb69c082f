// Full feature vectors for two essays, with coherence from a toy
// vector table.
//
// cargo run --example readability_features

use hindi_aes::embeddings::load_vectors;
use hindi_aes::features::{readability, ExtractionConfig, FeatureSet};
use hindi_aes::pipeline::featurize_texts;

const VECTORS: &str = "6 3
पर्यावरण 1.0 0.1 0.0
प्रदूषण 0.9 0.2 0.0
वृक्ष 0.8 0.0 0.1
क्रिकेट 0.0 1.0 0.1
खिलाड़ी 0.1 0.9 0.0
मैदान 0.0 0.8 0.2
";

pub fn run() -> hindi_aes::Result<String> {
    let table = load_vectors(VECTORS.as_bytes(), None)?;
    let focused = "पर्यावरण की रक्षा ज़रूरी है। प्रदूषण बढ़ रहा है। वृक्ष लगाना चाहिए। \
                   पर्यावरण हमारा भविष्य है। प्रदूषण कम करना होगा। वृक्ष जीवन देते हैं।";
    // coherence compares sentences four apart, so the topic switch halfway
    // through pairs environment sentences with cricket ones
    let drifting = "पर्यावरण की रक्षा ज़रूरी है। प्रदूषण बढ़ रहा है। वृक्ष लगाना चाहिए। \
                    खिलाड़ी मैदान में आए। क्रिकेट मुझे पसंद है। मैदान बड़ा था।";
    let config = ExtractionConfig {
        features: FeatureSet {
            coherence: true,
            juk: true,
        },
        ..Default::default()
    };
    let rows = featurize_texts(&[focused, drifting], Some(&table), config)?;

    let mut out = String::new();
    for (name, fv) in ["focused", "drifting"].iter().zip(&rows) {
        out += &format!("{name}:\n");
        for (col, v) in config
            .features
            .names()
            .iter()
            .zip(fv.to_inputs(&config.features))
        {
            out += &format!("  {col:<20} {v:.4}\n");
        }
    }
    out += &format!("readability at AWL 0, PSW 0: {}\n", readability(0.0, 0));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> hindi_aes::Result<()> {
    print!("{}", run()?);
    Ok(())
}
