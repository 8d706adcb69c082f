//! Per-essay linguistic features and the z-score scaler fitted on the
//! training split.
//!
//! Six feature families are extracted: essay length, average sentence
//! length, average word length, a Hindi readability score, vocabulary size
//! with an out-of-vocabulary count, and a coherence score from sentence
//! embeddings four sentences apart. The conjunct (jukta-akshar) count is
//! available as an opt-in extra column.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::embeddings::{cosine, SentenceEmbedder};
use crate::error::{AesError, Result};
use crate::textseg::{SegmentedText, Stopwords};

pub const READABILITY_INTERCEPT: f64 = -2.34;
pub const READABILITY_AWL_COEF: f64 = 2.14;
pub const READABILITY_PSW_COEF: f64 = 0.01;

pub const DEFAULT_PSW_THRESHOLD: usize = 3;
pub const DEFAULT_OOV_FREQ_THRESHOLD: usize = 5;
pub const DEFAULT_COHERENCE_OFFSET: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub essay_length: usize,
    pub avg_sentence_length: f64,
    pub avg_word_length: f64,
    pub readability: f64,
    pub vocab_size: usize,
    pub oov_count: usize,
    pub coherence: f64,
    pub juk_count: Option<usize>,
}

/// Which columns a model consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub coherence: bool,
    pub juk: bool,
}

impl Default for FeatureSet {
    fn default() -> Self {
        FeatureSet {
            coherence: true,
            juk: false,
        }
    }
}

impl FeatureSet {
    pub fn names(&self) -> Vec<&'static str> {
        let mut names = vec![
            "essay_length",
            "avg_sentence_length",
            "avg_word_length",
            "readability",
            "vocab_size",
            "oov_count",
        ];
        if self.coherence {
            names.push("coherence");
        }
        if self.juk {
            names.push("juk_count");
        }
        names
    }

    pub fn len(&self) -> usize {
        6 + usize::from(self.coherence) + usize::from(self.juk)
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl FeatureVector {
    pub fn to_inputs(&self, set: &FeatureSet) -> Vec<f64> {
        let mut x = vec![
            self.essay_length as f64,
            self.avg_sentence_length,
            self.avg_word_length,
            self.readability,
            self.vocab_size as f64,
            self.oov_count as f64,
        ];
        if set.coherence {
            x.push(self.coherence);
        }
        if set.juk {
            x.push(self.juk_count.unwrap_or(0) as f64);
        }
        x
    }
}

pub fn essay_length(seg: &SegmentedText) -> usize {
    seg.word_count()
}

pub fn avg_sentence_length(seg: &SegmentedText) -> Result<f64> {
    if seg.sentences.is_empty() {
        return Err(AesError::invalid(
            "average sentence length of an essay with no sentences",
        ));
    }
    Ok(essay_length(seg) as f64 / seg.sentences.len() as f64)
}

/// Grapheme clusters per word.
pub fn avg_word_length(seg: &SegmentedText) -> Result<f64> {
    let words = seg.word_count();
    if words == 0 {
        return Err(AesError::invalid(
            "average word length of an essay with no words",
        ));
    }
    let graphemes: usize = seg.words().map(|w| w.grapheme_count).sum();
    Ok(graphemes as f64 / words as f64)
}

/// Words with at least `threshold` aksharas.
pub fn polysyllabic_count(seg: &SegmentedText, threshold: usize) -> usize {
    seg.words().filter(|w| w.akshara_count >= threshold).count()
}

pub fn conjunct_count(seg: &SegmentedText) -> usize {
    seg.words().map(|w| w.conjunct_count).sum()
}

/// Hindi readability from average word length and polysyllabic word count.
pub fn readability(awl: f64, psw: usize) -> f64 {
    READABILITY_INTERCEPT + READABILITY_AWL_COEF * awl + READABILITY_PSW_COEF * psw as f64
}

/// Number of training essays each token occurs in.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentFrequency(HashMap<String, usize>);

impl DocumentFrequency {
    pub fn from_documents<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = &'a SegmentedText>,
    {
        let mut df = HashMap::new();
        for doc in docs {
            let unique: HashSet<&str> = doc.words().map(|w| w.text.as_str()).collect();
            for tok in unique {
                *df.entry(tok.to_string()).or_insert(0) += 1;
            }
        }
        DocumentFrequency(df)
    }

    pub fn get(&self, token: &str) -> usize {
        self.0.get(token).copied().unwrap_or(0)
    }
}

impl FromIterator<(String, usize)> for DocumentFrequency {
    fn from_iter<I: IntoIterator<Item = (String, usize)>>(iter: I) -> Self {
        DocumentFrequency(iter.into_iter().collect())
    }
}

/// Returns `(vocab_size, oov_count)`. A token outside the lexicon only counts
/// as OOV while it stays rarer than `oov_freq_threshold` training documents.
pub fn vocabulary(
    seg: &SegmentedText,
    lexicon: &HashSet<String>,
    doc_freq: &DocumentFrequency,
    oov_freq_threshold: usize,
) -> (usize, usize) {
    let distinct: BTreeSet<&str> = seg.words().map(|w| w.text.as_str()).collect();
    let oov = distinct
        .iter()
        .filter(|t| !lexicon.contains(**t) && doc_freq.get(t) < oov_freq_threshold)
        .count();
    (distinct.len(), oov)
}

/// Mean cosine similarity between sentence `i` and sentence `i + offset`.
/// Essays too short for `offset` use the largest offset they have; fewer
/// than two sentences give 0.0.
pub fn coherence_at(seg: &SegmentedText, provider: &dyn SentenceEmbedder, offset: usize) -> f64 {
    let n = seg.sentences.len();
    if n < 2 || offset == 0 {
        return 0.0;
    }
    let d = offset.min(n - 1);
    let tokens = seg.sentence_tokens();
    let embeddings: Vec<Vec<f64>> = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| provider.embed(i, t))
        .collect();
    let pairs = n - d;
    let total: f64 = (0..pairs)
        .map(|i| cosine(&embeddings[i], &embeddings[i + d]).unwrap_or(0.0))
        .sum();
    total / pairs as f64
}

pub fn coherence(seg: &SegmentedText, provider: &dyn SentenceEmbedder) -> f64 {
    coherence_at(seg, provider, DEFAULT_COHERENCE_OFFSET)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub psw_threshold: usize,
    pub oov_freq_threshold: usize,
    pub coherence_offset: usize,
    pub features: FeatureSet,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            psw_threshold: DEFAULT_PSW_THRESHOLD,
            oov_freq_threshold: DEFAULT_OOV_FREQ_THRESHOLD,
            coherence_offset: DEFAULT_COHERENCE_OFFSET,
            features: FeatureSet::default(),
        }
    }
}

/// Everything needed to turn essay text into a [`FeatureVector`].
pub struct FeatureExtractor<'a> {
    pub stopwords: &'a Stopwords,
    pub lexicon: &'a HashSet<String>,
    pub doc_freq: &'a DocumentFrequency,
    /// Required when `config.features.coherence` is set.
    pub embedder: Option<&'a dyn SentenceEmbedder>,
    pub config: ExtractionConfig,
}

impl FeatureExtractor<'_> {
    pub fn segment(&self, text: &str) -> SegmentedText {
        SegmentedText::segment(text, self.stopwords)
    }

    pub fn extract(&self, text: &str) -> Result<FeatureVector> {
        self.extract_segmented(&self.segment(text))
    }

    pub fn extract_segmented(&self, seg: &SegmentedText) -> Result<FeatureVector> {
        let awl = avg_word_length(seg)?;
        let psw = polysyllabic_count(seg, self.config.psw_threshold);
        let (vocab_size, oov_count) = vocabulary(
            seg,
            self.lexicon,
            self.doc_freq,
            self.config.oov_freq_threshold,
        );
        let coherence = match (self.config.features.coherence, self.embedder) {
            (true, Some(e)) => coherence_at(seg, e, self.config.coherence_offset),
            (true, None) => {
                return Err(AesError::Config(
                    "coherence is enabled but no sentence embedder was supplied".into(),
                ))
            }
            (false, _) => 0.0,
        };
        Ok(FeatureVector {
            essay_length: essay_length(seg),
            avg_sentence_length: avg_sentence_length(seg)?,
            avg_word_length: awl,
            readability: readability(awl, psw),
            vocab_size,
            oov_count,
            coherence,
            juk_count: self.config.features.juk.then(|| conjunct_count(seg)),
        })
    }
}

/// Per-column z-score parameters (population standard deviation). Columns
/// whose spread is numerically zero are passed through untouched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureScaler {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| AesError::invalid("cannot fit a scaler on an empty training set"))?;
        let d = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for row in rows {
            if row.len() != d {
                return Err(AesError::DimensionMismatch {
                    expected: d,
                    actual: row.len(),
                });
            }
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for row in rows {
            for ((v, x), m) in var.iter_mut().zip(row).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let std = var
            .iter()
            .zip(&mean)
            .map(|(v, m)| {
                let s = (v / n).sqrt();
                if s <= 1e-12 * m.abs().max(1.0) {
                    0.0
                } else {
                    s
                }
            })
            .collect();
        Ok(FeatureScaler { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(AesError::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| if *s == 0.0 { *v } else { (v - m) / s })
            .collect())
    }
}

/// Renders the featurized-corpus TSV: optional `# ` provenance lines, a
/// header of `essay_id` plus the feature names, then one row per essay.
pub fn write_feature_tsv(
    rows: &[(String, FeatureVector)],
    set: &FeatureSet,
    provenance: &[String],
) -> String {
    let mut out = String::new();
    for line in provenance {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("essay_id");
    for name in set.names() {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for (id, fv) in rows {
        out.push_str(id);
        for x in fv.to_inputs(set) {
            out.push('\t');
            out.push_str(&x.to_string());
        }
        out.push('\n');
    }
    out
}

/// Parsed featurized TSV: column names and `(essay_id, inputs)` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl FeatureTable {
    pub fn get(&self, essay_id: &str) -> Option<&[f64]> {
        self.rows
            .iter()
            .find(|(id, _)| id == essay_id)
            .map(|(_, x)| x.as_slice())
    }

    pub fn index(&self) -> HashMap<&str, &[f64]> {
        self.rows
            .iter()
            .map(|(id, x)| (id.as_str(), x.as_slice()))
            .collect()
    }
}

pub fn parse_feature_tsv(text: &str) -> Result<FeatureTable> {
    let mut columns = None;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        let Some(cols) = &columns else {
            if cells.first() != Some(&"essay_id") {
                return Err(AesError::Parse {
                    line: line_no,
                    message: "feature header must start with essay_id".into(),
                });
            }
            columns = Some(cells[1..].iter().map(|s| s.to_string()).collect::<Vec<_>>());
            continue;
        };
        if cells.len() != cols.len() + 1 {
            return Err(AesError::Parse {
                line: line_no,
                message: format!("expected {} columns, found {}", cols.len() + 1, cells.len()),
            });
        }
        let x = cells[1..]
            .iter()
            .map(|c| {
                c.parse::<f64>().map_err(|_| AesError::Parse {
                    line: line_no,
                    message: format!("bad feature value {c:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((cells[0].to_string(), x));
    }
    let columns = columns.ok_or(AesError::Parse {
        line: 1,
        message: "missing feature header".into(),
    })?;
    Ok(FeatureTable { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::VectorTable;
    use crate::textseg::Word;
    use proptest::prelude::*;

    fn seg_of(sentences: &[&[&str]]) -> SegmentedText {
        SegmentedText {
            sentences: sentences
                .iter()
                .map(|s| s.iter().map(|w| Word::new(*w).unwrap()).collect())
                .collect(),
        }
    }

    /// Embeds every sentence to a fixed vector chosen by position.
    struct Fixed(Vec<Vec<f64>>);

    impl SentenceEmbedder for Fixed {
        fn dim(&self) -> usize {
            self.0[0].len()
        }
        fn embed(&self, index: usize, _tokens: &[String]) -> Vec<f64> {
            self.0[index].clone()
        }
    }

    #[test]
    fn length_features() {
        let s = seg_of(&[&["a", "b", "c"], &["d", "e"]]);
        assert_eq!(essay_length(&s), 5);
        assert_eq!(avg_sentence_length(&s).unwrap(), 2.5);
        assert_eq!(essay_length(&SegmentedText::default()), 0);
        assert!(avg_sentence_length(&SegmentedText::default()).is_err());
        assert_eq!(essay_length(&seg_of(&[&["a"]])), 1);
        assert_eq!(
            avg_sentence_length(&seg_of(&[&["a", "b", "c", "d"]])).unwrap(),
            4.0
        );
        let five = seg_of(&[&["a"], &["b"], &["c"], &["d"], &["e"]]);
        assert_eq!(avg_sentence_length(&five).unwrap(), 1.0);
    }

    #[test]
    fn word_length_in_graphemes() {
        // घर: 2 graphemes, भारतीय: भा र ती य = 4
        let s = seg_of(&[&["घर", "भारतीय"]]);
        assert_eq!(avg_word_length(&s).unwrap(), 3.0);
        assert_eq!(avg_word_length(&seg_of(&[&["abc"]])).unwrap(), 3.0);
        assert_eq!(
            avg_word_length(&seg_of(&[&["a", "b"], &["c", "d"]])).unwrap(),
            1.0
        );
        assert!(avg_word_length(&SegmentedText::default()).is_err());
    }

    #[test]
    fn readability_examples() {
        assert_eq!(readability(0.0, 0), -2.34);
        assert!((readability(1.0, 0) - (-0.20)).abs() < 1e-12);
        assert!((readability(2.0, 10) - 2.04).abs() < 1e-12);
    }

    #[test]
    fn vocabulary_examples() {
        let lex: HashSet<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let df = DocumentFrequency::default();
        assert_eq!(
            vocabulary(&seg_of(&[&["a", "b", "b"]]), &lex, &df, 5),
            (2, 0)
        );

        let lex: HashSet<String> = ["a".to_string()].into();
        let rare: DocumentFrequency = [("x".to_string(), 1)].into_iter().collect();
        assert_eq!(vocabulary(&seg_of(&[&["a", "x"]]), &lex, &rare, 5), (2, 1));
        let common: DocumentFrequency = [("x".to_string(), 50)].into_iter().collect();
        assert_eq!(
            vocabulary(&seg_of(&[&["a", "x"]]), &lex, &common, 5),
            (2, 0)
        );
    }

    #[test]
    fn document_frequency_counts_each_doc_once() {
        let docs = [seg_of(&[&["a", "a"], &["b"]]), seg_of(&[&["a"]])];
        let df = DocumentFrequency::from_documents(&docs);
        assert_eq!(df.get("a"), 2);
        assert_eq!(df.get("b"), 1);
        assert_eq!(df.get("z"), 0);
    }

    #[test]
    fn coherence_examples() {
        let six = seg_of(&[&["a"] as &[&str]; 6]);
        let same = Fixed(vec![vec![0.2, 0.7]; 6]);
        assert!((coherence(&six, &same) - 1.0).abs() < 1e-12);

        assert_eq!(coherence(&seg_of(&[&["a"]]), &same), 0.0);

        let three = seg_of(&[&["a"], &["b"], &["c"]]);
        let alt = Fixed(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((coherence(&three, &alt) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherence_pairs_at_offset_four() {
        // pairs (0,4) and (1,5): cos = 1 and cos = 0
        let e = Fixed(vec![
            vec![1.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ]);
        let six = seg_of(&[&["a"] as &[&str]; 6]);
        assert!((coherence(&six, &e) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn extractor_requires_embedder_for_coherence() {
        let sw = Stopwords::default();
        let lex = HashSet::new();
        let df = DocumentFrequency::default();
        let mut ex = FeatureExtractor {
            stopwords: &sw,
            lexicon: &lex,
            doc_freq: &df,
            embedder: None,
            config: ExtractionConfig::default(),
        };
        assert!(matches!(ex.extract("घर।"), Err(AesError::Config(_))));
        ex.config.features.coherence = false;
        ex.config.features.juk = true;
        let fv = ex.extract("स्कूल बड़ा है। उत्कृष्ट घर।").unwrap();
        assert_eq!(fv.essay_length, 5);
        assert_eq!(fv.juk_count, Some(3));
        assert!(fv.vocab_size <= fv.essay_length && fv.oov_count <= fv.vocab_size);
    }

    #[test]
    fn extraction_with_table_is_deterministic() {
        let mut table = VectorTable::new(2).unwrap();
        table.insert("घर", vec![1.0, 0.0]).unwrap();
        table.insert("स्कूल", vec![0.0, 1.0]).unwrap();
        let sw = Stopwords::hindi_default();
        let lex = table.vocabulary();
        let df = DocumentFrequency::default();
        let ex = FeatureExtractor {
            stopwords: &sw,
            lexicon: &lex,
            doc_freq: &df,
            embedder: Some(&table),
            config: ExtractionConfig::default(),
        };
        let text = "घर बड़ा है। स्कूल दूर है। घर पास।";
        assert_eq!(ex.extract(text).unwrap(), ex.extract(text).unwrap());
    }

    #[test]
    fn scaler_examples() {
        let s = FeatureScaler::fit(&[vec![1.0, 5.0], vec![3.0, 5.0]]).unwrap();
        assert_eq!(s.apply(&[1.0, 5.0]).unwrap(), vec![-1.0, 5.0]);
        assert_eq!(s.apply(&[3.0, 5.0]).unwrap(), vec![1.0, 5.0]);
        let c = FeatureScaler::fit(&[vec![5.0], vec![5.0], vec![5.0]]).unwrap();
        assert_eq!(c.apply(&[5.0]).unwrap(), vec![5.0]);
        assert!(FeatureScaler::fit(&[]).is_err());
        assert!(s.apply(&[1.0]).is_err());
    }

    #[test]
    fn feature_tsv_round_trip() {
        let fv = FeatureVector {
            essay_length: 12,
            avg_sentence_length: 4.0,
            avg_word_length: 2.3333333333333335,
            readability: readability(2.3333333333333335, 3),
            vocab_size: 9,
            oov_count: 2,
            coherence: 0.1,
            juk_count: None,
        };
        let set = FeatureSet::default();
        let text = write_feature_tsv(&[("e1".into(), fv)], &set, &["seed=1".into()]);
        assert!(text.starts_with("# seed=1\nessay_id\tessay_length"));
        let table = parse_feature_tsv(&text).unwrap();
        assert_eq!(table.columns.len(), 7);
        assert_eq!(table.get("e1").unwrap(), fv.to_inputs(&set).as_slice());
    }

    proptest! {
        #[test]
        fn readability_is_affine_in_awl(awl in 0.0f64..20.0, delta in -5.0f64..5.0, psw in 0usize..500) {
            let diff = readability(awl + delta, psw) - readability(awl, psw);
            prop_assert!((diff - 2.14 * delta).abs() < 1e-12);
        }

        #[test]
        fn scaled_training_set_is_standardized(rows in prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 3), 2..40)) {
            let s = FeatureScaler::fit(&rows).unwrap();
            let scaled: Vec<Vec<f64>> = rows.iter().map(|r| s.apply(r).unwrap()).collect();
            let n = rows.len() as f64;
            for j in 0..3 {
                if s.std[j] == 0.0 { continue; }
                let mean: f64 = scaled.iter().map(|r| r[j]).sum::<f64>() / n;
                let var: f64 = scaled.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!((var.sqrt() - 1.0).abs() < 1e-9);
            }
        }
    }
}
