//! Seeded synthetic Hindi-script corpora with known scoring rules, for tests,
//! examples and desk-scale benchmarks.
//!
//! Words are strings of consonant+vowel-sign graphemes, so a word of `L`
//! graphemes also has `L` aksharas and no conjuncts. Vocabulary is grouped
//! into topics whose word vectors point along distinct axes; mixing topics
//! inside an essay lowers its sentence-to-sentence similarity.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{EssayRecord, PromptSpec};
use crate::error::{AesError, Result};
use crate::textseg::Stopwords;

const CONSONANTS: &[char] = &[
    'क', 'ख', 'ग', 'घ', 'च', 'छ', 'ज', 'झ', 'ट', 'ठ', 'ड', 'ढ', 'त', 'थ', 'द', 'ध', 'न', 'प', 'फ',
    'ब', 'भ', 'म', 'य', 'र', 'ल', 'व', 'श', 'ष', 'स', 'ह',
];
const VOWEL_SIGNS: &[&str] = &["", "ा", "ि", "ी", "ु", "ू", "े", "ै", "ो", "ौ"];

/// Longest generated word, in graphemes.
pub const MAX_WORD_LEN: usize = 5;
pub const VECTOR_DIM: usize = 16;
const WORDS_PER_BUCKET: usize = 12;

/// Topic-grouped vocabulary: `words[topic][len - 1]`.
#[derive(Debug, Clone)]
pub struct SyntheticLexicon {
    pub words: Vec<Vec<Vec<String>>>,
    pub vectors: Vec<(String, Vec<f64>)>,
}

impl SyntheticLexicon {
    pub fn generate(n_topics: usize, rng: &mut impl Rng) -> Self {
        assert!((1..=VECTOR_DIM).contains(&n_topics));
        let stop = Stopwords::hindi_default();
        let mut seen = HashSet::new();
        let mut words = Vec::with_capacity(n_topics);
        let mut vectors = Vec::new();
        for topic in 0..n_topics {
            let mut by_len = Vec::with_capacity(MAX_WORD_LEN);
            for len in 1..=MAX_WORD_LEN {
                let mut bucket = Vec::with_capacity(WORDS_PER_BUCKET);
                while bucket.len() < WORDS_PER_BUCKET {
                    let w: String = (0..len)
                        .map(|_| {
                            let c = *CONSONANTS.choose(rng).unwrap();
                            let v = *VOWEL_SIGNS.choose(rng).unwrap();
                            format!("{c}{v}")
                        })
                        .collect();
                    if stop.contains(&w) || !seen.insert(w.clone()) {
                        continue;
                    }
                    let v: Vec<f64> = (0..VECTOR_DIM)
                        .map(|j| f64::from(u8::from(j == topic)) + rng.random_range(-0.35..0.35))
                        .collect();
                    vectors.push((w.clone(), v));
                    bucket.push(w);
                }
                by_len.push(bucket);
            }
            words.push(by_len);
        }
        SyntheticLexicon { words, vectors }
    }

    pub fn n_topics(&self) -> usize {
        self.words.len()
    }

    /// Word-vector file text: `<count> <dim>` header plus one line per word.
    pub fn vector_file(&self) -> String {
        let mut out = format!("{} {VECTOR_DIM}\n", self.vectors.len());
        for (w, v) in &self.vectors {
            out.push_str(w);
            for x in v {
                let _ = write!(out, " {x:.6}");
            }
            out.push('\n');
        }
        out
    }

    fn word(&self, topic: usize, len: usize, rng: &mut impl Rng) -> &str {
        self.words[topic][len - 1].choose(rng).unwrap()
    }
}

/// Word length with mean `m`: `floor(m)` or one more, in proportion.
fn draw_len(m: f64, rng: &mut impl Rng) -> usize {
    let base = m.floor();
    let len = base as usize + usize::from(rng.random_bool(m - base));
    len.clamp(1, MAX_WORD_LEN)
}

/// Latent qualities of one generated essay, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Latent {
    pub length: f64,
    pub word_length: f64,
    pub focus: f64,
}

impl Latent {
    /// Score rule of the benchmark corpus before noise, on [0, 12].
    pub fn true_score(&self) -> f64 {
        12.0 * (0.4 * self.length + 0.3 * self.word_length + 0.3 * self.focus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n_essays: usize,
    pub seed: u64,
    /// Extra per-essay rater columns around the gold score; 0 for none.
    pub n_raters: usize,
    pub n_topics: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_essays: 500,
            seed: 7,
            n_raters: 0,
            n_topics: 8,
        }
    }
}

/// A generated corpus plus everything needed to write it to disk.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub prompt: PromptSpec,
    pub records: Vec<EssayRecord>,
    pub latents: Vec<Latent>,
    pub lexicon: SyntheticLexicon,
}

pub const SYNTH_PROMPT: &str = "S1";

fn synth_prompt() -> PromptSpec {
    PromptSpec::new(SYNTH_PROMPT, 0, 12).expect("static range is valid")
}

fn sentence(words: &[&str]) -> String {
    // "है" is a stopword, so it exercises filtering without changing features
    format!("{} है।", words.join(" "))
}

/// Benchmark corpus: gold = round(true_score + U(-0.5, 0.5)) clamped to
/// [0, 12]. Length drives the sentence count, word length the mean word
/// size, and focus the share of words drawn from the essay's own topic.
pub fn generate(config: &SynthConfig) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let lexicon = SyntheticLexicon::generate(config.n_topics, &mut rng);
    let prompt = synth_prompt();
    let mut records = Vec::with_capacity(config.n_essays);
    let mut latents = Vec::with_capacity(config.n_essays);
    for i in 0..config.n_essays {
        let lat = Latent {
            length: rng.random(),
            word_length: rng.random(),
            focus: rng.random(),
        };
        let n_sentences = 6 + (lat.length * 14.0).round() as usize;
        let mean_len = 1.5 + 3.0 * lat.word_length;
        let home = rng.random_range(0..lexicon.n_topics());
        let mut sentences = Vec::with_capacity(n_sentences);
        for _ in 0..n_sentences {
            let n_words = rng.random_range(6..=9);
            let words: Vec<&str> = (0..n_words)
                .map(|_| {
                    let topic = if rng.random_bool(lat.focus) {
                        home
                    } else {
                        rng.random_range(0..lexicon.n_topics())
                    };
                    let len = draw_len(mean_len, &mut rng);
                    lexicon.word(topic, len, &mut rng)
                })
                .collect();
            sentences.push(sentence(&words));
        }
        let noisy = lat.true_score() + rng.random_range(-0.5..0.5);
        let gold = (noisy.round() as i64).clamp(prompt.score_min, prompt.score_max);
        let rater_scores = (config.n_raters > 0).then(|| {
            (0..config.n_raters)
                .map(|_| {
                    let u: f64 = rng.random();
                    let delta = if u < 0.15 {
                        -1
                    } else if u < 0.30 {
                        1
                    } else {
                        0
                    };
                    (gold + delta).clamp(prompt.score_min, prompt.score_max)
                })
                .collect()
        });
        records.push(EssayRecord {
            essay_id: format!("e{i:04}"),
            prompt_id: prompt.prompt_id.clone(),
            text: sentences.join(" "),
            gold_score: Some(gold),
            rater_scores,
        });
        latents.push(lat);
    }
    SyntheticCorpus {
        prompt,
        records,
        latents,
        lexicon,
    }
}

/// Single-topic corpus whose gold score is an exact rounded affine function
/// of the realized word count `n` and average word length `a`:
/// `round(0.08·n + 1.5·a − 4.65)`.
pub fn linear_fixture(n_essays: usize, seed: u64) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lexicon = SyntheticLexicon::generate(1, &mut rng);
    let prompt = synth_prompt();
    let mut records = Vec::with_capacity(n_essays);
    let mut latents = Vec::with_capacity(n_essays);
    for i in 0..n_essays {
        let n_sentences = rng.random_range(5..=15);
        let mean_len: f64 = rng.random_range(1.5..3.5);
        let mut n_words = 0usize;
        let mut graphemes = 0usize;
        let mut sentences = Vec::with_capacity(n_sentences);
        for _ in 0..n_sentences {
            let k = rng.random_range(6..=9);
            let words: Vec<&str> = (0..k)
                .map(|_| {
                    let len = draw_len(mean_len, &mut rng);
                    graphemes += len;
                    lexicon.word(0, len, &mut rng)
                })
                .collect();
            n_words += k;
            sentences.push(sentence(&words));
        }
        let awl = graphemes as f64 / n_words as f64;
        let score = (0.08 * n_words as f64 + 1.5 * awl - 4.65).round() as i64;
        records.push(EssayRecord {
            essay_id: format!("l{i:04}"),
            prompt_id: prompt.prompt_id.clone(),
            text: sentences.join(" "),
            gold_score: Some(score.clamp(prompt.score_min, prompt.score_max)),
            rater_scores: None,
        });
        latents.push(Latent {
            length: (n_words as f64 - 30.0) / 105.0,
            word_length: (awl - 1.5) / 2.0,
            focus: 1.0,
        });
    }
    SyntheticCorpus {
        prompt,
        records,
        latents,
        lexicon,
    }
}

impl SyntheticCorpus {
    pub fn corpus_tsv(&self) -> String {
        let n_raters = self
            .records
            .iter()
            .filter_map(|r| r.rater_scores.as_ref().map(Vec::len))
            .max()
            .unwrap_or(0);
        let mut out = String::from("essay_id\tprompt_id\tessay\tscore");
        for k in 1..=n_raters {
            let _ = write!(out, "\trater_{k}");
        }
        out.push('\n');
        for r in &self.records {
            let score = r.gold_score.map(|s| s.to_string()).unwrap_or_default();
            let _ = write!(out, "{}\t{}\t{}\t{score}", r.essay_id, r.prompt_id, r.text);
            for s in r.rater_scores.iter().flatten() {
                let _ = write!(out, "\t{s}");
            }
            out.push('\n');
        }
        out
    }

    pub fn prompts_tsv(&self) -> String {
        format!(
            "prompt_id\tscore_min\tscore_max\n{}\t{}\t{}\n",
            self.prompt.prompt_id, self.prompt.score_min, self.prompt.score_max
        )
    }

    /// Writes `corpus.tsv`, `prompts.tsv` and `vectors.txt` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| AesError::io(dir, e))?;
        for (name, body) in [
            ("corpus.tsv", self.corpus_tsv()),
            ("prompts.tsv", self.prompts_tsv()),
            ("vectors.txt", self.lexicon.vector_file()),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| AesError::io(name, e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus;
    use crate::embeddings::load_vectors;
    use crate::features::{avg_word_length, essay_length};
    use crate::textseg::{count_aksharas, count_conjuncts, grapheme_count, SegmentedText};

    #[test]
    fn words_have_matching_graphemes_and_aksharas() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lex = SyntheticLexicon::generate(3, &mut rng);
        for (topic, by_len) in lex.words.iter().enumerate() {
            for (i, bucket) in by_len.iter().enumerate() {
                for w in bucket {
                    assert_eq!(grapheme_count(w), i + 1, "{w} in topic {topic}");
                    assert_eq!(count_aksharas(w).unwrap(), i + 1, "{w}");
                    assert_eq!(count_conjuncts(w).unwrap(), 0);
                }
            }
        }
    }

    #[test]
    fn files_parse_back() {
        let c = generate(&SynthConfig {
            n_essays: 20,
            n_raters: 3,
            ..Default::default()
        });
        let records =
            parse_corpus(c.corpus_tsv().as_bytes(), std::slice::from_ref(&c.prompt)).unwrap();
        assert_eq!(records, c.records);
        let table = load_vectors(c.lexicon.vector_file().as_bytes(), None).unwrap();
        assert_eq!(table.len(), c.lexicon.vectors.len());
        assert_eq!(table.dim(), VECTOR_DIM);
    }

    #[test]
    fn generation_is_seeded() {
        let cfg = SynthConfig {
            n_essays: 10,
            ..Default::default()
        };
        assert_eq!(generate(&cfg).corpus_tsv(), generate(&cfg).corpus_tsv());
        let other = SynthConfig { seed: 8, ..cfg };
        assert_ne!(generate(&cfg).corpus_tsv(), generate(&other).corpus_tsv());
    }

    #[test]
    fn linear_fixture_scores_follow_the_rule() {
        let c = linear_fixture(40, 3);
        let stop = Stopwords::hindi_default();
        for r in &c.records {
            let seg = SegmentedText::segment(&r.text, &stop);
            let n = essay_length(&seg) as f64;
            let a = avg_word_length(&seg).unwrap();
            let expect = (0.08 * n + 1.5 * a - 4.65).round() as i64;
            assert_eq!(r.gold_score, Some(expect));
            assert!((0..=12).contains(&expect));
        }
    }

    #[test]
    fn gold_tracks_latent_score() {
        let c = generate(&SynthConfig {
            n_essays: 200,
            ..Default::default()
        });
        for (r, lat) in c.records.iter().zip(&c.latents) {
            let g = r.gold_score.unwrap() as f64;
            assert!((g - lat.true_score()).abs() <= 1.0);
        }
    }
}
