//! Devanagari-aware segmentation into sentences, words, grapheme clusters and
//! orthographic syllables (aksharas), plus stopword and mention filtering.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::error::{AesError, Result};

const DANDA: char = '\u{0964}';
const DOUBLE_DANDA: char = '\u{0965}';
const VIRAMA: char = '\u{094D}';
const NUKTA: char = '\u{093C}';
const ZWJ: char = '\u{200D}';

const SENTENCE_TERMINATORS: [char; 5] = [DANDA, DOUBLE_DANDA, '.', '?', '!'];

/// Default Hindi stopword list shipped with the crate.
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_hi.txt");

fn is_consonant(c: char) -> bool {
    matches!(c, '\u{0915}'..='\u{0939}' | '\u{0958}'..='\u{095F}' | '\u{0978}'..='\u{097F}')
}

fn is_independent_vowel(c: char) -> bool {
    matches!(c, '\u{0904}'..='\u{0914}' | '\u{0960}' | '\u{0961}' | '\u{0972}'..='\u{0977}' | '\u{0950}')
}

fn is_devanagari_digit(c: char) -> bool {
    matches!(c, '\u{0966}'..='\u{096F}')
}

/// Nonspacing and spacing combining marks of the Devanagari block, plus the
/// zero-width joiners. None of these start a syllable.
fn is_combining(c: char) -> bool {
    matches!(
        c,
        '\u{0900}'..='\u{0903}'
            | '\u{093A}'..='\u{093C}'
            | '\u{093E}'..='\u{094F}'
            | '\u{0951}'..='\u{0957}'
            | '\u{0962}'..='\u{0963}'
            | '\u{200C}'
            | ZWJ
    )
}

fn is_devanagari(c: char) -> bool {
    matches!(c, '\u{0900}'..='\u{097F}')
}

fn is_edge_punctuation(c: char) -> bool {
    (c.is_ascii_punctuation() && c != '@')
        || matches!(
            c,
            DANDA
                | DOUBLE_DANDA
                | '\u{2018}'
                | '\u{2019}'
                | '\u{201C}'
                | '\u{201D}'
                | '\u{00AB}'
                | '\u{00BB}'
                | '\u{2026}'
                | '\u{2013}'
                | '\u{2014}'
        )
}

/// Splits on danda, double danda, `.`, `?` and `!`. Terminators are
/// consumed, segments trimmed, empty segments dropped.
pub fn split_sentences(text: &str) -> Vec<String> {
    text.split(SENTENCE_TERMINATORS)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Whitespace tokenization with leading/trailing punctuation stripped.
pub fn tokenize_words(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(|t| t.trim_matches(is_edge_punctuation))
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn grapheme_count(word: &str) -> usize {
    word.graphemes(true).count()
}

/// Counts orthographic syllables. A consonant whose trailing combining marks
/// include a virama does not close a syllable: it either fuses with the next
/// consonant or is a dead final consonant. Every other consonant and every
/// independent vowel closes one. A run of non-Devanagari letters or of digits
/// counts as a single unit. A non-empty word always has at least one akshara.
pub fn count_aksharas(word: &str) -> Result<usize> {
    if word.is_empty() {
        return Err(AesError::invalid("cannot count aksharas of an empty word"));
    }
    let chars: Vec<char> = word.chars().collect();
    let mut count = 0;
    let mut in_foreign_run = false;
    for (i, &c) in chars.iter().enumerate() {
        let foreign = c.is_alphanumeric() && !is_devanagari(c) || is_devanagari_digit(c);
        if foreign {
            if !in_foreign_run {
                count += 1;
            }
            in_foreign_run = true;
            continue;
        }
        in_foreign_run = false;
        if is_independent_vowel(c) {
            count += 1;
        } else if is_consonant(c) {
            let dead = chars[i + 1..]
                .iter()
                .take_while(|&&m| is_combining(m))
                .any(|&m| m == VIRAMA);
            if !dead {
                count += 1;
            }
        }
    }
    Ok(count.max(1))
}

/// Counts consonant + virama + consonant junctions. A chain of k viramas
/// inside one cluster counts k. Nukta on the first consonant and a ZWJ after
/// the virama (explicit half form) are allowed.
pub fn count_conjuncts(word: &str) -> Result<usize> {
    if word.is_empty() {
        return Err(AesError::invalid("cannot count conjuncts of an empty word"));
    }
    let chars: Vec<char> = word.chars().collect();
    let mut count = 0;
    for (i, &c) in chars.iter().enumerate() {
        if !is_consonant(c) {
            continue;
        }
        let mut j = i + 1;
        if chars.get(j) == Some(&NUKTA) {
            j += 1;
        }
        if chars.get(j) != Some(&VIRAMA) {
            continue;
        }
        j += 1;
        if chars.get(j) == Some(&ZWJ) {
            j += 1;
        }
        if chars.get(j).copied().is_some_and(is_consonant) {
            count += 1;
        }
    }
    Ok(count)
}

/// ASAP anonymization placeholder such as `@CAPS1` or `@PERSON`.
pub fn is_mention(token: &str) -> bool {
    let Some(rest) = token.strip_prefix('@') else {
        return false;
    };
    let upper = rest.chars().take_while(|c| c.is_ascii_uppercase()).count();
    upper > 0 && rest[upper..].chars().all(|c| c.is_ascii_digit())
}

/// A set of tokens removed before feature extraction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// One token per line; `#` starts a comment.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect(),
        )
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Ok(Self::parse(std::str::from_utf8(bytes)?))
    }

    pub fn hindi_default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stopwords(iter.into_iter().map(Into::into).collect())
    }
}

pub fn filter_tokens(tokens: Vec<String>, stopwords: &Stopwords) -> Vec<String> {
    tokens
        .into_iter()
        .filter(|t| !stopwords.contains(t) && !is_mention(t))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    pub text: String,
    pub grapheme_count: usize,
    pub akshara_count: usize,
    pub conjunct_count: usize,
}

impl Word {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        Ok(Word {
            grapheme_count: grapheme_count(&text),
            akshara_count: count_aksharas(&text)?,
            conjunct_count: count_conjuncts(&text)?,
            text,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentedText {
    pub sentences: Vec<Vec<Word>>,
}

impl SegmentedText {
    /// Sentence split, tokenize and filter. Sentences left with no tokens
    /// after filtering are dropped.
    pub fn segment(text: &str, stopwords: &Stopwords) -> Self {
        let sentences = split_sentences(text)
            .iter()
            .map(|s| filter_tokens(tokenize_words(s), stopwords))
            .filter(|toks| !toks.is_empty())
            .map(|toks| {
                toks.into_iter()
                    .map(|t| Word::new(t).expect("tokens are non-empty"))
                    .collect()
            })
            .collect();
        SegmentedText { sentences }
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.sentences.iter().flatten()
    }

    pub fn sentence_tokens(&self) -> Vec<Vec<String>> {
        self.sentences
            .iter()
            .map(|s| s.iter().map(|w| w.text.clone()).collect())
            .collect()
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sentences() {
        assert_eq!(
            split_sentences("मैं घर गया। वह आया।"),
            vec!["मैं घर गया", "वह आया"]
        );
        assert_eq!(split_sentences("क्या?"), vec!["क्या"]);
        assert!(split_sentences("").is_empty());
        assert_eq!(split_sentences("एक॥ दो! तीन."), vec!["एक", "दो", "तीन"]);
    }

    #[test]
    fn words() {
        assert_eq!(tokenize_words("मैं घर गया"), vec!["मैं", "घर", "गया"]);
        assert_eq!(tokenize_words("“यात्रा”, जीवन"), vec!["यात्रा", "जीवन"]);
        assert!(tokenize_words("   ").is_empty());
        assert_eq!(tokenize_words("(@CAPS1), ।"), vec!["@CAPS1"]);
    }

    #[test]
    fn aksharas() {
        assert_eq!(count_aksharas("घर").unwrap(), 2);
        assert_eq!(count_aksharas("अ").unwrap(), 1);
        assert_eq!(count_aksharas("स्कूल").unwrap(), 2);
        assert_eq!(count_aksharas("जगत्").unwrap(), 2);
        assert_eq!(count_aksharas("school").unwrap(), 1);
        assert_eq!(count_aksharas("२०२३").unwrap(), 1);
        assert_eq!(count_aksharas("क्").unwrap(), 1);
        assert!(count_aksharas("").is_err());
    }

    #[test]
    fn conjuncts() {
        assert_eq!(count_conjuncts("घर").unwrap(), 0);
        assert_eq!(count_conjuncts("स्कूल").unwrap(), 1);
        assert_eq!(count_conjuncts("उत्कृष्ट").unwrap(), 2);
        assert_eq!(count_conjuncts("जगत्").unwrap(), 0);
        assert_eq!(count_conjuncts("क्\u{200D}ष").unwrap(), 1);
        assert!(count_conjuncts("").is_err());
    }

    #[test]
    fn mentions_and_stopwords() {
        let empty = Stopwords::default();
        assert_eq!(
            filter_tokens(vec!["@CAPS1".into(), "घर".into()], &empty),
            vec!["घर"]
        );
        let sw: Stopwords = ["और"].into_iter().collect();
        assert_eq!(
            filter_tokens(vec!["और".into(), "घर".into()], &sw),
            vec!["घर"]
        );
        assert!(filter_tokens(vec![], &sw).is_empty());
        assert!(is_mention("@PERSON"));
        assert!(!is_mention("@caps1"));
        assert!(!is_mention("@1"));
        assert!(!is_mention("@CAPS1x"));
    }

    #[test]
    fn stopword_file_format() {
        let sw = Stopwords::parse("# header\nऔर\n  का  # possessive\n\n");
        assert_eq!(sw.len(), 2);
        assert!(sw.contains("का"));
        let default = Stopwords::hindi_default();
        assert!(default.len() >= 150, "default list has {}", default.len());
        assert!(default.contains("और") && default.contains("है"));
    }

    #[test]
    fn segment_drops_filtered_sentences() {
        let sw: Stopwords = ["और", "है"].into_iter().collect();
        let seg = SegmentedText::segment("घर बड़ा है। और है। @CAPS1 स्कूल गया।", &sw);
        assert_eq!(seg.sentences.len(), 2);
        assert_eq!(seg.word_count(), 4);
    }

    fn devanagari_word() -> impl Strategy<Value = String> {
        prop::collection::vec(
            prop_oneof![
                (0x0915u32..=0x0939).prop_map(|c| char::from_u32(c).unwrap().to_string()),
                (0x0905u32..=0x0914).prop_map(|c| char::from_u32(c).unwrap().to_string()),
                Just("\u{094D}".to_string()),
                (0x093Eu32..=0x094C).prop_map(|c| char::from_u32(c).unwrap().to_string()),
                Just("\u{0902}".to_string()),
                Just("\u{093C}".to_string()),
                Just("\u{200D}".to_string()),
            ],
            1..12,
        )
        .prop_map(|parts| parts.concat())
    }

    proptest! {
        #[test]
        fn akshara_never_exceeds_graphemes(w in devanagari_word()) {
            prop_assert!(count_aksharas(&w).unwrap() <= grapheme_count(&w));
            prop_assert!(count_aksharas(&w).unwrap() >= 1);
        }

        #[test]
        fn appended_matra_keeps_conjuncts(w in devanagari_word(), m in 0x093Eu32..=0x094C) {
            let matra = char::from_u32(m).unwrap();
            let mut longer = w.clone();
            longer.push(matra);
            prop_assert_eq!(count_conjuncts(&w).unwrap(), count_conjuncts(&longer).unwrap());
        }

        #[test]
        fn sentence_split_preserves_content(parts in prop::collection::vec("[a-z\u{0915}-\u{0939} ]{0,8}", 0..6)) {
            let text = parts.join("। ");
            let kept: String = split_sentences(&text).concat().chars().filter(|c| !c.is_whitespace()).collect();
            let expected: String = text
                .chars()
                .filter(|c| !c.is_whitespace() && !SENTENCE_TERMINATORS.contains(c))
                .collect();
            prop_assert_eq!(kept, expected);
        }
    }
}
