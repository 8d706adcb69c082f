//! Essay corpora: TSV ingestion, prompt score ranges, seeded 60/20/20 splits
//! and score normalization.
//!
//! A corpus file is UTF-8 TSV with a header row. The columns `essay_id`,
//! `prompt_id` and `essay` are required; `score` and any number of
//! `rater_<k>` columns are optional. When a row has no `score` but does have
//! rater columns, the gold score is the rater mean rounded half away from
//! zero.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AesError, Result};

/// A writing prompt and its integer holistic score range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub prompt_id: String,
    pub score_min: i64,
    pub score_max: i64,
}

impl PromptSpec {
    pub fn new(prompt_id: impl Into<String>, score_min: i64, score_max: i64) -> Result<Self> {
        let prompt_id = prompt_id.into();
        if score_min >= score_max {
            return Err(AesError::invalid(format!(
                "prompt {prompt_id}: score_min {score_min} must be below score_max {score_max}"
            )));
        }
        Ok(PromptSpec {
            prompt_id,
            score_min,
            score_max,
        })
    }

    /// Number of distinct ratings on this prompt's scale.
    pub fn rating_count(&self) -> usize {
        (self.score_max - self.score_min + 1) as usize
    }

    pub fn contains(&self, score: i64) -> bool {
        (self.score_min..=self.score_max).contains(&score)
    }
}

/// Score ranges of ASAP prompts P1 to P8 plus a `Travel` prompt scored 0 to 12.
pub fn builtin_prompts() -> Vec<PromptSpec> {
    [
        ("P1", 2, 12),
        ("P2", 1, 6),
        ("P3", 0, 3),
        ("P4", 0, 3),
        ("P5", 0, 4),
        ("P6", 0, 4),
        ("P7", 0, 30),
        ("P8", 0, 60),
        ("Travel", 0, 12),
    ]
    .into_iter()
    .map(|(id, lo, hi)| PromptSpec {
        prompt_id: id.to_string(),
        score_min: lo,
        score_max: hi,
    })
    .collect()
}

/// Parses a prompt table: TSV `prompt_id  score_min  score_max` with a header
/// row. Blank lines and `#` comments are skipped.
pub fn parse_prompt_table(bytes: &[u8]) -> Result<Vec<PromptSpec>> {
    let text = std::str::from_utf8(bytes)?;
    let mut prompts = Vec::new();
    let mut seen = HashSet::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if !header_seen {
            if cols != ["prompt_id", "score_min", "score_max"] {
                return Err(AesError::Parse {
                    line: line_no,
                    message: "expected header `prompt_id\tscore_min\tscore_max`".into(),
                });
            }
            header_seen = true;
            continue;
        }
        if cols.len() != 3 {
            return Err(AesError::Parse {
                line: line_no,
                message: format!("expected 3 columns, found {}", cols.len()),
            });
        }
        let parse_int = |s: &str| {
            s.parse::<i64>().map_err(|_| AesError::Parse {
                line: line_no,
                message: format!("not an integer: {s:?}"),
            })
        };
        let spec =
            PromptSpec::new(cols[0], parse_int(cols[1])?, parse_int(cols[2])?).map_err(|e| {
                AesError::Parse {
                    line: line_no,
                    message: e.to_string(),
                }
            })?;
        if !seen.insert(spec.prompt_id.clone()) {
            return Err(AesError::Parse {
                line: line_no,
                message: format!("duplicate prompt_id {}", spec.prompt_id),
            });
        }
        prompts.push(spec);
    }
    Ok(prompts)
}

/// One essay as read from the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssayRecord {
    pub essay_id: String,
    pub prompt_id: String,
    pub text: String,
    pub gold_score: Option<i64>,
    pub rater_scores: Option<Vec<i64>>,
}

/// Integer division rounded half away from zero.
fn round_div(num: i64, den: i64) -> i64 {
    debug_assert!(den > 0);
    let q = num.div_euclid(den);
    let r = num.rem_euclid(den);
    // r in [0, den): compare 2r against den
    if num >= 0 {
        if 2 * r >= den {
            q + 1
        } else {
            q
        }
    } else if 2 * r > den {
        q + 1
    } else {
        q
    }
}

enum Column {
    EssayId,
    PromptId,
    Essay,
    Score,
    Rater,
}

/// Parses a TSV corpus and validates every row against `prompts`.
pub fn parse_corpus(tsv_bytes: &[u8], prompts: &[PromptSpec]) -> Result<Vec<EssayRecord>> {
    let text = std::str::from_utf8(tsv_bytes)?;
    let by_id: BTreeMap<&str, &PromptSpec> =
        prompts.iter().map(|p| (p.prompt_id.as_str(), p)).collect();

    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(AesError::Validation {
            row: 1,
            message: "missing header row".into(),
        });
    };
    let header = header.trim_start_matches('\u{feff}').trim_end_matches('\r');
    let mut columns = Vec::new();
    for name in header.split('\t') {
        let col = match name.trim() {
            "essay_id" => Column::EssayId,
            "prompt_id" => Column::PromptId,
            "essay" => Column::Essay,
            "score" => Column::Score,
            n if n
                .strip_prefix("rater_")
                .is_some_and(|k| !k.is_empty() && k.chars().all(|c| c.is_ascii_digit())) =>
            {
                Column::Rater
            }
            other => {
                return Err(AesError::Validation {
                    row: 1,
                    message: format!("unknown column {other:?}"),
                })
            }
        };
        columns.push(col);
    }
    for (required, label) in [
        (
            (|c: &Column| matches!(c, Column::EssayId)) as fn(&Column) -> bool,
            "essay_id",
        ),
        (|c: &Column| matches!(c, Column::PromptId), "prompt_id"),
        (|c: &Column| matches!(c, Column::Essay), "essay"),
    ] {
        if columns.iter().filter(|c| required(c)).count() != 1 {
            return Err(AesError::Validation {
                row: 1,
                message: format!("header must contain exactly one `{label}` column"),
            });
        }
    }

    let mut records = Vec::new();
    let mut ids = HashSet::new();
    for (idx, raw) in lines {
        let row = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != columns.len() {
            return Err(AesError::Validation {
                row,
                message: format!("expected {} columns, found {}", columns.len(), cells.len()),
            });
        }
        let mut essay_id = "";
        let mut prompt_id = "";
        let mut essay = "";
        let mut score = None;
        let mut raters = Vec::new();
        let parse_score = |cell: &str| {
            cell.trim()
                .parse::<i64>()
                .map_err(|_| AesError::Validation {
                    row,
                    message: format!("score {cell:?} is not an integer"),
                })
        };
        for (col, cell) in columns.iter().zip(&cells) {
            match col {
                Column::EssayId => essay_id = cell.trim(),
                Column::PromptId => prompt_id = cell.trim(),
                Column::Essay => essay = cell,
                Column::Score if !cell.trim().is_empty() => score = Some(parse_score(cell)?),
                Column::Score => {}
                Column::Rater => raters.push(parse_score(cell)?),
            }
        }
        if essay_id.is_empty() {
            return Err(AesError::Validation {
                row,
                message: "empty essay_id".into(),
            });
        }
        let prompt = by_id.get(prompt_id).ok_or_else(|| AesError::Validation {
            row,
            message: format!("unknown prompt_id {prompt_id:?}"),
        })?;
        for &s in score.iter().chain(&raters) {
            if !prompt.contains(s) {
                return Err(AesError::Validation {
                    row,
                    message: format!(
                        "score {s} outside prompt {} range [{}, {}]",
                        prompt.prompt_id, prompt.score_min, prompt.score_max
                    ),
                });
            }
        }
        if !ids.insert(essay_id.to_string()) {
            return Err(AesError::Validation {
                row,
                message: format!("duplicate essay_id {essay_id:?}"),
            });
        }
        let gold_score = score.or_else(|| {
            (!raters.is_empty()).then(|| round_div(raters.iter().sum(), raters.len() as i64))
        });
        records.push(EssayRecord {
            essay_id: essay_id.to_string(),
            prompt_id: prompt_id.to_string(),
            text: essay.to_string(),
            gold_score,
            rater_scores: (!raters.is_empty()).then_some(raters),
        });
    }
    Ok(records)
}

/// Train/validation/test partition of essay ids, produced by [`split`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub seed: u64,
    pub train: BTreeSet<String>,
    pub validation: BTreeSet<String>,
    pub test: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitPart {
    Train,
    Validation,
    Test,
}

impl SplitAssignment {
    pub fn part_of(&self, essay_id: &str) -> Option<SplitPart> {
        if self.train.contains(essay_id) {
            Some(SplitPart::Train)
        } else if self.validation.contains(essay_id) {
            Some(SplitPart::Validation)
        } else if self.test.contains(essay_id) {
            Some(SplitPart::Test)
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let split: SplitAssignment = serde_json::from_str(text)?;
        let overlap = split.train.intersection(&split.validation).next().is_some()
            || split.train.intersection(&split.test).next().is_some()
            || split.validation.intersection(&split.test).next().is_some();
        if overlap {
            return Err(AesError::invalid("split sets are not disjoint"));
        }
        Ok(split)
    }
}

/// Shuffles the corpus with `seed` and cuts it at 60% and 80%.
pub fn split(corpus: &[EssayRecord], seed: u64) -> Result<SplitAssignment> {
    let n = corpus.len();
    if n < 5 {
        return Err(AesError::invalid(format!(
            "a 60/20/20 split needs at least 5 essays, got {n}"
        )));
    }
    let mut ids: Vec<&str> = corpus.iter().map(|r| r.essay_id.as_str()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let train_end = 3 * n / 5;
    let val_end = 4 * n / 5;
    let collect = |s: &[&str]| s.iter().map(|id| id.to_string()).collect::<BTreeSet<_>>();
    Ok(SplitAssignment {
        seed,
        train: collect(&ids[..train_end]),
        validation: collect(&ids[train_end..val_end]),
        test: collect(&ids[val_end..]),
    })
}

/// Splits each prompt's essays independently with the same seed and merges
/// the parts, so every prompt is represented in all three sets.
pub fn split_by_prompt(corpus: &[EssayRecord], seed: u64) -> Result<SplitAssignment> {
    let mut groups: BTreeMap<&str, Vec<EssayRecord>> = BTreeMap::new();
    for rec in corpus {
        groups.entry(&rec.prompt_id).or_default().push(rec.clone());
    }
    let mut merged = SplitAssignment {
        seed,
        train: BTreeSet::new(),
        validation: BTreeSet::new(),
        test: BTreeSet::new(),
    };
    for (prompt_id, group) in groups {
        let part = split(&group, seed).map_err(|e| e.context(format!("prompt {prompt_id}")))?;
        merged.train.extend(part.train);
        merged.validation.extend(part.validation);
        merged.test.extend(part.test);
    }
    Ok(merged)
}

/// Maps a score on the prompt scale onto [0, 1].
pub fn normalize_score(score: i64, prompt: &PromptSpec) -> Result<f64> {
    if !prompt.contains(score) {
        return Err(AesError::invalid(format!(
            "score {score} outside prompt {} range [{}, {}]",
            prompt.prompt_id, prompt.score_min, prompt.score_max
        )));
    }
    Ok((score - prompt.score_min) as f64 / (prompt.score_max - prompt.score_min) as f64)
}

/// Maps a normalized model output back to the prompt scale. Total: NaN maps
/// to the minimum and overshoot is clamped.
pub fn rescale_score(y: f64, prompt: &PromptSpec) -> i64 {
    let span = (prompt.score_max - prompt.score_min) as f64;
    let raw = (y * span + prompt.score_min as f64).round();
    if raw.is_nan() {
        return prompt.score_min;
    }
    raw.clamp(prompt.score_min as f64, prompt.score_max as f64) as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p3() -> PromptSpec {
        PromptSpec::new("P3", 0, 3).unwrap()
    }

    fn records(n: usize) -> Vec<EssayRecord> {
        (0..n)
            .map(|i| EssayRecord {
                essay_id: format!("e{i}"),
                prompt_id: "P3".into(),
                text: String::new(),
                gold_score: None,
                rater_scores: None,
            })
            .collect()
    }

    #[test]
    fn parses_single_row() {
        let tsv = "essay_id\tprompt_id\tessay\tscore\ne1\tP3\tमैं घर गया।\t2\n";
        let recs = parse_corpus(tsv.as_bytes(), &[p3()]).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].essay_id, "e1");
        assert_eq!(recs[0].text, "मैं घर गया।");
        assert_eq!(recs[0].gold_score, Some(2));
    }

    #[test]
    fn out_of_range_score_names_row() {
        let tsv = "essay_id\tprompt_id\tessay\tscore\ne1\tP3\tx\t5\n";
        match parse_corpus(tsv.as_bytes(), &[p3()]) {
            Err(AesError::Validation { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn header_only_is_empty() {
        let tsv = "essay_id\tprompt_id\tessay\tscore\n";
        assert!(parse_corpus(tsv.as_bytes(), &[p3()]).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_utf8_duplicates_and_unknown_prompts() {
        let bad = b"essay_id\tprompt_id\tessay\n\xff\tP3\tx\n";
        assert!(matches!(
            parse_corpus(bad, &[p3()]),
            Err(AesError::Decode(_))
        ));

        let dup = "essay_id\tprompt_id\tessay\ne1\tP3\ta\ne1\tP3\tb\n";
        assert!(matches!(
            parse_corpus(dup.as_bytes(), &[p3()]),
            Err(AesError::Validation { row: 3, .. })
        ));

        let unknown = "essay_id\tprompt_id\tessay\ne1\tP9\ta\n";
        assert!(matches!(
            parse_corpus(unknown.as_bytes(), &[p3()]),
            Err(AesError::Validation { row: 2, .. })
        ));
    }

    #[test]
    fn rater_columns_average_into_gold() {
        let tsv = "essay_id\tprompt_id\tessay\trater_1\trater_2\n\
                   a\tP3\tx\t1\t2\n\
                   b\tP3\ty\t0\t0\n";
        let recs = parse_corpus(tsv.as_bytes(), &[p3()]).unwrap();
        // 1.5 rounds away from zero
        assert_eq!(recs[0].gold_score, Some(2));
        assert_eq!(recs[0].rater_scores, Some(vec![1, 2]));
        assert_eq!(recs[1].gold_score, Some(0));
    }

    #[test]
    fn round_div_half_away() {
        assert_eq!(round_div(3, 2), 2);
        assert_eq!(round_div(-3, 2), -2);
        assert_eq!(round_div(10, 3), 3);
        assert_eq!(round_div(5, 3), 2);
        assert_eq!(round_div(-5, 3), -2);
        assert_eq!(round_div(-4, 3), -1);
    }

    #[test]
    fn prompt_table_parses_and_validates() {
        let t = "# ranges\nprompt_id\tscore_min\tscore_max\nP1\t2\t12\n\nP8\t0\t60\n";
        let p = parse_prompt_table(t.as_bytes()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].rating_count(), 11);
        assert_eq!(p[1].rating_count(), 61);
        let bad = "prompt_id\tscore_min\tscore_max\nP1\t3\t3\n";
        assert!(parse_prompt_table(bad.as_bytes()).is_err());
    }

    #[test]
    fn split_sizes() {
        let s = split(&records(10), 7).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (6, 2, 2));
        let s = split(&records(100), 7).unwrap();
        assert_eq!(
            (s.train.len(), s.validation.len(), s.test.len()),
            (60, 20, 20)
        );
        let s = split(&records(5), 7).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (3, 1, 1));
        assert!(split(&records(4), 7).is_err());
    }

    #[test]
    fn split_is_deterministic_and_seed_sensitive() {
        let c = records(40);
        assert_eq!(split(&c, 11).unwrap(), split(&c, 11).unwrap());
        assert_ne!(split(&c, 11).unwrap().train, split(&c, 12).unwrap().train);
    }

    #[test]
    fn split_json_round_trip() {
        let s = split(&records(12), 3).unwrap();
        let back = SplitAssignment::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(s, back);
        assert!(s.to_json().unwrap().contains("\"validation\""));
    }

    #[test]
    fn normalize_examples() {
        let p1 = PromptSpec::new("P1", 2, 12).unwrap();
        assert_eq!(normalize_score(2, &p1).unwrap(), 0.0);
        assert_eq!(normalize_score(12, &p1).unwrap(), 1.0);
        assert_eq!(normalize_score(7, &p1).unwrap(), 0.5);
        assert!(normalize_score(13, &p1).is_err());
    }

    #[test]
    fn rescale_examples() {
        assert_eq!(rescale_score(0.5, &PromptSpec::new("P5", 0, 4).unwrap()), 2);
        assert_eq!(rescale_score(1.3, &p3()), 3);
        assert_eq!(
            rescale_score(-0.2, &PromptSpec::new("P8", 0, 60).unwrap()),
            0
        );
        assert_eq!(rescale_score(f64::NAN, &p3()), 0);
    }

    proptest! {
        #[test]
        fn normalize_rescale_round_trip(lo in -20i64..20, width in 1i64..80, pick in 0.0f64..1.0) {
            let prompt = PromptSpec::new("p", lo, lo + width).unwrap();
            let s = lo + ((width as f64) * pick).floor() as i64;
            prop_assert_eq!(rescale_score(normalize_score(s, &prompt).unwrap(), &prompt), s);
        }

        #[test]
        fn split_partitions_corpus(n in 5usize..120, seed in any::<u64>()) {
            let c = records(n);
            let s = split(&c, seed).unwrap();
            prop_assert_eq!(s.len(), n);
            prop_assert!(s.train.is_disjoint(&s.validation));
            prop_assert!(s.train.is_disjoint(&s.test));
            prop_assert!(s.validation.is_disjoint(&s.test));
            prop_assert_eq!(s.train.len(), 3 * n / 5);
            prop_assert_eq!(s.validation.len(), 4 * n / 5 - 3 * n / 5);
        }
    }
}
