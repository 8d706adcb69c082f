//! Quadratic weighted kappa, inter-rater agreement and per-prompt reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{rescale_score, EssayRecord, PromptSpec};
use crate::error::{AesError, Result};
use crate::models::TrainedModel;

/// `W[i][j] = (i − j)² / (N − 1)²`.
pub fn weight_matrix(n_ratings: usize) -> Result<Vec<Vec<f64>>> {
    if n_ratings < 2 {
        return Err(AesError::invalid(format!(
            "a weight matrix needs at least 2 ratings, got {n_ratings}"
        )));
    }
    let denom = ((n_ratings - 1) * (n_ratings - 1)) as f64;
    Ok((0..n_ratings)
        .map(|i| {
            (0..n_ratings)
                .map(|j| {
                    let d = i.abs_diff(j);
                    (d * d) as f64 / denom
                })
                .collect()
        })
        .collect())
}

/// Weight, observed and expected matrices for one pair of rating vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingMatrixSet {
    pub n_ratings: usize,
    pub weights: Vec<Vec<f64>>,
    pub observed: Vec<Vec<f64>>,
    pub expected: Vec<Vec<f64>>,
}

impl RatingMatrixSet {
    /// Ratings are shifted to 0-based indices by the prompt's `score_min`.
    /// `expected` is the outer product of the two rating histograms scaled
    /// to the same total as `observed`.
    pub fn build(reference: &[i64], hypothesis: &[i64], prompt: &PromptSpec) -> Result<Self> {
        if reference.len() != hypothesis.len() {
            return Err(AesError::DimensionMismatch {
                expected: reference.len(),
                actual: hypothesis.len(),
            });
        }
        if reference.is_empty() {
            return Err(AesError::invalid("kappa of empty rating lists"));
        }
        let n = prompt.rating_count();
        let index = |s: i64| {
            if prompt.contains(s) {
                Ok((s - prompt.score_min) as usize)
            } else {
                Err(AesError::invalid(format!(
                    "rating {s} outside prompt {} range [{}, {}]",
                    prompt.prompt_id, prompt.score_min, prompt.score_max
                )))
            }
        };
        let mut observed = vec![vec![0.0; n]; n];
        let mut hist_ref = vec![0.0; n];
        let mut hist_hyp = vec![0.0; n];
        for (&r, &h) in reference.iter().zip(hypothesis) {
            let (i, j) = (index(r)?, index(h)?);
            observed[i][j] += 1.0;
            hist_ref[i] += 1.0;
            hist_hyp[j] += 1.0;
        }
        let total_observed = reference.len() as f64;
        let total_raw: f64 = hist_ref.iter().sum::<f64>() * hist_hyp.iter().sum::<f64>();
        let scale = total_observed / total_raw;
        let expected = hist_ref
            .iter()
            .map(|a| hist_hyp.iter().map(|b| a * b * scale).collect())
            .collect();
        Ok(RatingMatrixSet {
            n_ratings: n,
            weights: weight_matrix(n)?,
            observed,
            expected,
        })
    }

    fn weighted_sum(&self, m: &[Vec<f64>]) -> f64 {
        self.weights
            .iter()
            .zip(m)
            .flat_map(|(wr, mr)| wr.iter().zip(mr).map(|(w, v)| w * v))
            .sum()
    }

    /// `κ = 1 − Σ W·O / Σ W·E`. When `Σ W·E` is zero both raters gave one
    /// constant rating: κ is 1.0 if nothing was observed off the diagonal
    /// and 0.0 (with a warning) otherwise.
    pub fn kappa(&self) -> f64 {
        let num = self.weighted_sum(&self.observed);
        let den = self.weighted_sum(&self.expected);
        if den == 0.0 {
            if num == 0.0 {
                return 1.0;
            }
            log::warn!(
                "quadratic weighted kappa undefined (zero expected disagreement); using 0.0"
            );
            return 0.0;
        }
        1.0 - num / den
    }
}

pub fn qwk(reference: &[i64], hypothesis: &[i64], prompt: &PromptSpec) -> Result<f64> {
    Ok(RatingMatrixSet::build(reference, hypothesis, prompt)?.kappa())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaterPair {
    pub rater_a: usize,
    pub rater_b: usize,
    pub kappa: f64,
}

/// Pairwise QWK between raters (1-based rater numbers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterRaterReport {
    pub prompt_id: String,
    pub n_essays: usize,
    pub n_raters: usize,
    pub pairs: Vec<RaterPair>,
}

impl InterRaterReport {
    pub fn kappa(&self, a: usize, b: usize) -> Option<f64> {
        if a == b {
            return (1..=self.n_raters).contains(&a).then_some(1.0);
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.pairs
            .iter()
            .find(|p| p.rater_a == lo && p.rater_b == hi)
            .map(|p| p.kappa)
    }
}

/// Each item is `(essay_id, ratings)`; every essay must carry the same
/// number of ratings, at least two.
pub fn inter_rater_report(
    ratings: &[(String, Vec<i64>)],
    prompt: &PromptSpec,
) -> Result<InterRaterReport> {
    let n_raters = ratings
        .iter()
        .map(|(_, r)| r.len())
        .max()
        .ok_or_else(|| AesError::invalid("no rated essays"))?;
    if n_raters < 2 {
        return Err(AesError::invalid(
            "inter-rater agreement needs at least two raters",
        ));
    }
    if let Some((id, r)) = ratings.iter().find(|(_, r)| r.len() != n_raters) {
        return Err(AesError::invalid(format!(
            "essay {id} has {} of {n_raters} ratings",
            r.len()
        )));
    }
    let column = |k: usize| ratings.iter().map(|(_, r)| r[k]).collect::<Vec<_>>();
    let mut pairs = Vec::new();
    for a in 0..n_raters {
        for b in a + 1..n_raters {
            pairs.push(RaterPair {
                rater_a: a + 1,
                rater_b: b + 1,
                kappa: qwk(&column(a), &column(b), prompt)?,
            });
        }
    }
    Ok(InterRaterReport {
        prompt_id: prompt.prompt_id.clone(),
        n_essays: ratings.len(),
        n_raters,
        pairs,
    })
}

/// Collects `rater_scores` from records, failing on the first essay that
/// has none.
pub fn rater_table(records: &[EssayRecord]) -> Result<Vec<(String, Vec<i64>)>> {
    records
        .iter()
        .map(|r| {
            r.rater_scores
                .clone()
                .map(|s| (r.essay_id.clone(), s))
                .ok_or_else(|| {
                    AesError::invalid(format!("essay {} has no rater scores", r.essay_id))
                })
        })
        .collect()
}

/// QWK and score distributions for one prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptReport {
    pub prompt_id: String,
    pub n: usize,
    pub qwk: f64,
    pub score_min: i64,
    pub score_max: i64,
    /// Counts per score, index 0 is `score_min`.
    pub prediction_histogram: Vec<usize>,
    pub gold_histogram: Vec<usize>,
}

fn histogram(scores: &[i64], prompt: &PromptSpec) -> Vec<usize> {
    let mut h = vec![0; prompt.rating_count()];
    for &s in scores {
        h[(s - prompt.score_min) as usize] += 1;
    }
    h
}

/// Rescales normalized predictions to the prompt scale and scores them
/// against gold.
pub fn evaluate_predictions(
    prompt: &PromptSpec,
    gold: &[i64],
    normalized_predictions: &[f64],
) -> Result<PromptReport> {
    let predicted: Vec<i64> = normalized_predictions
        .iter()
        .map(|&y| rescale_score(y, prompt))
        .collect();
    let kappa = qwk(gold, &predicted, prompt)?;
    Ok(PromptReport {
        prompt_id: prompt.prompt_id.clone(),
        n: gold.len(),
        qwk: kappa,
        score_min: prompt.score_min,
        score_max: prompt.score_max,
        prediction_histogram: histogram(&predicted, prompt),
        gold_histogram: histogram(gold, prompt),
    })
}

/// Predicts every essay, rescales and compares with gold scores.
/// `features` maps essay ids to raw model inputs.
pub fn evaluate_model(
    model: &TrainedModel,
    test: &[EssayRecord],
    features: &BTreeMap<String, Vec<f64>>,
) -> Result<PromptReport> {
    let mut gold = Vec::with_capacity(test.len());
    let mut preds = Vec::with_capacity(test.len());
    for essay in test {
        if essay.prompt_id != model.prompt.prompt_id {
            return Err(AesError::invalid(format!(
                "essay {} belongs to prompt {} but the model was trained for {}",
                essay.essay_id, essay.prompt_id, model.prompt.prompt_id
            )));
        }
        let g = essay.gold_score.ok_or_else(|| {
            AesError::invalid(format!("essay {} has no gold score", essay.essay_id))
        })?;
        let x = features.get(&essay.essay_id).ok_or_else(|| {
            AesError::invalid(format!("no features for essay {}", essay.essay_id))
        })?;
        gold.push(g);
        preds.push(
            model
                .predict(x)
                .map_err(|e| e.context(format!("essay {}", essay.essay_id)))?,
        );
    }
    evaluate_predictions(&model.prompt, &gold, &preds)
}

/// Per-prompt results for one model kind plus their arithmetic mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model_kind: String,
    pub seed: u64,
    pub prompts: Vec<PromptReport>,
    pub average_qwk: f64,
}

impl EvaluationReport {
    pub fn new(model_kind: impl Into<String>, seed: u64, prompts: Vec<PromptReport>) -> Self {
        let average_qwk = if prompts.is_empty() {
            0.0
        } else {
            prompts.iter().map(|p| p.qwk).sum::<f64>() / prompts.len() as f64
        };
        EvaluationReport {
            model_kind: model_kind.into(),
            seed,
            prompts,
            average_qwk,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One row per model: prompt columns then the average.
    pub fn to_table(&self) -> String {
        render_table(std::slice::from_ref(self))
    }
}

/// Renders several reports as a model × prompt QWK table.
pub fn render_table(reports: &[EvaluationReport]) -> String {
    let mut prompts: Vec<&str> = Vec::new();
    for r in reports {
        for p in &r.prompts {
            if !prompts.contains(&p.prompt_id.as_str()) {
                prompts.push(&p.prompt_id);
            }
        }
    }
    let mut out = String::new();
    let _ = write!(out, "{:<14}", "Model");
    for p in &prompts {
        let _ = write!(out, " {p:>7}");
    }
    let _ = writeln!(out, " {:>7}", "Average");
    for r in reports {
        let _ = write!(out, "{:<14}", r.model_kind);
        for p in &prompts {
            match r.prompts.iter().find(|x| x.prompt_id == *p) {
                Some(x) => {
                    let _ = write!(out, " {:>7.3}", x.qwk);
                }
                None => {
                    let _ = write!(out, " {:>7}", "-");
                }
            }
        }
        let _ = writeln!(out, " {:>7.3}", r.average_qwk);
    }
    out
}
