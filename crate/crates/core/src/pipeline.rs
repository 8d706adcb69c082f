//! File-based batch stages: featurize, train, predict, evaluate, report.
//!
//! Every stage reads a JSON [`RunConfig`] and communicates with the others
//! only through files in the configured output directory:
//!
//! | stage     | writes                                           |
//! |-----------|--------------------------------------------------|
//! | featurize | `split.json`, `features.tsv`                     |
//! | train     | `models/<prompt>.json`, `train_log.json`         |
//! | predict   | `predictions.tsv` (validation and unscored only) |
//! | evaluate  | `report.json`, `report.txt`                      |
//! | report    | nothing; renders the stored report               |
//!
//! Only [`cmd_evaluate`] can open the test split: [`SplitView::test`]
//! demands a [`TestAccess`] token that nothing else in the crate constructs.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{
    builtin_prompts, normalize_score, parse_corpus, parse_prompt_table, rescale_score,
    split_by_prompt, EssayRecord, PromptSpec, SplitAssignment,
};
use crate::embeddings::{load_vectors, PrecomputedSentences, SentenceEmbedder, VectorTable};
use crate::error::{AesError, Result};
use crate::eval::{
    evaluate_model, evaluate_predictions, inter_rater_report, rater_table, EvaluationReport,
    PromptReport,
};
use crate::features::{
    parse_feature_tsv, write_feature_tsv, DocumentFrequency, ExtractionConfig, FeatureExtractor,
    FeatureSet, FeatureVector, DEFAULT_COHERENCE_OFFSET, DEFAULT_OOV_FREQ_THRESHOLD,
    DEFAULT_PSW_THRESHOLD,
};
use crate::models::{ModelSpec, TrainedModel};
use crate::textseg::{SegmentedText, Stopwords};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;
/// Smallest number of scored essays a prompt needs to be split and trained.
pub const MIN_PROMPT_ESSAYS: usize = 5;
const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SPLIT_FILE: &str = "split.json";
pub const FEATURES_FILE: &str = "features.tsv";
pub const MODELS_DIR: &str = "models";
pub const TRAIN_LOG_FILE: &str = "train_log.json";
pub const PREDICTIONS_FILE: &str = "predictions.tsv";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TXT: &str = "report.txt";

fn default_true() -> bool {
    true
}

fn default_oov() -> usize {
    DEFAULT_OOV_FREQ_THRESHOLD
}

fn default_psw() -> usize {
    DEFAULT_PSW_THRESHOLD
}

fn default_offset() -> usize {
    DEFAULT_COHERENCE_OFFSET
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// The JSON run configuration. Relative paths are resolved against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub corpus: PathBuf,
    /// Prompt score-range table; [`builtin_prompts`] when absent.
    #[serde(default)]
    pub prompts: Option<PathBuf>,
    /// Stopword list; the bundled Hindi list when absent.
    #[serde(default)]
    pub stopwords: Option<PathBuf>,
    /// Word-vector file used for sentence embeddings.
    #[serde(default)]
    pub vectors: Option<PathBuf>,
    #[serde(default)]
    pub max_vectors: Option<usize>,
    /// Directory of `<essay_id>.tsv` precomputed sentence vectors; takes
    /// precedence over `vectors` for coherence.
    #[serde(default)]
    pub sentence_vectors: Option<PathBuf>,
    /// One word per line. Defaults to the vector vocabulary, or empty.
    #[serde(default)]
    pub lexicon: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub coherence: bool,
    #[serde(default)]
    pub include_juk: bool,
    pub seed: u64,
    pub model: ModelSpec,
    #[serde(default = "default_oov")]
    pub oov_freq_threshold: usize,
    #[serde(default = "default_psw")]
    pub psw_threshold: usize,
    #[serde(default = "default_offset")]
    pub coherence_offset: usize,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// A config with defaults for everything but the corpus, seed and model.
    pub fn new(corpus: impl Into<PathBuf>, seed: u64, model: ModelSpec) -> Self {
        RunConfig {
            schema_version: CONFIG_SCHEMA_VERSION,
            corpus: corpus.into(),
            prompts: None,
            stopwords: None,
            vectors: None,
            max_vectors: None,
            sentence_vectors: None,
            lexicon: None,
            coherence: true,
            include_juk: false,
            seed,
            model,
            oov_freq_threshold: DEFAULT_OOV_FREQ_THRESHOLD,
            psw_threshold: DEFAULT_PSW_THRESHOLD,
            coherence_offset: DEFAULT_COHERENCE_OFFSET,
            output_dir: default_output(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn feature_set(&self) -> FeatureSet {
        FeatureSet {
            coherence: self.coherence,
            juk: self.include_juk,
        }
    }

    fn extraction(&self) -> ExtractionConfig {
        ExtractionConfig {
            psw_threshold: self.psw_threshold,
            oov_freq_threshold: self.oov_freq_threshold,
            coherence_offset: self.coherence_offset,
            features: self.feature_set(),
        }
    }
}

/// A validated config with paths resolved against its directory.
#[derive(Debug, Clone)]
pub struct Run {
    pub config: RunConfig,
    base: PathBuf,
    /// Restricts every stage to one prompt.
    pub prompt_filter: Option<String>,
    /// Model file overriding `output_dir/models/<prompt>.json`.
    pub model_path: Option<PathBuf>,
}

/// Options shared by every command, mirroring the CLI flags.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub config: PathBuf,
    pub prompt: Option<String>,
    pub model: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Run {
    /// Loads and validates a config file. All referenced inputs must exist;
    /// coherence without a vector source is rejected before any other work.
    pub fn load(inv: &Invocation) -> Result<Self> {
        let text =
            std::fs::read_to_string(&inv.config).map_err(|e| AesError::io(&inv.config, e))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| AesError::Config(format!("{}: {e}", inv.config.display())))?;
        if let Some(seed) = inv.seed {
            config.seed = seed;
        }
        let base = inv
            .config
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        Run::from_config(config, base, inv.prompt.clone(), inv.model.clone())
    }

    pub fn from_config(
        config: RunConfig,
        base: impl Into<PathBuf>,
        prompt_filter: Option<String>,
        model_path: Option<PathBuf>,
    ) -> Result<Self> {
        if config.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(AesError::Config(format!(
                "unsupported schema_version {} (expected {CONFIG_SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        let run = Run {
            config,
            base: base.into(),
            prompt_filter,
            model_path,
        };
        let c = &run.config;
        if c.coherence && c.vectors.is_none() && c.sentence_vectors.is_none() {
            return Err(AesError::Config(
                "coherence is enabled but neither `vectors` nor `sentence_vectors` is set".into(),
            ));
        }
        let inputs = [
            Some(("corpus", &c.corpus)),
            c.prompts.as_ref().map(|p| ("prompts", p)),
            c.stopwords.as_ref().map(|p| ("stopwords", p)),
            c.vectors.as_ref().map(|p| ("vectors", p)),
            c.sentence_vectors.as_ref().map(|p| ("sentence_vectors", p)),
            c.lexicon.as_ref().map(|p| ("lexicon", p)),
        ];
        for (key, path) in inputs.into_iter().flatten() {
            if !run.resolve(path).exists() {
                return Err(AesError::Config(format!(
                    "`{key}` refers to {} which does not exist",
                    path.display()
                )));
            }
        }
        if let Some(m) = &run.model_path {
            if !m.exists() {
                return Err(AesError::Config(format!(
                    "model file {} does not exist",
                    m.display()
                )));
            }
        }
        Ok(run)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        self.base.join(p)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.config.output_dir)
    }

    pub fn output(&self, name: &str) -> PathBuf {
        self.output_dir().join(name)
    }

    pub fn model_file(&self, prompt_id: &str) -> PathBuf {
        self.output_dir()
            .join(MODELS_DIR)
            .join(format!("{prompt_id}.json"))
    }

    fn read(&self, p: &Path) -> Result<Vec<u8>> {
        let full = self.resolve(p);
        std::fs::read(&full).map_err(|e| AesError::io(p, e))
    }

    fn write(&self, name: &str, body: &str) -> Result<()> {
        let path = self.output(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| AesError::io(parent, e))?;
        }
        std::fs::write(&path, body).map_err(|e| AesError::io(name, e))
    }

    fn read_output(&self, name: &str) -> Result<String> {
        std::fs::read_to_string(self.output(name)).map_err(|e| {
            AesError::io(name, e).context(format!("reading {name}; run the earlier stages first"))
        })
    }

    fn prompts(&self) -> Result<Vec<PromptSpec>> {
        match &self.config.prompts {
            Some(p) => {
                parse_prompt_table(&self.read(p)?).map_err(|e| e.context(p.display().to_string()))
            }
            None => Ok(builtin_prompts()),
        }
    }

    fn corpus_bytes(&self) -> Result<Vec<u8>> {
        self.read(&self.config.corpus)
    }

    fn corpus(&self, bytes: &[u8]) -> Result<Corpus> {
        let prompts = self.prompts()?;
        let records = parse_corpus(bytes, &prompts)
            .map_err(|e| e.context(self.config.corpus.display().to_string()))?;
        let present: BTreeSet<&str> = records.iter().map(|r| r.prompt_id.as_str()).collect();
        if let Some(p) = &self.prompt_filter {
            if !present.contains(p.as_str()) {
                return Err(AesError::Config(format!(
                    "prompt {p:?} has no essays in the corpus"
                )));
            }
        }
        let prompts = prompts
            .into_iter()
            .filter(|p| present.contains(p.prompt_id.as_str()))
            .filter(|p| {
                self.prompt_filter
                    .as_ref()
                    .is_none_or(|f| *f == p.prompt_id)
            })
            .collect();
        let records = records
            .into_iter()
            .filter(|r| {
                self.prompt_filter
                    .as_ref()
                    .is_none_or(|f| *f == r.prompt_id)
            })
            .collect();
        Ok(Corpus { prompts, records })
    }

    fn provenance(&self, corpus_bytes: &[u8]) -> Vec<String> {
        let c = &self.config;
        let mut lines = vec![
            format!("aes {VERSION}"),
            format!("seed {}", c.seed),
            format!("corpus_sha256 {}", sha256_hex(corpus_bytes)),
            format!("features {}", c.feature_set().names().join(",")),
        ];
        if let Some(p) = &self.prompt_filter {
            lines.push(format!("prompt {p}"));
        }
        lines
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct Corpus {
    /// Prompts that have essays, in table order.
    prompts: Vec<PromptSpec>,
    records: Vec<EssayRecord>,
}

impl Corpus {
    fn scored_count(&self, prompt_id: &str) -> usize {
        self.records
            .iter()
            .filter(|r| r.prompt_id == prompt_id && r.gold_score.is_some())
            .count()
    }

    /// Scored essays of every prompt large enough to split. Smaller prompts
    /// are still featurized but stay out of the split.
    fn splittable(&self) -> Vec<EssayRecord> {
        let mut out = Vec::new();
        for p in &self.prompts {
            if self.scored_count(&p.prompt_id) < MIN_PROMPT_ESSAYS {
                log::warn!(
                    "prompt {} has fewer than {MIN_PROMPT_ESSAYS} scored essays and is not split",
                    p.prompt_id
                );
                continue;
            }
            out.extend(
                self.records
                    .iter()
                    .filter(|r| r.prompt_id == p.prompt_id && r.gold_score.is_some())
                    .cloned(),
            );
        }
        out
    }

    fn check_sizes(&self) -> Result<()> {
        for p in &self.prompts {
            let n = self.scored_count(&p.prompt_id);
            if n < MIN_PROMPT_ESSAYS {
                return Err(AesError::invalid(format!(
                    "prompt {} has {n} scored essays; at least {MIN_PROMPT_ESSAYS} are needed",
                    p.prompt_id
                )));
            }
        }
        Ok(())
    }
}

/// Proof that the caller is the evaluation stage.
pub struct TestAccess(());

/// Split-aware view over the corpus. Train and validation records are open;
/// the test part needs a [`TestAccess`].
pub struct SplitView<'a> {
    split: &'a SplitAssignment,
    records: &'a [EssayRecord],
}

impl<'a> SplitView<'a> {
    pub fn new(split: &'a SplitAssignment, records: &'a [EssayRecord]) -> Self {
        SplitView { split, records }
    }

    fn part(&self, ids: &BTreeSet<String>, prompt: &str) -> Vec<&'a EssayRecord> {
        self.records
            .iter()
            .filter(|r| r.prompt_id == prompt && ids.contains(&r.essay_id))
            .collect()
    }

    pub fn train(&self, prompt: &str) -> Vec<&'a EssayRecord> {
        self.part(&self.split.train, prompt)
    }

    pub fn validation(&self, prompt: &str) -> Vec<&'a EssayRecord> {
        self.part(&self.split.validation, prompt)
    }

    /// Essays outside every split part, normally the unscored ones.
    pub fn unassigned(&self, prompt: &str) -> Vec<&'a EssayRecord> {
        self.records
            .iter()
            .filter(|r| r.prompt_id == prompt && self.split.part_of(&r.essay_id).is_none())
            .collect()
    }

    pub fn test(&self, prompt: &str, _access: &TestAccess) -> Vec<&'a EssayRecord> {
        self.part(&self.split.test, prompt)
    }
}

fn load_lines(bytes: &[u8]) -> Result<HashSet<String>> {
    Ok(std::str::from_utf8(bytes)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

/// Sentence embedder for one essay: a shared vector table, or the essay's
/// own precomputed file.
enum EssayEmbedder<'a> {
    Table(&'a VectorTable),
    Precomputed(PrecomputedSentences),
}

impl EssayEmbedder<'_> {
    fn as_dyn(&self) -> &dyn SentenceEmbedder {
        match self {
            EssayEmbedder::Table(t) => *t,
            EssayEmbedder::Precomputed(p) => p,
        }
    }
}

/// Featurizes the whole corpus. Document frequencies for OOV detection come
/// from the training split only.
pub fn cmd_featurize(run: &Run) -> Result<String> {
    let c = &run.config;
    let corpus_bytes = run.corpus_bytes()?;
    let corpus = run.corpus(&corpus_bytes)?;
    let split = split_by_prompt(&corpus.splittable(), c.seed)?;

    let stopwords = match &c.stopwords {
        Some(p) => {
            Stopwords::from_bytes(&run.read(p)?).map_err(|e| e.context(p.display().to_string()))?
        }
        None => Stopwords::hindi_default(),
    };
    let table = match (&c.vectors, c.coherence || c.lexicon.is_none()) {
        (Some(p), true) => Some(
            load_vectors(&run.read(p)?, c.max_vectors)
                .map_err(|e| e.context(p.display().to_string()))?,
        ),
        _ => None,
    };
    let lexicon = match (&c.lexicon, &table) {
        (Some(p), _) => {
            load_lines(&run.read(p)?).map_err(|e| e.context(p.display().to_string()))?
        }
        (None, Some(t)) => t.vocabulary(),
        (None, None) => HashSet::new(),
    };

    let segmented: Vec<SegmentedText> = corpus
        .records
        .iter()
        .map(|r| SegmentedText::segment(&r.text, &stopwords))
        .collect();
    let doc_freq = DocumentFrequency::from_documents(
        corpus
            .records
            .iter()
            .zip(&segmented)
            .filter(|(r, _)| split.train.contains(&r.essay_id))
            .map(|(_, s)| s),
    );

    let mut rows = Vec::with_capacity(corpus.records.len());
    for (rec, seg) in corpus.records.iter().zip(&segmented) {
        let embedder = match (&c.sentence_vectors, &table) {
            _ if !c.coherence => None,
            (Some(dir), _) => {
                let rel = dir.join(format!("{}.tsv", rec.essay_id));
                let bytes = run.read(&rel)?;
                Some(EssayEmbedder::Precomputed(
                    PrecomputedSentences::parse(&bytes)
                        .map_err(|e| e.context(rel.display().to_string()))?,
                ))
            }
            (None, Some(t)) => Some(EssayEmbedder::Table(t)),
            (None, None) => unreachable!("validated when the run was loaded"),
        };
        let extractor = FeatureExtractor {
            stopwords: &stopwords,
            lexicon: &lexicon,
            doc_freq: &doc_freq,
            embedder: embedder.as_ref().map(EssayEmbedder::as_dyn),
            config: c.extraction(),
        };
        let fv = extractor
            .extract_segmented(seg)
            .map_err(|e| e.context(format!("essay {}", rec.essay_id)))?;
        rows.push((rec.essay_id.clone(), fv));
    }

    run.write(SPLIT_FILE, &split.to_json()?)?;
    run.write(
        FEATURES_FILE,
        &write_feature_tsv(&rows, &c.feature_set(), &run.provenance(&corpus_bytes)),
    )?;
    Ok(format!(
        "featurized {} essays ({} train, {} validation, {} test)\n",
        rows.len(),
        split.train.len(),
        split.validation.len(),
        split.test.len()
    ))
}

/// Featurize outputs checked against the current corpus and config.
struct Stage {
    corpus: Corpus,
    split: SplitAssignment,
    features: BTreeMap<String, Vec<f64>>,
}

fn load_stage(run: &Run) -> Result<Stage> {
    let corpus_bytes = run.corpus_bytes()?;
    let corpus = run.corpus(&corpus_bytes)?;
    let features_text = run.read_output(FEATURES_FILE)?;
    let expected: Vec<String> = run.provenance(&corpus_bytes);
    let header: Vec<&str> = features_text
        .lines()
        .take_while(|l| l.starts_with("# "))
        .map(|l| &l[2..])
        .collect();
    if header != expected {
        return Err(AesError::Config(format!(
            "{FEATURES_FILE} was produced from a different corpus, seed, prompt or feature set; \
             rerun featurize"
        )));
    }
    let table = parse_feature_tsv(&features_text).map_err(|e| e.context(FEATURES_FILE))?;
    let split = SplitAssignment::from_json(&run.read_output(SPLIT_FILE)?)
        .map_err(|e| e.context(SPLIT_FILE))?;
    if split.seed != run.config.seed {
        return Err(AesError::Config(format!(
            "{SPLIT_FILE} was made with seed {} but the run uses {}; rerun featurize",
            split.seed, run.config.seed
        )));
    }
    let features = table.rows.into_iter().collect();
    Ok(Stage {
        corpus,
        split,
        features,
    })
}

fn inputs_of(
    features: &BTreeMap<String, Vec<f64>>,
    records: &[&EssayRecord],
) -> Result<Vec<Vec<f64>>> {
    records
        .iter()
        .map(|r| {
            features
                .get(&r.essay_id)
                .cloned()
                .ok_or_else(|| AesError::invalid(format!("no features for essay {}", r.essay_id)))
        })
        .collect()
}

fn golds(records: &[&EssayRecord]) -> Vec<i64> {
    records
        .iter()
        .map(|r| r.gold_score.expect("split holds scored essays"))
        .collect()
}

fn predict_all(model: &TrainedModel, x: &[Vec<f64>]) -> Result<Vec<f64>> {
    x.iter().map(|r| model.predict(r)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptTrainLog {
    pub prompt_id: String,
    pub n_train: usize,
    pub n_validation: usize,
    pub train_qwk: f64,
    pub validation_qwk: Option<f64>,
    pub model_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub aes_version: String,
    pub seed: u64,
    pub model: ModelSpec,
    pub features: Vec<String>,
    pub prompts: Vec<PromptTrainLog>,
}

/// Trains one model per prompt on the training split and logs train and
/// validation QWK.
pub fn cmd_train(run: &Run) -> Result<String> {
    let stage = load_stage(run)?;
    stage.corpus.check_sizes()?;
    let view = SplitView::new(&stage.split, &stage.corpus.records);
    let set = run.config.feature_set();
    let mut log = TrainLog {
        aes_version: VERSION.to_string(),
        seed: run.config.seed,
        model: run.config.model,
        features: set.names().into_iter().map(String::from).collect(),
        prompts: Vec::new(),
    };
    let mut summary = String::new();
    for prompt in &stage.corpus.prompts {
        let train = view.train(&prompt.prompt_id);
        let x = inputs_of(&stage.features, &train)?;
        let gold = golds(&train);
        let y = gold
            .iter()
            .map(|&g| normalize_score(g, prompt))
            .collect::<Result<Vec<_>>>()?;
        let model = TrainedModel::fit(
            run.config.model,
            set,
            &x,
            &y,
            prompt.clone(),
            run.config.seed,
        )
        .map_err(|e| e.context(format!("prompt {}", prompt.prompt_id)))?;
        let train_qwk = evaluate_predictions(prompt, &gold, &predict_all(&model, &x)?)?.qwk;

        let val = view.validation(&prompt.prompt_id);
        let validation_qwk = if val.is_empty() {
            None
        } else {
            let xv = inputs_of(&stage.features, &val)?;
            Some(evaluate_predictions(prompt, &golds(&val), &predict_all(&model, &xv)?)?.qwk)
        };

        let rel = format!("{MODELS_DIR}/{}.json", prompt.prompt_id);
        run.write(&rel, &model.to_json()?)?;
        let _ = writeln!(
            summary,
            "{}: train QWK {train_qwk:.4}, validation QWK {}",
            prompt.prompt_id,
            validation_qwk.map_or("n/a".into(), |q| format!("{q:.4}"))
        );
        log.prompts.push(PromptTrainLog {
            prompt_id: prompt.prompt_id.clone(),
            n_train: train.len(),
            n_validation: val.len(),
            train_qwk,
            validation_qwk,
            model_file: rel,
        });
    }
    run.write(
        TRAIN_LOG_FILE,
        &(serde_json::to_string_pretty(&log)? + "\n"),
    )?;
    Ok(summary)
}

fn load_model(path: &Path, shown: &str) -> Result<TrainedModel> {
    let text = std::fs::read_to_string(path).map_err(|e| AesError::io(shown, e))?;
    TrainedModel::from_json(&text).map_err(|e| e.context(shown.to_string()))
}

/// Models to use, keyed by prompt: the `--model` file alone, or one stored
/// model per prompt.
fn models_for(run: &Run, stage: &Stage) -> Result<Vec<(PromptSpec, TrainedModel)>> {
    let columns = run.config.feature_set();
    let check = |model: &TrainedModel, prompt: &PromptSpec| -> Result<()> {
        if model.prompt != *prompt {
            return Err(AesError::invalid(format!(
                "model was trained for prompt {} [{}, {}] but is applied to {} [{}, {}]",
                model.prompt.prompt_id,
                model.prompt.score_min,
                model.prompt.score_max,
                prompt.prompt_id,
                prompt.score_min,
                prompt.score_max
            )));
        }
        if model.features != columns {
            return Err(AesError::Config(format!(
                "model expects features [{}] but the run is configured for [{}]",
                model.feature_names.join(", "),
                columns.names().join(", ")
            )));
        }
        Ok(())
    };
    if let Some(path) = &run.model_path {
        let shown = path
            .file_name()
            .map_or("model".into(), |f| f.to_string_lossy().into_owned());
        let model = load_model(path, &shown)?;
        let prompt = stage
            .corpus
            .prompts
            .iter()
            .find(|p| match &run.prompt_filter {
                Some(f) => p.prompt_id == *f,
                None => p.prompt_id == model.prompt.prompt_id,
            })
            .ok_or_else(|| {
                AesError::invalid(format!(
                    "model prompt {} has no essays in the corpus",
                    model.prompt.prompt_id
                ))
            })?;
        check(&model, prompt)?;
        return Ok(vec![(prompt.clone(), model)]);
    }
    stage
        .corpus
        .prompts
        .iter()
        .map(|p| {
            let rel = format!("{MODELS_DIR}/{}.json", p.prompt_id);
            let model = load_model(&run.model_file(&p.prompt_id), &rel)?;
            check(&model, p)?;
            Ok((p.clone(), model))
        })
        .collect()
}

/// Scores the validation split and unscored essays. Test essays are never
/// read here.
pub fn cmd_predict(run: &Run) -> Result<String> {
    let stage = load_stage(run)?;
    let view = SplitView::new(&stage.split, &stage.corpus.records);
    let mut out = String::new();
    for line in run.provenance(&run.corpus_bytes()?) {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str("essay_id\tprompt_id\tsplit\tpredicted_score\tnormalized\n");
    let mut n = 0;
    for (prompt, model) in models_for(run, &stage)? {
        for (part, records) in [
            ("validation", view.validation(&prompt.prompt_id)),
            ("unscored", view.unassigned(&prompt.prompt_id)),
        ] {
            let x = inputs_of(&stage.features, &records)?;
            for (rec, y) in records.iter().zip(predict_all(&model, &x)?) {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{part}\t{}\t{y}",
                    rec.essay_id,
                    rec.prompt_id,
                    rescale_score(y, &prompt)
                );
                n += 1;
            }
        }
    }
    run.write(PREDICTIONS_FILE, &out)?;
    Ok(format!("wrote {n} predictions\n"))
}

/// Scores the held-out test split and writes the JSON report and table.
pub fn cmd_evaluate(run: &Run) -> Result<String> {
    let stage = load_stage(run)?;
    let access = TestAccess(());
    let view = SplitView::new(&stage.split, &stage.corpus.records);
    let models = models_for(run, &stage)?;
    let kind = models
        .first()
        .map(|(_, m)| m.kind())
        .ok_or_else(|| AesError::invalid("no prompts to evaluate"))?;
    let mut per_prompt: Vec<PromptReport> = Vec::with_capacity(models.len());
    for (prompt, model) in &models {
        let test: Vec<EssayRecord> = view
            .test(&prompt.prompt_id, &access)
            .into_iter()
            .cloned()
            .collect();
        if test.is_empty() {
            return Err(AesError::invalid(format!(
                "prompt {} has an empty test split",
                prompt.prompt_id
            )));
        }
        per_prompt.push(
            evaluate_model(model, &test, &stage.features)
                .map_err(|e| e.context(format!("prompt {}", prompt.prompt_id)))?,
        );
    }
    let report = EvaluationReport::new(kind, run.config.seed, per_prompt);
    let table = report.to_table();
    run.write(REPORT_JSON, &report.to_json()?)?;
    run.write(REPORT_TXT, &table)?;
    Ok(table)
}

/// Renders the stored evaluation table, plus pairwise rater agreement for
/// every prompt whose essays carry rater columns.
pub fn cmd_report(run: &Run) -> Result<String> {
    let report = EvaluationReport::from_json(&run.read_output(REPORT_JSON)?)
        .map_err(|e| e.context(REPORT_JSON))?;
    let mut out = format!("seed {}\n{}", report.seed, report.to_table());
    let corpus = run.corpus(&run.corpus_bytes()?)?;
    for prompt in &corpus.prompts {
        let rated: Vec<EssayRecord> = corpus
            .records
            .iter()
            .filter(|r| r.prompt_id == prompt.prompt_id && r.rater_scores.is_some())
            .cloned()
            .collect();
        if rated.is_empty() {
            continue;
        }
        let ir = inter_rater_report(&rater_table(&rated)?, prompt)?;
        if out.ends_with('\n') {
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "Inter-rater QWK, prompt {} ({} essays, {} raters)",
            ir.prompt_id, ir.n_essays, ir.n_raters
        );
        for p in &ir.pairs {
            let _ = writeln!(
                out,
                "  rater {} vs rater {}: {:.3}",
                p.rater_a, p.rater_b, p.kappa
            );
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Featurize,
    Train,
    Predict,
    Evaluate,
    Report,
}

/// Loads the config named in `inv` and runs one stage, returning the text
/// meant for standard output.
pub fn run_command(cmd: Command, inv: &Invocation) -> Result<String> {
    let run = Run::load(inv)?;
    match cmd {
        Command::Featurize => cmd_featurize(&run),
        Command::Train => cmd_train(&run),
        Command::Predict => cmd_predict(&run),
        Command::Evaluate => cmd_evaluate(&run),
        Command::Report => cmd_report(&run),
    }
}

/// Featurize, train and evaluate in sequence.
pub fn run_all(run: &Run) -> Result<EvaluationReport> {
    cmd_featurize(run)?;
    cmd_train(run)?;
    cmd_evaluate(run)?;
    EvaluationReport::from_json(&run.read_output(REPORT_JSON)?)
}

/// Feature vectors for texts outside any corpus file, using the bundled
/// stopwords, an empty lexicon and no document frequencies.
pub fn featurize_texts(
    texts: &[&str],
    embedder: Option<&dyn SentenceEmbedder>,
    config: ExtractionConfig,
) -> Result<Vec<FeatureVector>> {
    let stopwords = Stopwords::hindi_default();
    let lexicon = HashSet::new();
    let doc_freq = DocumentFrequency::default();
    let extractor = FeatureExtractor {
        stopwords: &stopwords,
        lexicon: &lexicon,
        doc_freq: &doc_freq,
        embedder,
        config,
    };
    texts.iter().map(|t| extractor.extract(t)).collect()
}
