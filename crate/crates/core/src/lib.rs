//! Feature-based automated essay scoring for Devanagari (Hindi) text.
//!
//! The crate covers the whole classical pipeline:
//!
//! - [`corpus`]: TSV essay corpora, prompt score ranges, seeded 60/20/20
//!   splits and score normalization
//! - [`textseg`]: sentence, word, grapheme and akshara segmentation with
//!   conjunct counting and stopword filtering
//! - [`embeddings`]: word-vector files, sentence embeddings, cosine
//! - [`features`]: the per-essay feature vector and its scaler
//! - [`models`]: linear regression, linear SVR, random forest and gradient
//!   boosted trees
//! - [`eval`]: quadratic weighted kappa and reports
//! - [`pipeline`]: the file-based batch stages behind the `aes` binary
//! - [`synth`]: seeded synthetic corpora with known scoring rules
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example <name>`.
//!
//! ```
//! use hindi_aes::corpus::PromptSpec;
//! use hindi_aes::textseg::{SegmentedText, Stopwords};
//!
//! let seg = SegmentedText::segment("मेरा विद्यालय बड़ा है। वहाँ पुस्तकालय है।", &Stopwords::hindi_default());
//! assert_eq!(seg.sentences.len(), 2);
//!
//! let prompt = PromptSpec::new("P5", 0, 4).unwrap();
//! let kappa = hindi_aes::qwk(&[0, 2, 4, 3], &[0, 2, 4, 3], &prompt).unwrap();
//! assert_eq!(kappa, 1.0);
//! ```

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod features;
pub mod models;
pub mod pipeline;
pub mod synth;
pub mod textseg;

pub use corpus::{EssayRecord, PromptSpec, SplitAssignment};
pub use error::{AesError, Result};
pub use eval::{qwk, EvaluationReport};
pub use features::{FeatureExtractor, FeatureSet, FeatureVector};
pub use models::{ModelSpec, TrainedModel};
pub use textseg::{SegmentedText, Stopwords};
