//! Salient-scene identification for long scripts.
//!
//! The crate parses scripts into scenes and summaries into sentences, aligns
//! summary sentences to scenes, turns alignments into binary scene-saliency
//! labels, measures inter-annotator agreement on such alignments, and predicts
//! saliency without alignments (majority, directional TextRank, a linear
//! scorer over scene embeddings). It is `no_std` and needs only `alloc`; file
//! formats, the CLI and the annotation service live in the `scenesal` crate.

#![no_std]

extern crate alloc;

pub mod agreement;
pub mod alignment;
pub mod embedding;
mod error;
pub mod kfold;
pub mod prepare;
pub mod rouge;
pub mod saliency;
pub mod scorer;
pub mod script;
pub mod selection;
pub mod stats;
pub mod text;

pub use agreement::{agreement_report, AgreementReport, AnnotationSet, TripleAnnotation};
pub use alignment::{AlignmentMap, AlignmentMethod, ScoreComponent};
pub use embedding::EmbeddingMatrix;
pub use error::{Error, Result};
pub use kfold::{kfold_eval, KFoldMethod, KFoldReport, LabeledMovie};
pub use prepare::{prepare_input, Fallback, PreparedInput, DEFAULT_TOKEN_BUDGET};
pub use rouge::{rouge_l, rouge_n, RougeScore};
pub use saliency::{eval_saliency, majority_select, silver_labels, MacroPRF, SaliencyLabels};
pub use scorer::{predict_scorer, train_scorer, FeatureSpec, LinearScorer, TrainConfig};
pub use script::{parse_script, MovieScript, Scene, SluglineRules, Summary};
pub use selection::{textrank_select, textrank_select_excluding, TextRankConfig};
pub use stats::{corpus_stats, StatsReport};
pub use text::{split_sentences, tokenize, Abbreviations};
