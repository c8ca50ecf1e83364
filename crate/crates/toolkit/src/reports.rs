//! JSON shapes of reports printed by the CLI and written by the pipeline.

use serde::{Deserialize, Serialize};

use scenesal_core::{AgreementReport, KFoldReport, MacroPRF, PreparedInput, RougeScore, StatsReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfJson {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl From<MacroPRF> for PrfJson {
    fn from(m: MacroPRF) -> Self {
        Self { precision: m.precision, recall: m.recall, f1: m.f1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeJson {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
}

impl From<RougeScore> for RougeJson {
    fn from(s: RougeScore) -> Self {
        Self { p: s.precision, r: s.recall, f1: s.f1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsJson {
    pub n_movies: usize,
    pub n_scenes: usize,
    pub n_sentences: usize,
    pub n_alignment_pairs: usize,
    pub n_salient_scenes: usize,
    pub mean_script_tokens: f64,
    pub mean_summary_tokens: f64,
    /// Tokenizer behind the means.
    pub token_unit: String,
}

impl From<StatsReport> for StatsJson {
    fn from(s: StatsReport) -> Self {
        Self {
            n_movies: s.n_movies,
            n_scenes: s.n_scenes,
            n_sentences: s.n_sentences,
            n_alignment_pairs: s.n_alignment_pairs,
            n_salient_scenes: s.n_salient_scenes,
            mean_script_tokens: s.mean_script_tokens,
            mean_summary_tokens: s.mean_summary_tokens,
            token_unit: "whitespace".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementJson {
    pub ema: f64,
    pub pa: f64,
    pub mean_distance: f64,
    pub sentences: usize,
}

impl From<AgreementReport> for AgreementJson {
    fn from(r: AgreementReport) -> Self {
        Self { ema: r.ema, pa: r.pa, mean_distance: r.mean_distance, sentences: r.sentences }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KFoldJson {
    pub folds: Vec<PrfJson>,
    pub mean: PrfJson,
    pub stddev: PrfJson,
}

impl From<&KFoldReport> for KFoldJson {
    fn from(r: &KFoldReport) -> Self {
        Self { folds: r.folds.iter().map(|&f| f.into()).collect(), mean: r.mean.into(), stddev: r.stddev.into() }
    }
}

/// Sidecar describing a prepared input text file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreparedMeta {
    pub movie_id: String,
    pub token_count: usize,
    pub included_scenes: Vec<usize>,
    pub truncated: bool,
}

impl From<&PreparedInput> for PreparedMeta {
    fn from(p: &PreparedInput) -> Self {
        Self {
            movie_id: p.movie_id.clone(),
            token_count: p.token_count,
            included_scenes: p.included_scenes.clone(),
            truncated: p.truncated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalJson {
    pub stats: StatsJson,
    pub selection_vs_silver: PrfJson,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alignment_vs_gold: Option<PrfJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub selection_vs_gold: Option<PrfJson>,
}
