//! Per-movie operations shared by the CLI subcommands, the pipeline and the
//! annotation service.

use scenesal_core::alignment::{align_embed_argmax, align_embed_monotonic, align_greedy_r1, align_rouge_l};
use scenesal_core::{
    predict_scorer, textrank_select_excluding, Abbreviations, AlignmentMap, AlignmentMethod, EmbeddingMatrix,
    LinearScorer, MovieScript, SaliencyLabels, ScoreComponent, Summary, TextRankConfig,
};

use crate::corpus::check_rows;
use crate::error::{Result, ToolkitError};

/// Embeddings consumed by the embedding-based aligners.
pub struct AlignEmbeddings<'a> {
    pub scenes: &'a EmbeddingMatrix,
    pub sentences: &'a EmbeddingMatrix,
}

#[derive(Debug, Clone, Copy)]
pub struct AlignOptions {
    pub method: AlignmentMethod,
    /// ROUGE component to maximize; `None` means F1 for rouge-l and recall
    /// for greedy-r1.
    pub component: Option<ScoreComponent>,
    /// Cosine threshold for the argmax aligner; `None` keeps only the argmax.
    pub threshold: Option<f64>,
}

pub fn align_movie(
    script: &MovieScript,
    summary: &Summary,
    embeddings: Option<AlignEmbeddings<'_>>,
    options: &AlignOptions,
    abbreviations: &Abbreviations,
) -> Result<AlignmentMap> {
    let map = match options.method {
        AlignmentMethod::RougeL => {
            align_rouge_l(script, summary, options.component.unwrap_or(ScoreComponent::F1), abbreviations)?
        }
        AlignmentMethod::GreedyR1 => {
            align_greedy_r1(script, summary, options.component.unwrap_or(ScoreComponent::Recall))?
        }
        AlignmentMethod::EmbedArgmax | AlignmentMethod::EmbedMonotonic => {
            let emb = embeddings.ok_or_else(|| {
                ToolkitError::Config(format!("movie {:?}: {} needs embeddings", script.movie_id(), options.method))
            })?;
            check_rows(emb.scenes, script.len(), "scenes")?;
            check_rows(emb.sentences, summary.len(), "sentences")?;
            if options.method == AlignmentMethod::EmbedArgmax {
                align_embed_argmax(emb.scenes, emb.sentences, options.threshold.unwrap_or(f64::INFINITY))?
            } else {
                align_embed_monotonic(emb.scenes, emb.sentences)?
            }
        }
        AlignmentMethod::Human => {
            return Err(ToolkitError::Config("human alignments are not computed".into()));
        }
    };
    map.validate(script.len(), Some(summary.len()))?;
    Ok(map)
}

#[derive(Debug, Clone)]
pub enum Selector {
    Majority,
    TextRank(TextRankConfig),
    Scorer { model: LinearScorer, threshold: f64 },
}

/// Predicts saliency for one movie. Unless `include_frontmatter` is set, a
/// leading `FRONTMATTER` scene (known only when `script` is given) is never
/// selected.
pub fn select_movie(
    selector: &Selector,
    movie_id: &str,
    n_scenes: usize,
    embeddings: Option<&EmbeddingMatrix>,
    script: Option<&MovieScript>,
    include_frontmatter: bool,
) -> Result<SaliencyLabels> {
    let frontmatter = !include_frontmatter && script.is_some_and(|s| s.scenes().first().is_some_and(|sc| sc.is_frontmatter()));
    let need_emb = || {
        embeddings.ok_or_else(|| ToolkitError::Config(format!("movie {movie_id:?}: scene embeddings are missing")))
    };
    let mut labels = match selector {
        Selector::Majority => scenesal_core::majority_select(movie_id, n_scenes),
        Selector::TextRank(cfg) => {
            let emb = need_emb()?;
            check_rows(emb, n_scenes, "scenes")?;
            let excluded: &[usize] = if frontmatter { &[0] } else { &[] };
            textrank_select_excluding(emb, cfg, excluded)?
        }
        Selector::Scorer { model, threshold } => {
            let emb = need_emb()?;
            check_rows(emb, n_scenes, "scenes")?;
            predict_scorer(model, emb, *threshold)?
        }
    };
    if let (true, Some(script)) = (frontmatter, script) {
        labels.mask_frontmatter(script);
    }
    Ok(labels)
}
