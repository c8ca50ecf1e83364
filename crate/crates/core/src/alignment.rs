//! Sentence-to-scene alignment.
//!
//! Four automatic methods are provided: sentence-level ROUGE-L matching
//! lifted to scenes, greedy ROUGE-1 gain over whole scenes, cosine argmax over
//! precomputed embeddings, and an order-preserving cosine assignment solved by
//! dynamic programming. The last is a stand-in for ILP-based narrative
//! alignment, not a reproduction of it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::rouge::{rouge_l, RougeScore};
use crate::script::{MovieScript, Summary};
use crate::text::{split_sentences, tokenize, Abbreviations};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlignmentMethod {
    RougeL,
    GreedyR1,
    EmbedArgmax,
    EmbedMonotonic,
    Human,
}

impl AlignmentMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AlignmentMethod::RougeL => "rouge_l",
            AlignmentMethod::GreedyR1 => "greedy_r1",
            AlignmentMethod::EmbedArgmax => "embed_argmax",
            AlignmentMethod::EmbedMonotonic => "embed_monotonic",
            AlignmentMethod::Human => "human",
        }
    }

    pub fn needs_embeddings(self) -> bool {
        matches!(self, AlignmentMethod::EmbedArgmax | AlignmentMethod::EmbedMonotonic)
    }
}

impl fmt::Display for AlignmentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlignmentMethod {
    type Err = Error;

    /// Accepts both `rouge_l` and `rouge-l` spellings.
    fn from_str(s: &str) -> Result<Self> {
        let normalized: String = s.trim().chars().map(|c| if c == '-' { '_' } else { c }).collect();
        match normalized.to_ascii_lowercase().as_str() {
            "rouge_l" => Ok(AlignmentMethod::RougeL),
            "greedy_r1" => Ok(AlignmentMethod::GreedyR1),
            "embed_argmax" => Ok(AlignmentMethod::EmbedArgmax),
            "embed_monotonic" => Ok(AlignmentMethod::EmbedMonotonic),
            "human" => Ok(AlignmentMethod::Human),
            _ => Err(Error::InvalidConfig(alloc::format!("unknown alignment method {s:?}"))),
        }
    }
}

/// Many-to-many relation between summary sentences and scenes. Entry `t`
/// holds the scenes aligned to sentence `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentMap {
    movie_id: String,
    method: AlignmentMethod,
    pairs: Vec<BTreeSet<usize>>,
}

impl AlignmentMap {
    pub fn new(movie_id: impl Into<String>, method: AlignmentMethod, pairs: Vec<BTreeSet<usize>>) -> Self {
        Self { movie_id: movie_id.into(), method, pairs }
    }

    pub fn movie_id(&self) -> &str {
        &self.movie_id
    }

    pub fn method(&self) -> AlignmentMethod {
        self.method
    }

    pub fn pairs(&self) -> &[BTreeSet<usize>] {
        &self.pairs
    }

    pub fn n_sentences(&self) -> usize {
        self.pairs.len()
    }

    /// Number of (sentence, scene) pairs.
    pub fn pair_count(&self) -> usize {
        self.pairs.iter().map(BTreeSet::len).sum()
    }

    pub fn salient_scenes(&self) -> BTreeSet<usize> {
        self.pairs.iter().flatten().copied().collect()
    }

    /// Sentences aligned to no scene.
    pub fn unaligned_sentences(&self) -> Vec<usize> {
        self.pairs.iter().enumerate().filter(|(_, s)| s.is_empty()).map(|(t, _)| t).collect()
    }

    /// Checks every scene index against `n_scenes` and, when given, the
    /// sentence count.
    pub fn validate(&self, n_scenes: usize, n_sentences: Option<usize>) -> Result<()> {
        if let Some(t) = n_sentences {
            if self.pairs.len() != t {
                return Err(Error::LengthMismatch { expected: t, found: self.pairs.len() });
            }
        }
        match self.pairs.iter().flatten().find(|&&s| s >= n_scenes) {
            Some(&index) => Err(Error::IndexOutOfRange { index, len: n_scenes }),
            None => Ok(()),
        }
    }
}

/// Which ROUGE component a text-based aligner maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreComponent {
    #[default]
    F1,
    Recall,
}

impl ScoreComponent {
    fn pick(self, score: RougeScore) -> f64 {
        match self {
            ScoreComponent::F1 => score.f1,
            ScoreComponent::Recall => score.recall,
        }
    }
}

fn check_same_movie(a: &str, b: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::MovieMismatch { left: a.into(), right: b.into() })
    }
}

/// Tokenized sentences of a scene body. Paragraphs (blank-line separated)
/// never share a sentence. A scene with an empty body contributes a single
/// empty sentence so every scene remains a candidate.
fn scene_sentences(body: &str, abbreviations: &Abbreviations) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut paragraph = String::new();
    let flush = |paragraph: &mut String, out: &mut Vec<Vec<String>>| {
        if let Ok(sentences) = split_sentences(paragraph, abbreviations) {
            out.extend(sentences.iter().map(|s| tokenize(s)));
        }
        paragraph.clear();
    };
    for line in body.lines() {
        if line.trim().is_empty() {
            flush(&mut paragraph, &mut out);
        } else {
            paragraph.push_str(line.trim());
            paragraph.push(' ');
        }
    }
    flush(&mut paragraph, &mut out);
    if out.is_empty() {
        out.push(Vec::new());
    }
    out
}

/// Aligns each summary sentence to the scene containing its most similar
/// script sentence under ROUGE-L. Ties go to the lowest scene index, then the
/// earliest sentence within the scene.
pub fn align_rouge_l(
    script: &MovieScript,
    summary: &Summary,
    component: ScoreComponent,
    abbreviations: &Abbreviations,
) -> Result<AlignmentMap> {
    check_same_movie(script.movie_id(), summary.movie_id())?;
    let candidates: Vec<Vec<Vec<String>>> = script
        .scenes()
        .iter()
        .map(|scene| scene_sentences(&scene.body, abbreviations))
        .collect();
    let pairs = summary
        .sentences()
        .iter()
        .map(|sentence| {
            let reference = tokenize(sentence);
            let mut best = (f64::NEG_INFINITY, 0usize);
            for (scene, sentences) in candidates.iter().enumerate() {
                for tokens in sentences {
                    let score = component.pick(rouge_l(tokens, &reference));
                    if score > best.0 {
                        best = (score, scene);
                    }
                }
            }
            BTreeSet::from([best.1])
        })
        .collect();
    Ok(AlignmentMap::new(script.movie_id(), AlignmentMethod::RougeL, pairs))
}

/// Greedily grows a scene set per sentence, each step adding the scene whose
/// text most increases ROUGE-1 of the concatenated selection against the
/// sentence. Stops once no scene yields a positive gain.
pub fn align_greedy_r1(
    script: &MovieScript,
    summary: &Summary,
    gain: ScoreComponent,
) -> Result<AlignmentMap> {
    check_same_movie(script.movie_id(), summary.movie_id())?;
    let scene_tokens: Vec<Vec<String>> = script.scenes().iter().map(|s| tokenize(&s.text())).collect();
    let pairs = summary
        .sentences()
        .iter()
        .map(|sentence| greedy_for_sentence(&tokenize(sentence), &scene_tokens, gain))
        .collect();
    Ok(AlignmentMap::new(script.movie_id(), AlignmentMethod::GreedyR1, pairs))
}

fn greedy_for_sentence(reference: &[String], scenes: &[Vec<String>], gain: ScoreComponent) -> BTreeSet<usize> {
    // Unigram vocabulary of the sentence, with clipped counts tracked per word.
    let mut vocab: BTreeMap<&str, usize> = BTreeMap::new();
    for tok in reference {
        let next = vocab.len();
        vocab.entry(tok.as_str()).or_insert(next);
    }
    let mut ref_counts = vec![0usize; vocab.len()];
    for tok in reference {
        ref_counts[vocab[tok.as_str()]] += 1;
    }
    let scene_counts: Vec<Vec<usize>> = scenes
        .iter()
        .map(|tokens| {
            let mut counts = vec![0usize; vocab.len()];
            for tok in tokens {
                if let Some(&w) = vocab.get(tok.as_str()) {
                    counts[w] += 1;
                }
            }
            counts
        })
        .collect();

    let score_of = |counts: &[usize], len: usize| {
        let overlap: usize = counts.iter().zip(&ref_counts).map(|(&c, &r)| c.min(r)).sum();
        gain.pick(RougeScore::from_counts(overlap, len, reference.len()))
    };

    let mut selected = BTreeSet::new();
    let mut current_counts = vec![0usize; vocab.len()];
    let mut current_len = 0usize;
    let mut current_score = 0.0;
    while selected.len() < scenes.len() {
        let mut best: Option<(f64, usize)> = None;
        for (i, counts) in scene_counts.iter().enumerate() {
            if selected.contains(&i) {
                continue;
            }
            let merged: Vec<usize> = current_counts.iter().zip(counts).map(|(a, b)| a + b).collect();
            let score = score_of(&merged, current_len + scenes[i].len());
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, i));
            }
        }
        let Some((score, pick)) = best else { break };
        if score - current_score <= 0.0 {
            break;
        }
        selected.insert(pick);
        for (c, add) in current_counts.iter_mut().zip(&scene_counts[pick]) {
            *c += add;
        }
        current_len += scenes[pick].len();
        current_score = score;
    }
    selected
}

fn check_embedding_pair(scenes: &EmbeddingMatrix, sentences: &EmbeddingMatrix) -> Result<()> {
    check_same_movie(scenes.movie_id(), sentences.movie_id())?;
    if scenes.dim() != sentences.dim() {
        return Err(Error::DimensionMismatch { expected: scenes.dim(), found: sentences.dim() });
    }
    if scenes.rows() == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

fn argmax_lowest(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Aligns each sentence to its highest-cosine scene plus every scene whose
/// cosine reaches `threshold`.
pub fn align_embed_argmax(
    scene_emb: &EmbeddingMatrix,
    sent_emb: &EmbeddingMatrix,
    threshold: f64,
) -> Result<AlignmentMap> {
    check_embedding_pair(scene_emb, sent_emb)?;
    let sims = sent_emb.cosine_matrix(scene_emb)?;
    let pairs = sims
        .iter()
        .map(|row| {
            let mut set: BTreeSet<usize> =
                row.iter().enumerate().filter(|(_, &c)| c >= threshold).map(|(j, _)| j).collect();
            set.insert(argmax_lowest(row));
            set
        })
        .collect();
    Ok(AlignmentMap::new(scene_emb.movie_id(), AlignmentMethod::EmbedArgmax, pairs))
}

/// Assigns one scene per sentence with non-decreasing scene indices,
/// maximizing the summed cosine.
pub fn align_embed_monotonic(scene_emb: &EmbeddingMatrix, sent_emb: &EmbeddingMatrix) -> Result<AlignmentMap> {
    check_embedding_pair(scene_emb, sent_emb)?;
    let sims = sent_emb.cosine_matrix(scene_emb)?;
    let (assignment, _) = monotonic_assignment(&sims);
    if assignment.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Invariant("monotone assignment is not non-decreasing".into()));
    }
    let pairs = assignment.into_iter().map(|a| BTreeSet::from([a])).collect();
    Ok(AlignmentMap::new(scene_emb.movie_id(), AlignmentMethod::EmbedMonotonic, pairs))
}

/// Maximizes `Σ_t sim[t][a_t]` subject to `a_0 <= a_1 <= ...`. Among optimal
/// assignments the one with the smallest indices (from the last sentence
/// backwards) is returned, together with its total, summed in sentence order.
///
/// Every row of `sim` must have the same non-zero length.
pub fn monotonic_assignment(sim: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let t_len = sim.len();
    if t_len == 0 {
        return (Vec::new(), 0.0);
    }
    let n = sim[0].len();
    // best[t][j]: optimal total for sentences 0..=t with sentence t on scene j.
    // from[t][j]: scene of sentence t-1 on that optimum.
    let mut best = vec![vec![0.0f64; n]; t_len];
    let mut from = vec![vec![0usize; n]; t_len];
    best[0].copy_from_slice(&sim[0]);
    for t in 1..t_len {
        let mut prefix_best = f64::NEG_INFINITY;
        let mut prefix_arg = 0;
        for j in 0..n {
            if best[t - 1][j] > prefix_best {
                prefix_best = best[t - 1][j];
                prefix_arg = j;
            }
            best[t][j] = sim[t][j] + prefix_best;
            from[t][j] = prefix_arg;
        }
    }
    let mut assignment = vec![0usize; t_len];
    assignment[t_len - 1] = argmax_lowest(&best[t_len - 1]);
    for t in (1..t_len).rev() {
        assignment[t - 1] = from[t][assignment[t]];
    }
    let total = assignment.iter().enumerate().fold(0.0, |acc, (t, &j)| acc + sim[t][j]);
    (assignment, total)
}
