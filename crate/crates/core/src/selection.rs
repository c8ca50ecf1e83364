//! Unsupervised salient-scene selection by directional TextRank centrality.
//!
//! Scenes form a complete graph weighted by cosine similarity. A scene's
//! centrality is `lambda1 * Σ_{j<i} e_ij + lambda2 * Σ_{j>i} e_ij`, so the
//! default `lambda1 = 0.7` favors similarity to preceding scenes. The top
//! `ceil(k * N)` scenes are selected.

use alloc::format;
use alloc::vec::Vec;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::saliency::SaliencyLabels;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextRankConfig {
    /// Weight on edges to preceding scenes.
    pub lambda1: f64,
    /// Weight on edges to following scenes.
    pub lambda2: f64,
    /// Fraction of scenes to select, in `(0, 1]`.
    pub k: f64,
    /// Bind `lambda1` to following scenes instead.
    pub swap_lambdas: bool,
}

impl Default for TextRankConfig {
    fn default() -> Self {
        Self { lambda1: 0.7, lambda2: 0.3, k: 0.15, swap_lambdas: false }
    }
}

impl TextRankConfig {
    /// Config with `lambda2 = 1 - lambda1`.
    pub fn new(lambda1: f64, k: f64) -> Result<Self> {
        let cfg = Self { lambda1, lambda2: 1.0 - lambda1, k, swap_lambdas: false };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !in_unit(self.lambda1) || !in_unit(self.lambda2) {
            return Err(Error::InvalidConfig(format!(
                "lambdas must lie in [0, 1], got {} and {}",
                self.lambda1, self.lambda2
            )));
        }
        if (self.lambda1 + self.lambda2 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "lambda1 + lambda2 must equal 1, got {}",
                self.lambda1 + self.lambda2
            )));
        }
        if !(self.k > 0.0 && self.k <= 1.0) {
            return Err(Error::InvalidConfig(format!("k must lie in (0, 1], got {}", self.k)));
        }
        Ok(())
    }

    /// Number of scenes to select out of `n`: `ceil(k * n)`, at least one.
    pub fn select_count(&self, n: usize) -> usize {
        // Absorb representation error such as 0.15 * 20 = 3.0000000000000004.
        let raw = self.k * n as f64;
        let count = libm::ceil(raw - 1e-9 * raw.max(1.0)) as usize;
        count.clamp(1, n.max(1)).min(n)
    }
}

/// Directional centrality of every scene.
pub fn centralities(emb: &EmbeddingMatrix, cfg: &TextRankConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let sims = emb.cosine_matrix(emb)?;
    let (before, after) = if cfg.swap_lambdas { (cfg.lambda2, cfg.lambda1) } else { (cfg.lambda1, cfg.lambda2) };
    Ok(sims
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let preceding: f64 = row[..i].iter().sum();
            let following: f64 = row[i + 1..].iter().sum();
            before * preceding + after * following
        })
        .collect())
}

/// Indices ordered by descending score; ties keep the lower index first.
pub fn rank_descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Labels the `ceil(k * N)` most central scenes salient. Scores carry the
/// centralities.
pub fn textrank_select(emb: &EmbeddingMatrix, cfg: &TextRankConfig) -> Result<SaliencyLabels> {
    textrank_select_excluding(emb, cfg, &[])
}

/// Like [`textrank_select`], but scenes in `excluded` stay in the graph while
/// never being selected; `k` applies to the remaining scenes.
pub fn textrank_select_excluding(emb: &EmbeddingMatrix, cfg: &TextRankConfig, excluded: &[usize]) -> Result<SaliencyLabels> {
    if emb.rows() == 0 {
        return Err(Error::EmptyInput);
    }
    if let Some(&index) = excluded.iter().find(|&&i| i >= emb.rows()) {
        return Err(Error::IndexOutOfRange { index, len: emb.rows() });
    }
    let scores = centralities(emb, cfg)?;
    let eligible: Vec<usize> = rank_descending(&scores).into_iter().filter(|i| !excluded.contains(i)).collect();
    let mut labels = alloc::vec![false; scores.len()];
    for &i in eligible.iter().take(cfg.select_count(eligible.len())) {
        labels[i] = true;
    }
    SaliencyLabels::new(emb.movie_id(), labels).with_scores(scores)
}
