//! Linear salient-scene scorer trained with class-weighted binary
//! cross-entropy by full-batch gradient descent.
//!
//! Each scene is represented by its embedding, the mean embedding of a
//! `±context` window around it, and its relative position `i / N`.

use alloc::vec;
use alloc::vec::Vec;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::saliency::SaliencyLabels;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureSpec {
    pub context: usize,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self { context: 2 }
    }
}

impl FeatureSpec {
    pub fn dim(&self, embedding_dim: usize) -> usize {
        2 * embedding_dim + 1
    }

    pub fn features(&self, emb: &EmbeddingMatrix) -> Vec<Vec<f64>> {
        let n = emb.rows();
        let d = emb.dim();
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(self.context);
                let hi = (i + self.context).min(n - 1);
                let mut row = Vec::with_capacity(self.dim(d));
                row.extend_from_slice(emb.row(i));
                let width = (hi - lo + 1) as f64;
                for c in 0..d {
                    row.push((lo..=hi).map(|j| emb.row(j)[c]).sum::<f64>() / width);
                }
                row.push(i as f64 / n as f64);
                row
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Multiplier on the salient-class loss term. `None` uses
    /// `#negative / #positive` of the training data.
    pub positive_class_weight: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 0.1, epochs: 500, positive_class_weight: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearScorer {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub positive_class_weight: f64,
    pub feature_spec: FeatureSpec,
}

impl LinearScorer {
    pub fn zeros(dim: usize, positive_class_weight: f64, feature_spec: FeatureSpec) -> Self {
        Self { weights: vec![0.0; dim], bias: 0.0, positive_class_weight, feature_spec }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.weights.iter().all(|w| w.is_finite()) && self.bias.is_finite();
        if !finite {
            return Err(Error::Invariant("scorer parameters are not finite".into()));
        }
        if !(self.positive_class_weight.is_finite() && self.positive_class_weight > 0.0) {
            return Err(Error::InvalidConfig("positive class weight must be positive".into()));
        }
        Ok(())
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + libm::log1p(libm::exp(-x.abs()))
}

fn check_rows(model: &LinearScorer, features: &[Vec<f64>]) -> Result<()> {
    match features.iter().find(|row| row.len() != model.weights.len()) {
        Some(row) => Err(Error::DimensionMismatch { expected: model.weights.len(), found: row.len() }),
        None => Ok(()),
    }
}

/// `-mean[w_pos * y * ln σ(z) + (1 - y) * ln(1 - σ(z))]`.
pub fn weighted_bce(model: &LinearScorer, features: &[Vec<f64>], labels: &[bool]) -> Result<f64> {
    check_rows(model, features)?;
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch { expected: features.len(), found: labels.len() });
    }
    if features.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total: f64 = features
        .iter()
        .zip(labels)
        .map(|(x, &y)| {
            let z = model.logit(x);
            if y {
                model.positive_class_weight * softplus(-z)
            } else {
                softplus(z)
            }
        })
        .sum();
    Ok(total / features.len() as f64)
}

/// Analytic gradient of [`weighted_bce`] with respect to weights and bias.
pub fn weighted_bce_grad(model: &LinearScorer, features: &[Vec<f64>], labels: &[bool]) -> Result<(Vec<f64>, f64)> {
    check_rows(model, features)?;
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch { expected: features.len(), found: labels.len() });
    }
    if features.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = features.len() as f64;
    let mut grad_w = vec![0.0; model.weights.len()];
    let mut grad_b = 0.0;
    for (x, &y) in features.iter().zip(labels) {
        let p = sigmoid(model.logit(x));
        let dz = (if y { -model.positive_class_weight * (1.0 - p) } else { p }) / n;
        for (g, v) in grad_w.iter_mut().zip(x) {
            *g += dz * v;
        }
        grad_b += dz;
    }
    Ok((grad_w, grad_b))
}

/// Trained scorer plus the loss before every epoch and after the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub scorer: LinearScorer,
    pub losses: Vec<f64>,
}

/// Gradient descent from zero parameters on explicit feature rows.
pub fn fit_rows(features: &[Vec<f64>], labels: &[bool], spec: FeatureSpec, cfg: &TrainConfig) -> Result<Fit> {
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch { expected: features.len(), found: labels.len() });
    }
    let positives = labels.iter().filter(|&&y| y).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateLabels);
    }
    if !(cfg.learning_rate.is_finite() && cfg.learning_rate > 0.0) {
        return Err(Error::InvalidConfig("learning rate must be positive".into()));
    }
    let weight = cfg.positive_class_weight.unwrap_or(negatives as f64 / positives as f64);
    let dim = features[0].len();
    let mut scorer = LinearScorer::zeros(dim, weight, spec);
    scorer.validate()?;
    let mut losses = Vec::with_capacity(cfg.epochs + 1);
    for _ in 0..cfg.epochs {
        losses.push(weighted_bce(&scorer, features, labels)?);
        let (gw, gb) = weighted_bce_grad(&scorer, features, labels)?;
        for (w, g) in scorer.weights.iter_mut().zip(&gw) {
            *w -= cfg.learning_rate * g;
        }
        scorer.bias -= cfg.learning_rate * gb;
    }
    losses.push(weighted_bce(&scorer, features, labels)?);
    scorer.validate()?;
    Ok(Fit { scorer, losses })
}

/// Builds features for every movie and trains one scorer over the pooled
/// scenes.
pub fn train_scorer(
    movies: &[(&EmbeddingMatrix, &SaliencyLabels)],
    spec: FeatureSpec,
    cfg: &TrainConfig,
) -> Result<LinearScorer> {
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut dim = None;
    for (emb, gold) in movies {
        if emb.rows() != gold.len() {
            return Err(Error::LengthMismatch { expected: emb.rows(), found: gold.len() });
        }
        match dim {
            None => dim = Some(emb.dim()),
            Some(d) if d != emb.dim() => return Err(Error::DimensionMismatch { expected: d, found: emb.dim() }),
            Some(_) => {}
        }
        features.extend(spec.features(emb));
        labels.extend_from_slice(&gold.labels);
    }
    if features.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(fit_rows(&features, &labels, spec, cfg)?.scorer)
}

/// Probability and label (`p >= threshold`) per feature row.
pub fn predict_rows(model: &LinearScorer, features: &[Vec<f64>], threshold: f64) -> Result<(Vec<bool>, Vec<f64>)> {
    check_rows(model, features)?;
    let probs: Vec<f64> = features.iter().map(|x| sigmoid(model.logit(x))).collect();
    let labels = probs.iter().map(|&p| p >= threshold).collect();
    Ok((labels, probs))
}

pub fn predict_scorer(model: &LinearScorer, emb: &EmbeddingMatrix, threshold: f64) -> Result<SaliencyLabels> {
    let expected = model.weights.len();
    let found = model.feature_spec.dim(emb.dim());
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    let (labels, probs) = predict_rows(model, &model.feature_spec.features(emb), threshold)?;
    SaliencyLabels::new(emb.movie_id(), labels).with_scores(probs)
}
