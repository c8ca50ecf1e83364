//! Binary scene-saliency labels and their macro-averaged evaluation.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::alignment::AlignmentMap;
use crate::error::{Error, Result};
use crate::script::{MovieScript, Scene};

/// One binary label per scene, with optional per-scene scores.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyLabels {
    pub movie_id: String,
    pub labels: Vec<bool>,
    pub scores: Option<Vec<f64>>,
}

impl SaliencyLabels {
    pub fn new(movie_id: impl Into<String>, labels: Vec<bool>) -> Self {
        Self { movie_id: movie_id.into(), labels, scores: None }
    }

    pub fn with_scores(mut self, scores: Vec<f64>) -> Result<Self> {
        if scores.len() != self.labels.len() {
            return Err(Error::LengthMismatch { expected: self.labels.len(), found: scores.len() });
        }
        self.scores = Some(scores);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn salient_count(&self) -> usize {
        self.labels.iter().filter(|&&y| y).count()
    }

    /// Indices of salient scenes, ascending.
    pub fn salient_indices(&self) -> Vec<usize> {
        self.labels.iter().enumerate().filter(|(_, &y)| y).map(|(i, _)| i).collect()
    }

    /// Clears the label of a leading `FRONTMATTER` pseudo-scene.
    pub fn mask_frontmatter(&mut self, script: &MovieScript) {
        if script.scenes().first().is_some_and(Scene::is_frontmatter) {
            if let Some(first) = self.labels.first_mut() {
                *first = false;
            }
        }
    }

    /// Complemented labels; scores are dropped.
    pub fn complement(&self) -> Self {
        Self::new(self.movie_id.clone(), self.labels.iter().map(|y| !y).collect())
    }
}

/// A scene is salient iff some summary sentence is aligned to it.
pub fn silver_labels(alignment: &AlignmentMap, n_scenes: usize) -> Result<SaliencyLabels> {
    let mut labels = vec![false; n_scenes];
    for scenes in alignment.pairs() {
        for &scene in scenes {
            *labels
                .get_mut(scene)
                .ok_or(Error::IndexOutOfRange { index: scene, len: n_scenes })? = true;
        }
    }
    Ok(SaliencyLabels::new(alignment.movie_id(), labels))
}

/// All-zero prediction: every scene belongs to the majority, non-salient class.
pub fn majority_select(movie_id: &str, n_scenes: usize) -> SaliencyLabels {
    SaliencyLabels::new(movie_id, vec![false; n_scenes])
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MacroPRF {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn class_prf(pred: &[bool], gold: &[bool], class: bool) -> (f64, f64, f64) {
    let tp = pred.iter().zip(gold).filter(|&(&p, &g)| p == class && g == class).count();
    let predicted = pred.iter().filter(|&&p| p == class).count();
    let actual = gold.iter().filter(|&&g| g == class).count();
    let p = ratio(tp, predicted);
    let r = ratio(tp, actual);
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

/// Per-movie macro P/R/F1 over the salient and non-salient classes.
pub fn movie_prf(pred: &SaliencyLabels, gold: &SaliencyLabels) -> Result<MacroPRF> {
    if pred.len() != gold.len() {
        return Err(Error::LengthMismatch { expected: gold.len(), found: pred.len() });
    }
    let (p1, r1, f1) = class_prf(&pred.labels, &gold.labels, true);
    let (p0, r0, f0) = class_prf(&pred.labels, &gold.labels, false);
    Ok(MacroPRF { precision: (p1 + p0) / 2.0, recall: (r1 + r0) / 2.0, f1: (f1 + f0) / 2.0 })
}

/// Macro P/R/F1 averaged first over the two classes, then over movies.
/// Undefined ratios (0/0) count as zero.
pub fn eval_saliency(movies: &[(SaliencyLabels, SaliencyLabels)]) -> Result<MacroPRF> {
    if movies.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut total = MacroPRF::default();
    for (pred, gold) in movies {
        if pred.movie_id != gold.movie_id {
            return Err(Error::MovieMismatch {
                left: pred.movie_id.clone(),
                right: gold.movie_id.clone(),
            });
        }
        let m = movie_prf(pred, gold)?;
        total.precision += m.precision;
        total.recall += m.recall;
        total.f1 += m.f1;
    }
    let n = movies.len() as f64;
    Ok(MacroPRF { precision: total.precision / n, recall: total.recall / n, f1: total.f1 / n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::{AlignmentMap, AlignmentMethod};
    use alloc::collections::BTreeSet;

    fn labels(bits: &[u8]) -> SaliencyLabels {
        SaliencyLabels::new("m", bits.iter().map(|&b| b == 1).collect())
    }

    #[test]
    fn silver_from_pairs() {
        let pairs = vec![BTreeSet::from([2]), BTreeSet::from([2, 4])];
        let map = AlignmentMap::new("m", AlignmentMethod::Human, pairs);
        assert_eq!(silver_labels(&map, 6).unwrap(), labels(&[0, 0, 1, 0, 1, 0]));
        let empty = AlignmentMap::new("m", AlignmentMethod::Human, vec![]);
        assert_eq!(silver_labels(&empty, 3).unwrap(), labels(&[0, 0, 0]));
        assert_eq!(
            silver_labels(&map, 4),
            Err(Error::IndexOutOfRange { index: 4, len: 4 })
        );
    }

    #[test]
    fn perfect_prediction() {
        let gold = labels(&[1, 0, 1, 0]);
        let m = eval_saliency(&[(gold.clone(), gold)]).unwrap();
        assert_eq!(m, MacroPRF { precision: 1.0, recall: 1.0, f1: 1.0 });
    }

    #[test]
    fn hand_computed_example() {
        // salient: p=1/1, r=1/2, f=2/3; non-salient: p=2/3, r=2/2, f=4/5
        let m = eval_saliency(&[(labels(&[1, 0, 0, 0]), labels(&[1, 0, 1, 0]))]).unwrap();
        assert!((m.precision - 5.0 / 6.0).abs() < 1e-12);
        assert!((m.recall - 0.75).abs() < 1e-12);
        assert!((m.f1 - (2.0 / 3.0 + 0.8) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn majority_recall_is_half() {
        let gold = labels(&[0, 1, 0, 0, 1, 0, 0]);
        let m = eval_saliency(&[(majority_select("m", 7), gold)]).unwrap();
        assert_eq!(m.recall, 0.5);
    }

    #[test]
    fn averages_over_movies() {
        let a = (labels(&[1, 0]), labels(&[1, 0]));
        let b = (labels(&[0, 0]), labels(&[1, 0]));
        let m = eval_saliency(&[a, b]).unwrap();
        assert!((m.recall - 0.75).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert_eq!(
            eval_saliency(&[(labels(&[1]), labels(&[1, 0]))]),
            Err(Error::LengthMismatch { expected: 2, found: 1 })
        );
        assert_eq!(eval_saliency(&[]), Err(Error::EmptyInput));
    }
}
