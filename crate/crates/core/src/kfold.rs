//! Movie-level k-fold cross-validation.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::saliency::{eval_saliency, majority_select, MacroPRF, SaliencyLabels};
use crate::scorer::{predict_scorer, train_scorer, FeatureSpec, LinearScorer, TrainConfig};
use crate::selection::{textrank_select, TextRankConfig};

/// Scene embeddings of one movie with its reference labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMovie {
    pub embeddings: EmbeddingMatrix,
    pub gold: SaliencyLabels,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KFoldMethod {
    Majority,
    TextRank(TextRankConfig),
    Scorer { features: FeatureSpec, train: TrainConfig, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KFoldReport {
    pub folds: Vec<MacroPRF>,
    pub mean: MacroPRF,
    /// Sample standard deviation across folds.
    pub stddev: MacroPRF,
}

/// Shuffles movie indices with `seed` and cuts them into `k` contiguous
/// folds; the first `n % k` folds hold one extra movie.
pub fn fold_assignment(n_movies: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidConfig("k-fold needs k >= 2".into()));
    }
    if n_movies < k {
        return Err(Error::TooFewMovies { movies: n_movies, folds: k });
    }
    let mut order: Vec<usize> = (0..n_movies).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n_movies / k, n_movies % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

fn predict(method: &KFoldMethod, movie: &LabeledMovie, model: Option<&LinearScorer>) -> Result<SaliencyLabels> {
    match method {
        KFoldMethod::Majority => Ok(majority_select(movie.gold.movie_id.as_str(), movie.gold.len())),
        KFoldMethod::TextRank(cfg) => textrank_select(&movie.embeddings, cfg),
        KFoldMethod::Scorer { threshold, .. } => {
            let model = model.ok_or_else(|| Error::Invariant("scorer fold has no model".into()))?;
            predict_scorer(model, &movie.embeddings, *threshold)
        }
    }
}

pub fn kfold_eval(corpus: &[LabeledMovie], k: usize, method: &KFoldMethod, seed: u64) -> Result<KFoldReport> {
    let folds = fold_assignment(corpus.len(), k, seed)?;
    let mut results = Vec::with_capacity(k);
    for held_out in &folds {
        let train: Vec<&LabeledMovie> = (0..corpus.len())
            .filter(|i| !held_out.contains(i))
            .map(|i| &corpus[i])
            .collect();
        let model = match method {
            KFoldMethod::Scorer { features, train: cfg, .. } => {
                let pairs: Vec<(&EmbeddingMatrix, &SaliencyLabels)> =
                    train.iter().map(|m| (&m.embeddings, &m.gold)).collect();
                Some(train_scorer(&pairs, *features, cfg)?)
            }
            _ => None,
        };
        let mut scored = Vec::with_capacity(held_out.len());
        for &i in held_out {
            let movie = &corpus[i];
            scored.push((predict(method, movie, model.as_ref())?, movie.gold.clone()));
        }
        results.push(eval_saliency(&scored)?);
    }
    let (mean, stddev) = summarize(&results);
    Ok(KFoldReport { folds: results, mean, stddev })
}

fn summarize(folds: &[MacroPRF]) -> (MacroPRF, MacroPRF) {
    let stat = |get: fn(&MacroPRF) -> f64| {
        let n = folds.len() as f64;
        let mean = folds.iter().map(get).sum::<f64>() / n;
        let var = if folds.len() > 1 {
            folds.iter().map(|m| (get(m) - mean) * (get(m) - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        (mean, libm::sqrt(var))
    };
    let (p, sp) = stat(|m| m.precision);
    let (r, sr) = stat(|m| m.recall);
    let (f, sf) = stat(|m| m.f1);
    (
        MacroPRF { precision: p, recall: r, f1: f },
        MacroPRF { precision: sp, recall: sr, f1: sf },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn folds_partition_all_movies() {
        let folds = fold_assignment(12, 5, 7).unwrap();
        assert_eq!(folds.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 3, 2, 2, 2]);
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..12).collect::<Vec<_>>());
        assert_eq!(folds, fold_assignment(12, 5, 7).unwrap());
    }

    #[test]
    fn too_few_movies() {
        assert_eq!(fold_assignment(3, 5, 0), Err(Error::TooFewMovies { movies: 3, folds: 5 }));
        assert!(fold_assignment(3, 1, 0).is_err());
    }

    fn movie(id: &str) -> LabeledMovie {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![if i % 3 == 0 { 1.0 } else { -1.0 }, 0.5]).collect();
        LabeledMovie {
            embeddings: EmbeddingMatrix::from_rows(id, &rows).unwrap(),
            gold: SaliencyLabels::new(id, (0..8).map(|i| i % 3 == 0).collect()),
        }
    }

    #[test]
    fn duplicated_movies_have_zero_spread() {
        let corpus: Vec<LabeledMovie> = (0..5).map(|_| movie("m")).collect();
        for method in [
            KFoldMethod::Majority,
            KFoldMethod::TextRank(TextRankConfig::default()),
            KFoldMethod::Scorer { features: FeatureSpec::default(), train: TrainConfig::default(), threshold: 0.5 },
        ] {
            let report = kfold_eval(&corpus, 5, &method, 1).unwrap();
            assert_eq!(report.folds.len(), 5);
            assert_eq!(report.stddev, MacroPRF::default(), "{method:?}");
        }
    }

    #[test]
    fn majority_folds_have_half_recall() {
        let corpus: Vec<LabeledMovie> = (0..6).map(|i| movie(&alloc::format!("m{i}"))).collect();
        let report = kfold_eval(&corpus, 3, &KFoldMethod::Majority, 3).unwrap();
        assert!(report.folds.iter().all(|f| f.recall == 0.5));
    }
}
