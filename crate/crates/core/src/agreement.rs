//! Agreement between three annotators' sentence-to-scene alignments: exact
//! match (mean Jaccard), partial match (non-empty triple intersection) and
//! mean annotation distance.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// The three annotators' scene sets for one summary sentence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TripleAnnotation {
    pub a: BTreeSet<usize>,
    pub b: BTreeSet<usize>,
    pub c: BTreeSet<usize>,
}

impl TripleAnnotation {
    pub fn new(
        a: impl IntoIterator<Item = usize>,
        b: impl IntoIterator<Item = usize>,
        c: impl IntoIterator<Item = usize>,
    ) -> Self {
        Self { a: a.into_iter().collect(), b: b.into_iter().collect(), c: c.into_iter().collect() }
    }

    fn intersection_len(&self) -> usize {
        self.a.iter().filter(|i| self.b.contains(i) && self.c.contains(i)).count()
    }

    fn union_len(&self) -> usize {
        self.a.union(&self.b).copied().collect::<BTreeSet<_>>().union(&self.c).count()
    }

    fn sets(&self) -> [&BTreeSet<usize>; 3] {
        [&self.a, &self.b, &self.c]
    }
}

/// Triple annotations for every sentence of one or more summaries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnotationSet {
    sentences: Vec<TripleAnnotation>,
}

impl AnnotationSet {
    pub fn new(sentences: Vec<TripleAnnotation>) -> Self {
        Self { sentences }
    }

    /// Appends the sentences of another movie.
    pub fn extend(&mut self, other: AnnotationSet) {
        self.sentences.extend(other.sentences);
    }

    pub fn sentences(&self) -> &[TripleAnnotation] {
        &self.sentences
    }

    /// Total sentence count across all included summaries.
    pub fn total_sentences(&self) -> usize {
        self.sentences.len()
    }

    pub fn validate_scene_range(&self, n_scenes: usize) -> Result<()> {
        for s in &self.sentences {
            for set in s.sets() {
                if let Some(&index) = set.iter().find(|&&i| i >= n_scenes) {
                    return Err(Error::IndexOutOfRange { index, len: n_scenes });
                }
            }
        }
        Ok(())
    }

    fn require_sentences(&self) -> Result<f64> {
        if self.sentences.is_empty() {
            Err(Error::EmptyInput)
        } else {
            Ok(self.sentences.len() as f64)
        }
    }
}

/// Mean per-sentence Jaccard similarity of the three scene sets.
pub fn ema(ann: &AnnotationSet) -> Result<f64> {
    let total = ann.require_sentences()?;
    let mut sum = 0.0;
    for (i, s) in ann.sentences.iter().enumerate() {
        let union = s.union_len();
        if union == 0 {
            return Err(Error::EmptyUnion { sentence: i });
        }
        sum += s.intersection_len() as f64 / union as f64;
    }
    Ok(sum / total)
}

/// Fraction of sentences where all three annotators share at least one scene.
pub fn pa(ann: &AnnotationSet) -> Result<f64> {
    let total = ann.require_sentences()?;
    let agreeing = ann.sentences.iter().filter(|s| s.intersection_len() > 0).count();
    Ok(agreeing as f64 / total)
}

/// Smallest index gap between any scene of `x` and any scene of `y`.
pub fn annotation_distance(x: &BTreeSet<usize>, y: &BTreeSet<usize>) -> Result<usize> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    // Both sets are sorted: merge-walk to the closest pair.
    let (xs, ys): (Vec<usize>, Vec<usize>) = (x.iter().copied().collect(), y.iter().copied().collect());
    let (mut i, mut j) = (0, 0);
    let mut best = usize::MAX;
    while i < xs.len() && j < ys.len() {
        best = best.min(xs[i].abs_diff(ys[j]));
        if xs[i] < ys[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    Ok(best)
}

/// Mean over sentences of the largest of the three pairwise annotation
/// distances.
pub fn mean_annotation_distance(ann: &AnnotationSet) -> Result<f64> {
    let total = ann.require_sentences()?;
    let mut sum = 0usize;
    for s in &ann.sentences {
        let ab = annotation_distance(&s.a, &s.b)?;
        let ac = annotation_distance(&s.a, &s.c)?;
        let bc = annotation_distance(&s.b, &s.c)?;
        sum += ab.max(ac).max(bc);
    }
    Ok(sum as f64 / total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgreementReport {
    pub ema: f64,
    pub pa: f64,
    pub mean_distance: f64,
    pub sentences: usize,
}

/// All three measures. Sentences where any annotator selected no scene are
/// rejected.
pub fn agreement_report(ann: &AnnotationSet) -> Result<AgreementReport> {
    if ann.sentences.iter().any(|s| s.sets().iter().any(|set| set.is_empty())) {
        return Err(Error::EmptySet);
    }
    let report = AgreementReport {
        ema: ema(ann)?,
        pa: pa(ann)?,
        mean_distance: mean_annotation_distance(ann)?,
        sentences: ann.total_sentences(),
    };
    if report.ema > report.pa {
        return Err(Error::Invariant("exact match agreement exceeds partial agreement".into()));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn one(a: &[usize], b: &[usize], c: &[usize]) -> AnnotationSet {
        AnnotationSet::new(vec![TripleAnnotation::new(a.iter().copied(), b.iter().copied(), c.iter().copied())])
    }

    #[test]
    fn identical_sets() {
        let ann = AnnotationSet::new(vec![
            TripleAnnotation::new([3, 4], [3, 4], [3, 4]),
            TripleAnnotation::new([1], [1], [1]),
        ]);
        assert_eq!(ema(&ann).unwrap(), 1.0);
        assert_eq!(pa(&ann).unwrap(), 1.0);
        assert_eq!(mean_annotation_distance(&ann).unwrap(), 0.0);
    }

    #[test]
    fn hand_example() {
        // intersection {3}, union {3,4}
        let ann = one(&[3, 4], &[3, 4], &[3]);
        assert_eq!(ema(&ann).unwrap(), 0.5);
        assert_eq!(pa(&ann).unwrap(), 1.0);
        assert_eq!(mean_annotation_distance(&ann).unwrap(), 0.0);
    }

    #[test]
    fn disjoint_sets() {
        let ann = one(&[1], &[2], &[4]);
        assert_eq!(ema(&ann).unwrap(), 0.0);
        assert_eq!(pa(&ann).unwrap(), 0.0);
        // d(A,B)=1, d(A,C)=3, d(B,C)=2
        assert_eq!(mean_annotation_distance(&ann).unwrap(), 3.0);
    }

    #[test]
    fn distance_examples() {
        let set = |v: &[usize]| v.iter().copied().collect::<BTreeSet<_>>();
        assert_eq!(annotation_distance(&set(&[2]), &set(&[5, 9])).unwrap(), 3);
        assert_eq!(annotation_distance(&set(&[7]), &set(&[7])).unwrap(), 0);
        assert_eq!(annotation_distance(&set(&[1, 8]), &set(&[4, 8])).unwrap(), 0);
        assert_eq!(annotation_distance(&set(&[]), &set(&[1])), Err(Error::EmptySet));
    }

    #[test]
    fn empty_union_is_an_error() {
        let ann = AnnotationSet::new(vec![
            TripleAnnotation::new([1], [1], [1]),
            TripleAnnotation::default(),
        ]);
        assert_eq!(ema(&ann), Err(Error::EmptyUnion { sentence: 1 }));
        assert_eq!(pa(&ann).unwrap(), 0.5);
    }

    #[test]
    fn report_rejects_partial_empty_sentences() {
        assert_eq!(agreement_report(&one(&[1], &[1], &[])), Err(Error::EmptySet));
        assert_eq!(agreement_report(&AnnotationSet::default()), Err(Error::EmptyInput));
        let r = agreement_report(&one(&[3, 4], &[3, 4], &[3])).unwrap();
        assert_eq!((r.ema, r.pa, r.mean_distance, r.sentences), (0.5, 1.0, 0.0, 1));
    }

    #[test]
    fn range_validation() {
        assert!(one(&[1], &[2], &[5]).validate_scene_range(5).is_err());
        assert!(one(&[1], &[2], &[4]).validate_scene_range(5).is_ok());
    }
}
