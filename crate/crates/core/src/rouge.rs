//! ROUGE-N and ROUGE-L over pre-tokenized text. No stemming or stopword
//! removal is applied.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
#[cfg(test)]
use alloc::vec::Vec;


#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    /// Score from an overlap count and the two denominators. An empty side
    /// yields a zero component.
    pub fn from_counts(overlap: usize, candidate_total: usize, reference_total: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        Self::from_pr(ratio(overlap, candidate_total), ratio(overlap, reference_total))
    }

    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self { precision, recall, f1 }
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut counts = BTreeMap::new();
    if n > 0 && tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped n-gram overlap between `candidate` and `reference`.
///
/// # Panics
/// If `n == 0`.
pub fn rouge_n(candidate: &[String], reference: &[String], n: usize) -> RougeScore {
    assert!(n >= 1, "ROUGE-N requires n >= 1");
    let cand = ngram_counts(candidate, n);
    let refs = ngram_counts(reference, n);
    let overlap: usize = cand
        .iter()
        .map(|(gram, &c)| refs.get(gram).map_or(0, |&r| c.min(r)))
        .sum();
    let cand_total = candidate.len().saturating_sub(n - 1);
    let ref_total = reference.len().saturating_sub(n - 1);
    RougeScore::from_counts(overlap, cand_total, ref_total)
}

/// Length of the longest common subsequence, in O(|a|·|b|) time and
/// O(min) memory.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut cur = vec![0usize; short.len() + 1];
    for x in long {
        for (j, y) in short.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

pub fn rouge_l(candidate: &[String], reference: &[String]) -> RougeScore {
    RougeScore::from_counts(lcs_len(candidate, reference), candidate.len(), reference.len())
}
