//! Corpus-level counts: movies, scenes, sentences, alignment pairs and
//! salient scenes, plus mean script and summary lengths in whitespace tokens.

use alloc::collections::BTreeMap;
use alloc::format;

use crate::alignment::AlignmentMap;
use crate::error::{Error, Result};
use crate::script::{MovieScript, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StatsReport {
    pub n_movies: usize,
    pub n_scenes: usize,
    pub n_sentences: usize,
    pub n_alignment_pairs: usize,
    pub n_salient_scenes: usize,
    pub mean_script_tokens: f64,
    pub mean_summary_tokens: f64,
}

type MovieInputs<'a> = (Option<&'a MovieScript>, Option<&'a Summary>, Option<&'a AlignmentMap>);

/// Statistics over movies matched by id across the three inputs.
pub fn corpus_stats(scripts: &[MovieScript], summaries: &[Summary], alignments: &[AlignmentMap]) -> Result<StatsReport> {
    let mut by_id: BTreeMap<&str, MovieInputs<'_>> = BTreeMap::new();
    let duplicate = |id: &str| Error::InconsistentCorpus(format!("movie {id:?} appears twice"));
    for s in scripts {
        let e = by_id.entry(s.movie_id()).or_default();
        if e.0.replace(s).is_some() {
            return Err(duplicate(s.movie_id()));
        }
    }
    for s in summaries {
        let e = by_id.entry(s.movie_id()).or_default();
        if e.1.replace(s).is_some() {
            return Err(duplicate(s.movie_id()));
        }
    }
    for a in alignments {
        let e = by_id.entry(a.movie_id()).or_default();
        if e.2.replace(a).is_some() {
            return Err(duplicate(a.movie_id()));
        }
    }

    let mut report = StatsReport::default();
    let mut script_tokens = 0usize;
    let mut summary_tokens = 0usize;
    for (id, entry) in &by_id {
        let (Some(script), Some(summary), Some(alignment)) = *entry else {
            return Err(Error::InconsistentCorpus(format!(
                "movie {id:?} lacks a script, summary or alignment"
            )));
        };
        alignment
            .validate(script.len(), Some(summary.len()))
            .map_err(|e| Error::InconsistentCorpus(format!("movie {id:?}: {e}")))?;
        report.n_movies += 1;
        report.n_scenes += script.len();
        report.n_sentences += summary.len();
        report.n_alignment_pairs += alignment.pair_count();
        report.n_salient_scenes += alignment.salient_scenes().len();
        script_tokens += script.token_count();
        summary_tokens += summary.token_count();
    }
    if report.n_movies > 0 {
        report.mean_script_tokens = script_tokens as f64 / report.n_movies as f64;
        report.mean_summary_tokens = summary_tokens as f64 / report.n_movies as f64;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::AlignmentMethod;
    use alloc::borrow::ToOwned;
    use alloc::collections::BTreeSet;
    use alloc::vec;

    fn movie(id: &str, pairs: Vec<BTreeSet<usize>>) -> (MovieScript, Summary, AlignmentMap) {
        let script = MovieScript::new(id, vec![("INT. A".to_owned(), "one two".to_owned()), ("EXT. B".to_owned(), String::new())]).unwrap();
        let summary = Summary::new(id, vec!["First one.".to_owned(), "Second.".to_owned()]).unwrap();
        (script, summary, AlignmentMap::new(id, AlignmentMethod::Human, pairs))
    }

    use alloc::string::String;
    use alloc::vec::Vec;

    #[test]
    fn counts_pairs_and_salient_scenes() {
        let (s1, m1, a1) = movie("a", vec![BTreeSet::from([0, 1]), BTreeSet::from([1])]);
        let (s2, m2, a2) = movie("b", vec![BTreeSet::new(), BTreeSet::new()]);
        let r = corpus_stats(&[s1, s2], &[m1, m2], &[a1, a2]).unwrap();
        assert_eq!((r.n_movies, r.n_scenes, r.n_sentences, r.n_alignment_pairs, r.n_salient_scenes), (2, 4, 4, 3, 2));
        // script: int a one two ext b = 6 tokens; summary: 3 tokens
        assert_eq!(r.mean_script_tokens, 6.0);
        assert_eq!(r.mean_summary_tokens, 3.0);
    }

    #[test]
    fn empty_alignment_movie() {
        let (s, m, a) = movie("a", vec![BTreeSet::new(), BTreeSet::new()]);
        let r = corpus_stats(&[s], &[m], &[a]).unwrap();
        assert_eq!((r.n_alignment_pairs, r.n_salient_scenes), (0, 0));
    }

    #[test]
    fn inconsistent_inputs() {
        let (s, m, _) = movie("a", vec![]);
        assert!(matches!(corpus_stats(core::slice::from_ref(&s), core::slice::from_ref(&m), &[]), Err(Error::InconsistentCorpus(_))));
        let bad = AlignmentMap::new("a", AlignmentMethod::Human, vec![BTreeSet::from([5]), BTreeSet::new()]);
        assert!(corpus_stats(core::slice::from_ref(&s), core::slice::from_ref(&m), &[bad]).is_err());
        let (_, _, a) = movie("a", vec![BTreeSet::new(), BTreeSet::new()]);
        assert!(corpus_stats(&[s.clone(), s], &[m], &[a]).is_err());
    }
}
