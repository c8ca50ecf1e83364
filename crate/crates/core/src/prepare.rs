//! Builds summarizer input from the salient scenes of a script, capped at a
//! token budget.

use alloc::string::String;
use alloc::vec::Vec;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::saliency::SaliencyLabels;
use crate::script::{MovieScript, SCENE_SEPARATOR};
use crate::selection::{textrank_select, TextRankConfig};
use crate::text::{count_tokens, token_cut_offset};

pub const DEFAULT_TOKEN_BUDGET: usize = 16_384;

/// What to feed the summarizer when no scene is labeled salient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fallback {
    Error,
    /// Take scenes from the start of the script.
    Lead,
    /// Select scenes by TextRank centrality; needs scene embeddings.
    TextRank(TextRankConfig),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreparedInput {
    pub movie_id: String,
    pub text: String,
    pub token_count: usize,
    pub included_scenes: Vec<usize>,
    /// The last included scene was cut short.
    pub truncated: bool,
}

/// Concatenates salient scenes in script order and cuts the result at a token
/// boundary once `budget` tokens are reached. The final scene is truncated
/// rather than dropped.
pub fn prepare_input(
    script: &MovieScript,
    labels: &SaliencyLabels,
    budget: usize,
    fallback: Fallback,
    embeddings: Option<&EmbeddingMatrix>,
) -> Result<PreparedInput> {
    if labels.len() != script.len() {
        return Err(Error::LengthMismatch { expected: script.len(), found: labels.len() });
    }
    let mut chosen = labels.salient_indices();
    if chosen.is_empty() {
        chosen = match fallback {
            Fallback::Error => return Err(Error::NoSalientScenes),
            Fallback::Lead => (0..script.len()).collect(),
            Fallback::TextRank(cfg) => {
                let emb = embeddings.ok_or_else(|| {
                    Error::InvalidConfig("textrank fallback needs scene embeddings".into())
                })?;
                if emb.rows() != script.len() {
                    return Err(Error::LengthMismatch { expected: script.len(), found: emb.rows() });
                }
                textrank_select(emb, &cfg)?.salient_indices()
            }
        };
    }

    let mut text = String::new();
    let mut used = 0;
    let mut included = Vec::new();
    let mut truncated = false;
    for &i in &chosen {
        let scene = &script.scenes()[i];
        if used >= budget {
            break;
        }
        let piece = scene.text();
        let remaining = budget - used;
        let (piece, tokens) = match token_cut_offset(&piece, remaining) {
            None => (piece.as_str(), scene.token_count),
            Some(cut) => {
                truncated = true;
                (piece[..cut].trim_end(), remaining)
            }
        };
        if !text.is_empty() {
            text.push_str(SCENE_SEPARATOR);
        }
        text.push_str(piece);
        used += tokens;
        included.push(i);
        if truncated {
            break;
        }
    }

    let token_count = count_tokens(&text);
    if token_count > budget || token_count != used {
        return Err(Error::Invariant("prepared input exceeds its token budget".into()));
    }
    Ok(PreparedInput { movie_id: script.movie_id().into(), text, token_count, included_scenes: included, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn script() -> MovieScript {
        // Each scene: heading "INT. PLACE n" (3 tokens) + 7 body tokens = 10.
        let scenes = (0..4)
            .map(|i| (format!("INT. PLACE {i}"), format!("w{i}a w{i}b w{i}c w{i}d w{i}e w{i}f w{i}g")))
            .collect();
        MovieScript::new("m", scenes).unwrap()
    }

    fn labels(bits: &[u8]) -> SaliencyLabels {
        SaliencyLabels::new("m", bits.iter().map(|&b| b == 1).collect())
    }

    #[test]
    fn under_budget_keeps_whole_scenes() {
        let s = script();
        let out = prepare_input(&s, &labels(&[1, 0, 1, 0]), 100, Fallback::Error, None).unwrap();
        assert_eq!(out.included_scenes, vec![0, 2]);
        assert_eq!(out.token_count, 20);
        assert!(!out.truncated);
        assert_eq!(out.text, format!("{}{}{}", s.scenes()[0].text(), SCENE_SEPARATOR, s.scenes()[2].text()));
    }

    #[test]
    fn truncates_last_scene() {
        let out = prepare_input(&script(), &labels(&[1, 0, 1, 0]), 15, Fallback::Error, None).unwrap();
        assert_eq!(out.included_scenes, vec![0, 2]);
        assert_eq!(out.token_count, 15);
        assert!(out.truncated);
        assert!(out.text.ends_with("INT. PLACE 2\nw2a w2b"));
    }

    #[test]
    fn exact_fit_is_not_truncated() {
        let out = prepare_input(&script(), &labels(&[1, 0, 1, 0]), 10, Fallback::Error, None).unwrap();
        assert_eq!(out.included_scenes, vec![0]);
        assert!(!out.truncated);
    }

    #[test]
    fn all_salient_unlimited_is_identity() {
        let s = script();
        let out = prepare_input(&s, &labels(&[1, 1, 1, 1]), usize::MAX, Fallback::Error, None).unwrap();
        assert_eq!(out.text, s.render());
    }

    #[test]
    fn fallbacks() {
        let s = script();
        let none = labels(&[0, 0, 0, 0]);
        assert_eq!(prepare_input(&s, &none, 100, Fallback::Error, None), Err(Error::NoSalientScenes));
        let lead = prepare_input(&s, &none, 25, Fallback::Lead, None).unwrap();
        assert_eq!(lead.included_scenes, vec![0, 1, 2]);
        assert_eq!(lead.token_count, 25);
        let tr = Fallback::TextRank(TextRankConfig::new(0.5, 0.5).unwrap());
        assert!(prepare_input(&s, &none, 100, tr, None).is_err());
        let emb = EmbeddingMatrix::from_rows("m", &vec![vec![1.0, 0.0]; 4]).unwrap();
        let out = prepare_input(&s, &none, 100, tr, Some(&emb)).unwrap();
        assert_eq!(out.included_scenes, vec![0, 1]);
    }

    #[test]
    fn length_mismatch() {
        assert!(prepare_input(&script(), &labels(&[1]), 10, Fallback::Error, None).is_err());
    }
}
