//! Directory loaders. Scripts and summaries may be given either parsed
//! (`*.scenes.jsonl`, `*.summary.json`) or raw (`*.txt`, movie id = file
//! stem).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use scenesal_core::{parse_script, Abbreviations, AlignmentMap, EmbeddingMatrix, MovieScript, SaliencyLabels, SluglineRules, Summary};

use crate::error::{Result, ToolkitError};
use crate::formats::{
    AlignmentFile,
    read_embeddings, read_labels, read_scenes, read_summary, EmbeddingUnit, SCENES_SUFFIX,
    SUMMARY_SUFFIX,
};
use crate::fsio::{files_with_suffix, read_json, read_string, stem_before};

/// Rules shared by raw-text loaders.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub sluglines: SluglineRules,
    pub abbreviations: Abbreviations,
}

pub fn parse_script_file(path: &Path, options: &ParseOptions) -> Result<MovieScript> {
    let id = stem_before(path, ".txt");
    parse_script(&read_string(path)?, &id, &options.sluglines).map_err(|e| ToolkitError::at(path, e))
}

pub fn parse_summary_file(path: &Path, options: &ParseOptions) -> Result<Summary> {
    let id = stem_before(path, ".txt");
    Summary::parse(&id, &read_string(path)?, &options.abbreviations).map_err(|e| ToolkitError::at(path, e))
}

fn index_by_id<T>(items: Vec<T>, id: impl Fn(&T) -> &str, dir: &Path) -> Result<BTreeMap<String, T>> {
    let mut out = BTreeMap::new();
    for item in items {
        let key = id(&item).to_owned();
        if out.insert(key.clone(), item).is_some() {
            return Err(ToolkitError::format(dir, format!("movie {key:?} appears twice")));
        }
    }
    Ok(out)
}

pub fn load_scripts(dir: &Path, options: &ParseOptions) -> Result<BTreeMap<String, MovieScript>> {
    let parsed = files_with_suffix(dir, SCENES_SUFFIX)?;
    let scripts = if parsed.is_empty() {
        files_with_suffix(dir, ".txt")?.iter().map(|p| parse_script_file(p, options)).collect::<Result<Vec<_>>>()?
    } else {
        parsed.iter().map(|p| read_scenes(p)).collect::<Result<Vec<_>>>()?
    };
    index_by_id(scripts, |s| s.movie_id(), dir)
}

pub fn load_summaries(dir: &Path, options: &ParseOptions) -> Result<BTreeMap<String, Summary>> {
    let parsed = files_with_suffix(dir, SUMMARY_SUFFIX)?;
    let summaries = if parsed.is_empty() {
        files_with_suffix(dir, ".txt")?.iter().map(|p| parse_summary_file(p, options)).collect::<Result<Vec<_>>>()?
    } else {
        parsed.iter().map(|p| read_summary(p)).collect::<Result<Vec<_>>>()?
    };
    index_by_id(summaries, |s| s.movie_id(), dir)
}

/// Alignment maps, padded to each movie's sentence count when known.
pub fn load_alignments(dir: &Path, sentence_counts: &BTreeMap<String, usize>) -> Result<BTreeMap<String, AlignmentMap>> {
    let mut out = BTreeMap::new();
    for path in files_with_suffix(dir, ".json")? {
        let file: AlignmentFile = read_json(&path)?;
        let t = sentence_counts.get(&file.movie_id).copied();
        let map = file.into_map(t).map_err(|m| ToolkitError::format(&path, m))?;
        if out.insert(map.movie_id().to_owned(), map).is_some() {
            return Err(ToolkitError::format(&path, "movie appears twice"));
        }
    }
    Ok(out)
}

pub fn load_labels(dir: &Path) -> Result<BTreeMap<String, SaliencyLabels>> {
    let labels = files_with_suffix(dir, ".json")?.iter().map(|p| read_labels(p)).collect::<Result<Vec<_>>>()?;
    index_by_id(labels, |l| l.movie_id.as_str(), dir)
}

pub fn embedding_path(dir: &Path, movie_id: &str, unit: EmbeddingUnit) -> PathBuf {
    dir.join(format!("{movie_id}{}", unit.suffix()))
}

pub fn load_embeddings(dir: &Path, unit: EmbeddingUnit) -> Result<BTreeMap<String, EmbeddingMatrix>> {
    let embs = files_with_suffix(dir, unit.suffix())?
        .iter()
        .map(|p| read_embeddings(p, unit))
        .collect::<Result<Vec<_>>>()?;
    index_by_id(embs, |e| e.movie_id(), dir)
}

/// Fails unless the embedding has one row per expected unit.
pub fn check_rows(emb: &EmbeddingMatrix, expected: usize, what: &str) -> Result<()> {
    if emb.rows() == expected {
        Ok(())
    } else {
        Err(ToolkitError::Config(format!(
            "movie {:?}: {} embedding rows for {expected} {what}",
            emb.movie_id(),
            emb.rows()
        )))
    }
}
