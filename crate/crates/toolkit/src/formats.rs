//! On-disk schemas: parsed scenes (JSON Lines), summaries, alignment maps,
//! saliency labels, scorer models, triple annotations and the EMB1 embedding
//! format.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use scenesal_core::{
    AlignmentMap, AlignmentMethod, AnnotationSet, EmbeddingMatrix, FeatureSpec, LinearScorer, MovieScript,
    SaliencyLabels, Scene, Summary, TripleAnnotation,
};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolkitError};
use crate::fsio::{atomic_write, read_json, read_string, write_json};

pub const SCENES_SUFFIX: &str = ".scenes.jsonl";
pub const SUMMARY_SUFFIX: &str = ".summary.json";

/// One line of a parsed-script JSONL file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneRecord {
    pub movie_id: String,
    pub index: usize,
    pub heading: String,
    pub body: String,
    pub token_count: usize,
}

pub fn scene_records(script: &MovieScript) -> Vec<SceneRecord> {
    script
        .scenes()
        .iter()
        .map(|s| SceneRecord {
            movie_id: script.movie_id().to_owned(),
            index: s.index,
            heading: s.heading.clone(),
            body: s.body.clone(),
            token_count: s.token_count,
        })
        .collect()
}

pub fn encode_scenes_jsonl(script: &MovieScript) -> String {
    let mut out = String::new();
    for record in scene_records(script) {
        out.push_str(&serde_json::to_string(&record).expect("scene record serializes"));
        out.push('\n');
    }
    out
}

pub fn decode_scenes_jsonl(path: &Path, text: &str) -> Result<MovieScript> {
    let mut movie_id: Option<String> = None;
    let mut scenes = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let record: SceneRecord = serde_json::from_str(line).map_err(|e| ToolkitError::json(path, e))?;
        match &movie_id {
            None => movie_id = Some(record.movie_id.clone()),
            Some(id) if *id != record.movie_id => {
                return Err(ToolkitError::format(path, format!("mixed movie ids {id:?} and {:?}", record.movie_id)));
            }
            Some(_) => {}
        }
        scenes.push(Scene { index: record.index, heading: record.heading, body: record.body, token_count: record.token_count });
    }
    let movie_id = movie_id.ok_or_else(|| ToolkitError::format(path, "no scenes"))?;
    MovieScript::from_scenes(movie_id, scenes).map_err(|e| ToolkitError::at(path, e))
}

pub fn read_scenes(path: &Path) -> Result<MovieScript> {
    decode_scenes_jsonl(path, &read_string(path)?)
}

pub fn write_scenes(path: &Path, script: &MovieScript) -> Result<()> {
    atomic_write(path, encode_scenes_jsonl(script).as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub movie_id: String,
    pub sentences: Vec<String>,
}

impl From<&Summary> for SummaryFile {
    fn from(s: &Summary) -> Self {
        Self { movie_id: s.movie_id().to_owned(), sentences: s.sentences().to_vec() }
    }
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let file: SummaryFile = read_json(path)?;
    Summary::new(file.movie_id, file.sentences).map_err(|e| ToolkitError::at(path, e))
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    write_json(path, &SummaryFile::from(summary))
}

/// Alignment map with sentence indices as (numerically ordered) string keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentFile {
    pub movie_id: String,
    pub method: String,
    pub pairs: BTreeMap<usize, Vec<usize>>,
}

impl From<&AlignmentMap> for AlignmentFile {
    fn from(map: &AlignmentMap) -> Self {
        Self {
            movie_id: map.movie_id().to_owned(),
            method: map.method().as_str().to_owned(),
            pairs: map.pairs().iter().enumerate().map(|(t, s)| (t, s.iter().copied().collect())).collect(),
        }
    }
}

impl AlignmentFile {
    /// Sentences missing from `pairs` are aligned to no scene. With
    /// `n_sentences` the map is padded to that length and longer maps are
    /// rejected.
    pub fn into_map(self, n_sentences: Option<usize>) -> std::result::Result<AlignmentMap, String> {
        let method: AlignmentMethod = self.method.parse().map_err(|e: scenesal_core::Error| e.to_string())?;
        let implied = self.pairs.keys().next_back().map_or(0, |&k| k + 1);
        let len = match n_sentences {
            Some(t) if implied > t => return Err(format!("sentence index {} beyond {t} sentences", implied - 1)),
            Some(t) => t,
            None => implied,
        };
        let mut pairs = vec![BTreeSet::new(); len];
        for (t, scenes) in self.pairs {
            pairs[t] = scenes.into_iter().collect();
        }
        Ok(AlignmentMap::new(self.movie_id, method, pairs))
    }
}

pub fn read_alignment(path: &Path, n_sentences: Option<usize>) -> Result<AlignmentMap> {
    let file: AlignmentFile = read_json(path)?;
    file.into_map(n_sentences).map_err(|m| ToolkitError::format(path, m))
}

pub fn write_alignment(path: &Path, map: &AlignmentMap) -> Result<()> {
    write_json(path, &AlignmentFile::from(map))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelsFile {
    pub movie_id: String,
    pub labels: Vec<u8>,
    #[serde(default)]
    pub scores: Option<Vec<f64>>,
}

impl From<&SaliencyLabels> for LabelsFile {
    fn from(l: &SaliencyLabels) -> Self {
        Self { movie_id: l.movie_id.clone(), labels: l.labels.iter().map(|&y| u8::from(y)).collect(), scores: l.scores.clone() }
    }
}

impl LabelsFile {
    pub fn into_labels(self) -> std::result::Result<SaliencyLabels, String> {
        if let Some(bad) = self.labels.iter().find(|&&y| y > 1) {
            return Err(format!("label {bad} is not 0 or 1"));
        }
        let labels = SaliencyLabels::new(self.movie_id, self.labels.into_iter().map(|y| y == 1).collect());
        match self.scores {
            Some(scores) => labels.with_scores(scores).map_err(|e| e.to_string()),
            None => Ok(labels),
        }
    }
}

pub fn read_labels(path: &Path) -> Result<SaliencyLabels> {
    let file: LabelsFile = read_json(path)?;
    file.into_labels().map_err(|m| ToolkitError::format(path, m))
}

pub fn write_labels(path: &Path, labels: &SaliencyLabels) -> Result<()> {
    write_json(path, &LabelsFile::from(labels))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpecFile {
    pub context: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub positive_class_weight: f64,
    pub feature_spec: FeatureSpecFile,
}

impl From<&LinearScorer> for ModelFile {
    fn from(m: &LinearScorer) -> Self {
        Self {
            weights: m.weights.clone(),
            bias: m.bias,
            positive_class_weight: m.positive_class_weight,
            feature_spec: FeatureSpecFile { context: m.feature_spec.context },
        }
    }
}

pub fn read_model(path: &Path) -> Result<LinearScorer> {
    let file: ModelFile = read_json(path)?;
    let model = LinearScorer {
        weights: file.weights,
        bias: file.bias,
        positive_class_weight: file.positive_class_weight,
        feature_spec: FeatureSpec { context: file.feature_spec.context },
    };
    model.validate().map_err(|e| ToolkitError::at(path, e))?;
    Ok(model)
}

pub fn write_model(path: &Path, model: &LinearScorer) -> Result<()> {
    write_json(path, &ModelFile::from(model))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    pub idx: usize,
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
    #[serde(rename = "C")]
    pub c: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationFile {
    pub movie_id: String,
    pub sentences: Vec<AnnotatedSentence>,
}

impl AnnotationFile {
    pub fn to_set(&self) -> AnnotationSet {
        let mut sentences = self.sentences.clone();
        sentences.sort_by_key(|s| s.idx);
        AnnotationSet::new(
            sentences
                .into_iter()
                .map(|s| TripleAnnotation::new(s.a, s.b, s.c))
                .collect(),
        )
    }
}

pub fn read_annotations(path: &Path) -> Result<AnnotationFile> {
    read_json(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingUnit {
    Scene,
    Sentence,
}

impl EmbeddingUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            EmbeddingUnit::Scene => "scene",
            EmbeddingUnit::Sentence => "sentence",
        }
    }

    /// `{movie_id}.scene.emb` / `{movie_id}.sentence.emb`.
    pub fn suffix(self) -> &'static str {
        match self {
            EmbeddingUnit::Scene => ".scene.emb",
            EmbeddingUnit::Sentence => ".sentence.emb",
        }
    }
}

/// Sidecar JSON stored next to every EMB1 file. Extra keys written by
/// producers are preserved on read but ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingSidecar {
    pub movie_id: String,
    pub unit: EmbeddingUnit,
}

pub fn sidecar_path(emb_path: &Path) -> PathBuf {
    emb_path.with_extension("json")
}

/// EMB1 binary layout: `b"EMB1"`, little-endian `u32` row count, `u32`
/// dimension, then `rows * dim` little-endian `f32` values in row-major order.
pub mod emb1 {
    use scenesal_core::EmbeddingMatrix;

    pub const MAGIC: &[u8; 4] = b"EMB1";
    pub const HEADER_LEN: usize = 12;

    /// Values are narrowed to `f32`.
    pub fn encode(emb: &EmbeddingMatrix) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + emb.as_slice().len() * 4);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(emb.rows() as u32).to_le_bytes());
        out.extend_from_slice(&(emb.dim() as u32).to_le_bytes());
        for &v in emb.as_slice() {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8], movie_id: &str) -> Result<EmbeddingMatrix, String> {
        if bytes.len() < HEADER_LEN {
            return Err(format!("file is {} bytes, shorter than the EMB1 header", bytes.len()));
        }
        if &bytes[..4] != MAGIC {
            return Err(format!("bad magic bytes {:?}, expected \"EMB1\"", &bytes[..4]));
        }
        let rows = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
        let dim = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
        if dim == 0 {
            return Err("dimension is zero".into());
        }
        let expected = rows
            .checked_mul(dim)
            .and_then(|n| n.checked_mul(4))
            .and_then(|n| n.checked_add(HEADER_LEN))
            .ok_or("header counts overflow")?;
        if bytes.len() != expected {
            return Err(format!("expected {expected} bytes for {rows}x{dim}, found {}", bytes.len()));
        }
        let data: Vec<f64> = bytes[HEADER_LEN..]
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes(c.try_into().expect("4 bytes"))))
            .collect();
        EmbeddingMatrix::new(movie_id, dim, data).map_err(|e| e.to_string())
    }
}

/// Loads an EMB1 file and its sidecar, checking the sidecar's unit.
pub fn read_embeddings(path: &Path, unit: EmbeddingUnit) -> Result<EmbeddingMatrix> {
    let sidecar: EmbeddingSidecar = read_json(&sidecar_path(path))?;
    if sidecar.unit != unit {
        return Err(ToolkitError::format(
            path,
            format!("sidecar unit is {}, expected {}", sidecar.unit.as_str(), unit.as_str()),
        ));
    }
    let bytes = std::fs::read(path).map_err(|e| ToolkitError::io(path, e))?;
    emb1::decode(&bytes, &sidecar.movie_id).map_err(|m| ToolkitError::format(path, m))
}

pub fn write_embeddings(path: &Path, emb: &EmbeddingMatrix, unit: EmbeddingUnit) -> Result<()> {
    atomic_write(path, &emb1::encode(emb))?;
    write_json(&sidecar_path(path), &EmbeddingSidecar { movie_id: emb.movie_id().to_owned(), unit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn emb1_header_layout() {
        let emb = EmbeddingMatrix::new("m", 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let bytes = emb1::encode(&emb);
        assert_eq!(&bytes[..4], b"EMB1");
        assert_eq!(&bytes[4..8], &[2, 0, 0, 0]);
        assert_eq!(&bytes[8..12], &[3, 0, 0, 0]);
        assert_eq!(&bytes[12..16], &1.0f32.to_le_bytes());
        assert_eq!(bytes.len(), 12 + 6 * 4);
    }

    #[test]
    fn emb1_rejects_corruption() {
        let emb = EmbeddingMatrix::new("m", 2, vec![1.0, 2.0]).unwrap();
        let mut bytes = emb1::encode(&emb);
        assert!(emb1::decode(&bytes[..bytes.len() - 1], "m").unwrap_err().contains("expected"));
        assert!(emb1::decode(&bytes[..5], "m").is_err());
        bytes[12..16].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(emb1::decode(&bytes, "m").unwrap_err().contains("non-finite"));
        bytes[0] = b'X';
        assert!(emb1::decode(&bytes, "m").unwrap_err().contains("magic"));
        let zero_dim = [b"EMB1".as_slice(), &0u32.to_le_bytes(), &0u32.to_le_bytes()].concat();
        assert!(emb1::decode(&zero_dim, "m").is_err());
    }

    proptest! {
        #[test]
        fn emb1_round_trips_f32_values(values in prop::collection::vec(-1e6f32..1e6, 1..64), dim in 1usize..8) {
            let n = values.len() / dim * dim;
            prop_assume!(n > 0);
            let data: Vec<f64> = values[..n].iter().map(|&v| f64::from(v)).collect();
            let emb = EmbeddingMatrix::new("m", dim, data).unwrap();
            prop_assert_eq!(emb1::decode(&emb1::encode(&emb), "m").unwrap(), emb);
        }
    }

    #[test]
    fn alignment_file_keys_are_numeric_strings() {
        let map = AlignmentMap::new(
            "m",
            AlignmentMethod::Human,
            (0..12).map(|t| BTreeSet::from([t])).collect(),
        );
        let json = serde_json::to_string(&AlignmentFile::from(&map)).unwrap();
        assert!(json.contains("\"pairs\":{\"0\":[0],\"1\":[1],\"2\":[2]"));
        let back: AlignmentFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_map(None).unwrap(), map);
    }

    #[test]
    fn alignment_file_pads_and_rejects() {
        let file = AlignmentFile { movie_id: "m".into(), method: "human".into(), pairs: BTreeMap::from([(1, vec![3])]) };
        let map = file.clone().into_map(Some(3)).unwrap();
        assert_eq!(map.pairs().len(), 3);
        assert!(map.pairs()[0].is_empty());
        assert!(file.clone().into_map(Some(1)).is_err());
        let bad = AlignmentFile { method: "ilp".into(), ..file };
        assert!(bad.into_map(None).is_err());
    }

    #[test]
    fn labels_file_validation() {
        let file = LabelsFile { movie_id: "m".into(), labels: vec![0, 1, 2], scores: None };
        assert!(file.into_labels().is_err());
        let file = LabelsFile { movie_id: "m".into(), labels: vec![0, 1], scores: Some(vec![0.1]) };
        assert!(file.into_labels().is_err());
    }

    #[test]
    fn scenes_jsonl_round_trip() {
        let script = scenesal_core::parse_script("TITLE\nINT. A\nx y\nEXT. B\nz", "m", &Default::default()).unwrap();
        let text = encode_scenes_jsonl(&script);
        assert_eq!(text.lines().count(), 3);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["heading"], "FRONTMATTER");
        assert_eq!(first["token_count"], 2);
        assert_eq!(decode_scenes_jsonl(Path::new("x"), &text).unwrap(), script);
    }
}
