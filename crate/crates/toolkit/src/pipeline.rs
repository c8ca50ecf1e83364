//! End-to-end run: parse, align, label, select, prepare, evaluate.
//!
//! Every stage writes its own files under the output directory and is skipped
//! for a movie when all of its outputs are at least as new as its inputs.
//! Within a stage movies are processed on a bounded worker pool.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use scenesal_core::{
    corpus_stats, eval_saliency, prepare_input, silver_labels, Abbreviations, AlignmentMethod, SluglineRules,
};

use crate::config::{PipelineConfig, PrepareFrom, SelectArg};
use crate::corpus::{embedding_path, parse_script_file, parse_summary_file, ParseOptions};
use crate::error::{Result, ToolkitError};
use crate::formats::{
    read_alignment, read_embeddings, read_labels, read_model, read_scenes, read_summary, sidecar_path,
    write_alignment, write_labels, write_scenes, write_summary, EmbeddingUnit,
};
use crate::fsio::{atomic_write, files_with_suffix, is_fresh, read_string, stem_before, write_json};
use crate::ops::{align_movie, select_movie, AlignEmbeddings, AlignOptions, Selector};
use crate::reports::{EvalJson, PreparedMeta};

pub const STAGES: [&str; 6] = ["parse", "align", "label", "select", "prepare", "evaluate"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageReport {
    pub stage: &'static str,
    pub executed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PipelineReport {
    pub stages: Vec<StageReport>,
}

impl PipelineReport {
    pub fn executed(&self) -> usize {
        self.stages.iter().map(|s| s.executed).sum()
    }

    pub fn stage(&self, name: &str) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.stage == name)
    }
}

/// Output locations under the pipeline's `out` directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub out: PathBuf,
}

impl Layout {
    pub fn scenes(&self, id: &str) -> PathBuf {
        self.out.join("parsed").join(format!("{id}.scenes.jsonl"))
    }
    pub fn summary(&self, id: &str) -> PathBuf {
        self.out.join("parsed").join(format!("{id}.summary.json"))
    }
    pub fn alignment(&self, id: &str) -> PathBuf {
        self.out.join("alignments").join(format!("{id}.json"))
    }
    pub fn labels(&self, id: &str) -> PathBuf {
        self.out.join("labels").join(format!("{id}.json"))
    }
    pub fn selected(&self, id: &str) -> PathBuf {
        self.out.join("selected").join(format!("{id}.json"))
    }
    pub fn prepared_text(&self, id: &str) -> PathBuf {
        self.out.join("prepared").join(format!("{id}.txt"))
    }
    pub fn prepared_meta(&self, id: &str) -> PathBuf {
        self.out.join("prepared").join(format!("{id}.json"))
    }
    pub fn eval(&self) -> PathBuf {
        self.out.join("eval.json")
    }
}

struct Runner<'a> {
    cfg: &'a PipelineConfig,
    layout: Layout,
    ids: Vec<String>,
    pool: rayon::ThreadPool,
    parse: ParseOptions,
}

fn with_sidecar(path: PathBuf) -> [PathBuf; 2] {
    let sidecar = sidecar_path(&path);
    [path, sidecar]
}

impl Runner<'_> {
    fn stage<P, E>(&self, stage: &'static str, plan: P, exec: E) -> Result<StageReport>
    where
        P: Fn(&str) -> (Vec<PathBuf>, Vec<PathBuf>) + Sync,
        E: Fn(&str) -> Result<()> + Sync,
    {
        let outcomes: Vec<Result<bool>> = self.pool.install(|| {
            self.ids
                .par_iter()
                .map(|id| {
                    let (inputs, outputs) = plan(id);
                    if !self.cfg.force && outputs.iter().all(|o| is_fresh(o, &inputs)) {
                        return Ok(false);
                    }
                    exec(id).map(|()| true)
                })
                .collect()
        });
        let mut report = StageReport { stage, executed: 0, skipped: 0 };
        for outcome in outcomes {
            if outcome.map_err(|e| e.in_stage(stage))? {
                report.executed += 1;
            } else {
                report.skipped += 1;
            }
        }
        log::info!("stage {stage}: {} executed, {} skipped", report.executed, report.skipped);
        Ok(report)
    }

    fn raw_script(&self, id: &str) -> PathBuf {
        self.cfg.scripts.join(format!("{id}.txt"))
    }

    fn raw_summary(&self, id: &str) -> PathBuf {
        self.cfg.summaries.join(format!("{id}.txt"))
    }

    fn emb_dir(&self) -> Result<&Path> {
        self.cfg.embeddings.as_deref().ok_or_else(|| ToolkitError::Config("no embeddings directory configured".into()))
    }

    fn parse_stage(&self) -> Result<StageReport> {
        self.stage(
            "parse",
            |id| {
                let mut inputs = vec![self.raw_script(id), self.raw_summary(id)];
                inputs.extend(self.cfg.abbreviations.clone());
                (inputs, vec![self.layout.scenes(id), self.layout.summary(id)])
            },
            |id| {
                let script = parse_script_file(&self.raw_script(id), &self.parse)?;
                let summary = parse_summary_file(&self.raw_summary(id), &self.parse)?;
                write_scenes(&self.layout.scenes(id), &script)?;
                write_summary(&self.layout.summary(id), &summary)
            },
        )
    }

    fn align_stage(&self) -> Result<StageReport> {
        let method: AlignmentMethod = self.cfg.align_method.into();
        let options = AlignOptions {
            method,
            component: self.cfg.align_component.map(Into::into),
            threshold: self.cfg.align_threshold,
        };
        self.stage(
            "align",
            |id| {
                let mut inputs = vec![self.layout.scenes(id), self.layout.summary(id)];
                if let (true, Some(dir)) = (method.needs_embeddings(), self.cfg.embeddings.as_deref()) {
                    inputs.extend(with_sidecar(embedding_path(dir, id, EmbeddingUnit::Scene)));
                    inputs.extend(with_sidecar(embedding_path(dir, id, EmbeddingUnit::Sentence)));
                }
                (inputs, vec![self.layout.alignment(id)])
            },
            |id| {
                let script = read_scenes(&self.layout.scenes(id))?;
                let summary = read_summary(&self.layout.summary(id))?;
                let loaded = if method.needs_embeddings() {
                    let dir = self.emb_dir()?;
                    Some((
                        read_embeddings(&embedding_path(dir, id, EmbeddingUnit::Scene), EmbeddingUnit::Scene)?,
                        read_embeddings(&embedding_path(dir, id, EmbeddingUnit::Sentence), EmbeddingUnit::Sentence)?,
                    ))
                } else {
                    None
                };
                let embeddings = loaded.as_ref().map(|(s, t)| AlignEmbeddings { scenes: s, sentences: t });
                let map = align_movie(&script, &summary, embeddings, &options, &self.parse.abbreviations)?;
                write_alignment(&self.layout.alignment(id), &map)
            },
        )
    }

    fn label_stage(&self) -> Result<StageReport> {
        self.stage(
            "label",
            |id| (vec![self.layout.alignment(id), self.layout.scenes(id)], vec![self.layout.labels(id)]),
            |id| {
                let script = read_scenes(&self.layout.scenes(id))?;
                let map = read_alignment(&self.layout.alignment(id), None)?;
                let labels = silver_labels(&map, script.len()).map_err(|e| ToolkitError::at(self.layout.alignment(id), e))?;
                write_labels(&self.layout.labels(id), &labels)
            },
        )
    }

    fn selector(&self) -> Result<Selector> {
        Ok(match self.cfg.select_method {
            SelectArg::Majority => Selector::Majority,
            SelectArg::Textrank => Selector::TextRank(self.cfg.textrank()?),
            SelectArg::Scorer => {
                let path = self.cfg.model.as_deref().ok_or_else(|| ToolkitError::Config("no model file configured".into()))?;
                Selector::Scorer { model: read_model(path)?, threshold: self.cfg.scorer_threshold }
            }
        })
    }

    fn select_stage(&self) -> Result<StageReport> {
        let selector = self.selector().map_err(|e| e.in_stage("select"))?;
        let uses_embeddings = !matches!(selector, Selector::Majority);
        self.stage(
            "select",
            |id| {
                let mut inputs = vec![self.layout.scenes(id)];
                if let (true, Some(dir)) = (uses_embeddings, self.cfg.embeddings.as_deref()) {
                    inputs.extend(with_sidecar(embedding_path(dir, id, EmbeddingUnit::Scene)));
                }
                inputs.extend(self.cfg.model.clone().filter(|_| self.cfg.select_method == SelectArg::Scorer));
                (inputs, vec![self.layout.selected(id)])
            },
            |id| {
                let script = read_scenes(&self.layout.scenes(id))?;
                let emb = if uses_embeddings {
                    Some(read_embeddings(&embedding_path(self.emb_dir()?, id, EmbeddingUnit::Scene), EmbeddingUnit::Scene)?)
                } else {
                    None
                };
                let labels = select_movie(&selector, id, script.len(), emb.as_ref(), Some(&script), self.cfg.include_frontmatter)?;
                write_labels(&self.layout.selected(id), &labels)
            },
        )
    }

    fn prepare_source(&self, id: &str) -> PathBuf {
        match self.cfg.prepare_from {
            PrepareFrom::Selected => self.layout.selected(id),
            PrepareFrom::Silver => self.layout.labels(id),
        }
    }

    fn prepare_stage(&self) -> Result<StageReport> {
        let fallback = self.cfg.fallback.to_fallback(self.cfg.textrank()?);
        let needs_emb = matches!(fallback, scenesal_core::Fallback::TextRank(_));
        self.stage(
            "prepare",
            |id| {
                let mut inputs = vec![self.layout.scenes(id), self.prepare_source(id)];
                if let (true, Some(dir)) = (needs_emb, self.cfg.embeddings.as_deref()) {
                    inputs.extend(with_sidecar(embedding_path(dir, id, EmbeddingUnit::Scene)));
                }
                (inputs, vec![self.layout.prepared_text(id), self.layout.prepared_meta(id)])
            },
            |id| {
                let script = read_scenes(&self.layout.scenes(id))?;
                let labels = read_labels(&self.prepare_source(id))?;
                let emb = if needs_emb {
                    Some(read_embeddings(&embedding_path(self.emb_dir()?, id, EmbeddingUnit::Scene), EmbeddingUnit::Scene)?)
                } else {
                    None
                };
                let prepared = prepare_input(&script, &labels, self.cfg.budget, fallback, emb.as_ref())
                    .map_err(|e| ToolkitError::at(self.prepare_source(id), e))?;
                atomic_write(&self.layout.prepared_text(id), prepared.text.as_bytes())?;
                write_json(&self.layout.prepared_meta(id), &PreparedMeta::from(&prepared))
            },
        )
    }

    fn gold_files(&self) -> Result<Vec<PathBuf>> {
        match &self.cfg.gold {
            Some(dir) => files_with_suffix(dir, ".json"),
            None => Ok(Vec::new()),
        }
    }

    fn evaluate_stage(&self) -> Result<StageReport> {
        let run = || -> Result<StageReport> {
            let gold_files = self.gold_files()?;
            let mut inputs = gold_files.clone();
            for id in &self.ids {
                inputs.extend([
                    self.layout.scenes(id),
                    self.layout.summary(id),
                    self.layout.alignment(id),
                    self.layout.labels(id),
                    self.layout.selected(id),
                ]);
            }
            let output = self.layout.eval();
            if !self.cfg.force && is_fresh(&output, &inputs) {
                return Ok(StageReport { stage: "evaluate", executed: 0, skipped: 1 });
            }

            let mut scripts = Vec::new();
            let mut summaries = Vec::new();
            let mut alignments = Vec::new();
            let mut vs_silver = Vec::new();
            let mut silver_by_id = BTreeMap::new();
            let mut selected_by_id = BTreeMap::new();
            for id in &self.ids {
                let script = read_scenes(&self.layout.scenes(id))?;
                let summary = read_summary(&self.layout.summary(id))?;
                alignments.push(read_alignment(&self.layout.alignment(id), Some(summary.len()))?);
                let silver = read_labels(&self.layout.labels(id))?;
                let selected = read_labels(&self.layout.selected(id))?;
                vs_silver.push((selected.clone(), silver.clone()));
                silver_by_id.insert(id.clone(), (silver, script.len()));
                selected_by_id.insert(id.clone(), selected);
                scripts.push(script);
                summaries.push(summary);
            }
            let stats = corpus_stats(&scripts, &summaries, &alignments)?;

            let (mut alignment_vs_gold, mut selection_vs_gold) = (None, None);
            if !gold_files.is_empty() {
                let mut align_pairs = Vec::new();
                let mut select_pairs = Vec::new();
                for path in &gold_files {
                    let raw = read_alignment(path, None)?;
                    let Some((silver, n)) = silver_by_id.get(raw.movie_id()) else {
                        log::warn!("{}: gold movie {:?} is not in the corpus", path.display(), raw.movie_id());
                        continue;
                    };
                    let gold = silver_labels(&raw, *n).map_err(|e| ToolkitError::at(path, e))?;
                    align_pairs.push((silver.clone(), gold.clone()));
                    select_pairs.push((selected_by_id[raw.movie_id()].clone(), gold));
                }
                if !align_pairs.is_empty() {
                    alignment_vs_gold = Some(eval_saliency(&align_pairs)?.into());
                    selection_vs_gold = Some(eval_saliency(&select_pairs)?.into());
                }
            }
            let report = EvalJson {
                stats: stats.into(),
                selection_vs_silver: eval_saliency(&vs_silver)?.into(),
                alignment_vs_gold,
                selection_vs_gold,
            };
            write_json(&output, &report)?;
            Ok(StageReport { stage: "evaluate", executed: 1, skipped: 0 })
        };
        run().map_err(|e| e.in_stage("evaluate"))
    }
}

/// Movie ids with a raw script; each must have a matching raw summary.
fn discover(cfg: &PipelineConfig) -> Result<Vec<String>> {
    let ids: Vec<String> = files_with_suffix(&cfg.scripts, ".txt")?.iter().map(|p| stem_before(p, ".txt")).collect();
    if ids.is_empty() {
        return Err(ToolkitError::Config(format!("no scripts found in {}", cfg.scripts.display())));
    }
    for id in &ids {
        let summary = cfg.summaries.join(format!("{id}.txt"));
        if !summary.is_file() {
            return Err(ToolkitError::Config(format!("movie {id:?} has no summary at {}", summary.display())));
        }
    }
    Ok(ids)
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineReport> {
    cfg.validate()?;
    let abbreviations = match &cfg.abbreviations {
        Some(path) => Abbreviations::from_lines(&read_string(path)?),
        None => Abbreviations::default(),
    };
    let runner = Runner {
        cfg,
        layout: Layout { out: cfg.out.clone() },
        ids: discover(cfg)?,
        pool: rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| ToolkitError::Config(format!("worker pool: {e}")))?,
        parse: ParseOptions {
            sluglines: SluglineRules::with_extra(cfg.extra_sluglines.iter().map(String::as_str)),
            abbreviations,
        },
    };
    let stages = vec![
        runner.parse_stage()?,
        runner.align_stage()?,
        runner.label_stage()?,
        runner.select_stage()?,
        runner.prepare_stage()?,
        runner.evaluate_stage()?,
    ];
    Ok(PipelineReport { stages })
}
