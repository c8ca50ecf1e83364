//! Pipeline configuration, read from a TOML file and overridden by flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use scenesal_core::{AlignmentMethod, Fallback, ScoreComponent, TextRankConfig, DEFAULT_TOKEN_BUDGET};

use crate::error::{Result, ToolkitError};
use crate::fsio::read_string;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AlignArg {
    RougeL,
    GreedyR1,
    EmbedArgmax,
    EmbedMonotonic,
}

impl From<AlignArg> for AlignmentMethod {
    fn from(a: AlignArg) -> Self {
        match a {
            AlignArg::RougeL => AlignmentMethod::RougeL,
            AlignArg::GreedyR1 => AlignmentMethod::GreedyR1,
            AlignArg::EmbedArgmax => AlignmentMethod::EmbedArgmax,
            AlignArg::EmbedMonotonic => AlignmentMethod::EmbedMonotonic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ComponentArg {
    F1,
    Recall,
}

impl From<ComponentArg> for ScoreComponent {
    fn from(c: ComponentArg) -> Self {
        match c {
            ComponentArg::F1 => ScoreComponent::F1,
            ComponentArg::Recall => ScoreComponent::Recall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SelectArg {
    Textrank,
    Majority,
    Scorer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FallbackArg {
    Error,
    Lead,
    Textrank,
}

impl FallbackArg {
    pub fn to_fallback(self, textrank: TextRankConfig) -> Fallback {
        match self {
            FallbackArg::Error => Fallback::Error,
            FallbackArg::Lead => Fallback::Lead,
            FallbackArg::Textrank => Fallback::TextRank(textrank),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PrepareFrom {
    /// Labels from the selection stage.
    Selected,
    /// Alignment-derived labels.
    Silver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Raw script `.txt` files, one per movie.
    pub scripts: PathBuf,
    /// Raw summary `.txt` files with matching stems.
    pub summaries: PathBuf,
    /// EMB1 files (`{id}.scene.emb`, `{id}.sentence.emb`).
    pub embeddings: Option<PathBuf>,
    /// Human alignment files for evaluation.
    pub gold: Option<PathBuf>,
    pub out: PathBuf,
    pub align_method: AlignArg,
    pub align_component: Option<ComponentArg>,
    pub align_threshold: Option<f64>,
    pub select_method: SelectArg,
    pub model: Option<PathBuf>,
    pub lambda1: f64,
    pub k: f64,
    pub swap_lambdas: bool,
    pub scorer_threshold: f64,
    pub budget: usize,
    pub fallback: FallbackArg,
    pub prepare_from: PrepareFrom,
    pub include_frontmatter: bool,
    pub extra_sluglines: Vec<String>,
    pub abbreviations: Option<PathBuf>,
    pub jobs: usize,
    pub force: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let tr = TextRankConfig::default();
        Self {
            scripts: PathBuf::from("scripts"),
            summaries: PathBuf::from("summaries"),
            embeddings: None,
            gold: None,
            out: PathBuf::from("out"),
            align_method: AlignArg::RougeL,
            align_component: None,
            align_threshold: None,
            select_method: SelectArg::Textrank,
            model: None,
            lambda1: tr.lambda1,
            k: tr.k,
            swap_lambdas: false,
            scorer_threshold: 0.5,
            budget: DEFAULT_TOKEN_BUDGET,
            fallback: FallbackArg::Lead,
            prepare_from: PrepareFrom::Selected,
            include_frontmatter: false,
            extra_sluglines: Vec::new(),
            abbreviations: None,
            jobs: 4,
            force: false,
        }
    }
}

impl PipelineConfig {
    /// Parses a TOML file; relative paths resolve against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = read_string(path)?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| ToolkitError::format(path, e.to_string()))?;
        if let Some(base) = path.parent() {
            cfg.rebase(base);
        }
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.scripts);
        fix(&mut self.summaries);
        fix(&mut self.out);
        for p in [&mut self.embeddings, &mut self.gold, &mut self.model, &mut self.abbreviations].into_iter().flatten() {
            fix(p);
        }
    }

    pub fn textrank(&self) -> Result<TextRankConfig> {
        let mut cfg = TextRankConfig::new(self.lambda1, self.k)?;
        cfg.swap_lambdas = self.swap_lambdas;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.textrank()?;
        if self.jobs == 0 {
            return Err(ToolkitError::Config("jobs must be at least 1".into()));
        }
        let method: AlignmentMethod = self.align_method.into();
        if method.needs_embeddings() && self.embeddings.is_none() {
            return Err(ToolkitError::Config(format!("alignment method {method} needs an embeddings directory")));
        }
        if self.select_method != SelectArg::Majority && self.embeddings.is_none() {
            return Err(ToolkitError::Config("selection by textrank or scorer needs an embeddings directory".into()));
        }
        if self.select_method == SelectArg::Scorer && self.model.is_none() {
            return Err(ToolkitError::Config("selection by scorer needs a model file".into()));
        }
        if self.fallback == FallbackArg::Textrank && self.embeddings.is_none() {
            return Err(ToolkitError::Config("textrank fallback needs an embeddings directory".into()));
        }
        Ok(())
    }
}
