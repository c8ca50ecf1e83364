//! Command-line interface of the `toolkit` binary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use scenesal_core::{
    agreement_report, corpus_stats, eval_saliency, kfold_eval, prepare_input, rouge_l, rouge_n, silver_labels, tokenize,
    train_scorer, Abbreviations, AlignmentMethod, AnnotationSet, EmbeddingMatrix, FeatureSpec, KFoldMethod,
    LabeledMovie, SaliencyLabels, SluglineRules, TextRankConfig, TrainConfig, DEFAULT_TOKEN_BUDGET,
};
use serde::Serialize;

use crate::config::{AlignArg, ComponentArg, FallbackArg, PipelineConfig, PrepareFrom, SelectArg};
use crate::corpus::{check_rows, embedding_path, load_alignments, load_embeddings, load_labels, load_scripts, load_summaries, ParseOptions};
use crate::error::{Result, ToolkitError};
use crate::formats::{
    read_annotations, read_embeddings, read_model, write_alignment, write_labels, write_model, write_scenes,
    write_summary, AlignmentFile, EmbeddingUnit, LabelsFile,
};
use crate::fsio::{atomic_write, files_with_suffix, read_json, read_string, to_json_bytes, write_json};
use crate::ops::{align_movie, select_movie, AlignEmbeddings, AlignOptions, Selector};
use crate::pipeline::run_pipeline;
use crate::reports::{AgreementJson, KFoldJson, PrfJson, PreparedMeta, RougeJson, StatsJson};
use crate::service::{self, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "toolkit", version, about = "Scene saliency toolkit for long scripts")]
pub struct Cli {
    /// Log filter, e.g. `warn`, `info`, `scenesal=debug`.
    #[arg(long, global = true, default_value = "warn")]
    pub log: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split raw scripts into scenes and summaries into sentences.
    Parse(ParseArgs),
    /// Align summary sentences to scenes.
    Align(AlignCmd),
    /// Turn alignments into scene saliency labels.
    Label(LabelArgs),
    /// Predict salient scenes without alignments.
    Select(SelectCmd),
    /// Fit the linear scene scorer.
    TrainScorer(TrainArgs),
    /// Movie-level k-fold cross-validation of a selection method.
    Kfold(KFoldArgs),
    /// Build token-budgeted inputs from the salient scenes.
    Prepare(PrepareArgs),
    /// ROUGE between a candidate and a reference text.
    Rouge(RougeArgs),
    /// Agreement between three annotators.
    Agreement(AgreementArgs),
    /// Corpus statistics.
    Stats(StatsArgs),
    /// Macro precision, recall and F1 of predicted labels against gold.
    EvalSaliency(EvalArgs),
    /// Run the annotation HTTP service.
    Serve(ServeArgs),
    /// Run every pipeline stage from a config file.
    Run(RunArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct TextArgs {
    /// Additional slugline prefix (repeatable).
    #[arg(long = "extra-slugline")]
    pub extra_sluglines: Vec<String>,
    /// Abbreviation list, one per line.
    #[arg(long)]
    pub abbreviations: Option<PathBuf>,
}

impl TextArgs {
    fn options(&self) -> Result<ParseOptions> {
        let abbreviations = match &self.abbreviations {
            Some(path) => Abbreviations::from_lines(&read_string(path)?),
            None => Abbreviations::default(),
        };
        Ok(ParseOptions {
            sluglines: SluglineRules::with_extra(self.extra_sluglines.iter().map(String::as_str)),
            abbreviations,
        })
    }
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    #[arg(long)]
    pub scripts: PathBuf,
    #[arg(long)]
    pub summaries: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub text: TextArgs,
}

#[derive(Debug, Args)]
pub struct AlignCmd {
    #[arg(long, value_enum, default_value = "rouge-l")]
    pub method: AlignArg,
    #[arg(long)]
    pub scripts: PathBuf,
    #[arg(long)]
    pub summaries: PathBuf,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Cosine threshold for embed-argmax.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// ROUGE component maximized by rouge-l (default f1) and greedy-r1
    /// (default recall).
    #[arg(long, value_enum)]
    pub component: Option<ComponentArg>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub jobs: usize,
    #[command(flatten)]
    pub text: TextArgs,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[arg(long)]
    pub alignments: PathBuf,
    #[arg(long)]
    pub scripts: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub text: TextArgs,
}

#[derive(Debug, Args, Clone)]
pub struct TextRankArgs {
    /// Weight of the preceding-scene term.
    #[arg(long, default_value_t = 0.7)]
    pub lambda1: f64,
    /// Fraction of scenes selected.
    #[arg(long = "k", default_value_t = 0.15)]
    pub fraction: f64,
    /// Bind lambda1 to the following-scene term instead.
    #[arg(long)]
    pub swap_lambdas: bool,
}

impl TextRankArgs {
    fn config(&self) -> Result<TextRankConfig> {
        let mut cfg = TextRankConfig::new(self.lambda1, self.fraction)?;
        cfg.swap_lambdas = self.swap_lambdas;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SelectCmd {
    #[arg(long, value_enum, default_value = "textrank")]
    pub method: SelectArg,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Parsed or raw scripts; enables frontmatter exclusion and majority
    /// selection without embeddings.
    #[arg(long)]
    pub scripts: Option<PathBuf>,
    #[command(flatten)]
    pub textrank: TextRankArgs,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long)]
    pub include_frontmatter: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub text: TextArgs,
}

#[derive(Debug, Args, Clone)]
pub struct ScorerArgs {
    /// Neighbouring scenes on each side averaged into the context feature.
    #[arg(long, default_value_t = 2)]
    pub context: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 500)]
    pub epochs: usize,
    /// Salient-class loss weight; defaults to #negative / #positive.
    #[arg(long)]
    pub positive_weight: Option<f64>,
}

impl ScorerArgs {
    fn spec(&self) -> FeatureSpec {
        FeatureSpec { context: self.context }
    }

    fn train(&self) -> TrainConfig {
        TrainConfig { learning_rate: self.learning_rate, epochs: self.epochs, positive_class_weight: self.positive_weight }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub scorer: ScorerArgs,
}

#[derive(Debug, Args)]
pub struct KFoldArgs {
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "scorer")]
    pub method: SelectArg,
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Reference label files.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.7)]
    pub lambda1: f64,
    /// Fraction of scenes selected by textrank.
    #[arg(long, default_value_t = 0.15)]
    pub fraction: f64,
    #[arg(long)]
    pub swap_lambdas: bool,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    #[arg(long)]
    pub scripts: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Whitespace tokens.
    #[arg(long, default_value_t = DEFAULT_TOKEN_BUDGET)]
    pub budget: usize,
    #[arg(long, value_enum, default_value = "lead")]
    pub fallback: FallbackArg,
    /// Scene embeddings for the textrank fallback.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[command(flatten)]
    pub textrank: TextRankArgs,
    #[command(flatten)]
    pub text: TextArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    R1,
    R2,
    Rl,
}

#[derive(Debug, Args)]
pub struct RougeArgs {
    #[arg(long)]
    pub candidate: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "r1,r2,rl")]
    pub metrics: Vec<Metric>,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    #[arg(long)]
    pub annotations: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub scripts: PathBuf,
    #[arg(long)]
    pub summaries: PathBuf,
    #[arg(long)]
    pub alignments: PathBuf,
    #[command(flatten)]
    pub text: TextArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted label files.
    #[arg(long)]
    pub pred: PathBuf,
    /// Gold label files or gold alignment files.
    #[arg(long)]
    pub gold: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum, default_value = "embed-monotonic")]
    pub default_method: AlignArg,
    #[command(flatten)]
    pub text: TextArgs,
}

/// Every key of the config file; flags win over the file.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub scripts: Option<PathBuf>,
    #[arg(long)]
    pub summaries: Option<PathBuf>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub align_method: Option<AlignArg>,
    #[arg(long, value_enum)]
    pub align_component: Option<ComponentArg>,
    #[arg(long)]
    pub align_threshold: Option<f64>,
    #[arg(long, value_enum)]
    pub select_method: Option<SelectArg>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub swap_lambdas: bool,
    #[arg(long)]
    pub scorer_threshold: Option<f64>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, value_enum)]
    pub fallback: Option<FallbackArg>,
    #[arg(long, value_enum)]
    pub prepare_from: Option<PrepareFrom>,
    #[arg(long)]
    pub include_frontmatter: bool,
    #[arg(long = "extra-slugline")]
    pub extra_sluglines: Vec<String>,
    #[arg(long)]
    pub abbreviations: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub force: bool,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone().into();
                }
            )*};
        }
        take!(scripts, summaries, out, align_method, select_method, lambda1, k, scorer_threshold, budget, fallback, prepare_from, jobs);
        take!(embeddings, gold, model, align_component, align_threshold, abbreviations);
        cfg.swap_lambdas |= self.swap_lambdas;
        cfg.include_frontmatter |= self.include_frontmatter;
        cfg.force |= self.force;
        cfg.extra_sluglines.extend(self.extra_sluglines.iter().cloned());
        Ok(cfg)
    }
}

fn print_json<T: Serialize>(value: &T) {
    print!("{}", String::from_utf8(to_json_bytes(value)).expect("JSON is UTF-8"));
}

fn worker_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(ToolkitError::Config("jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| ToolkitError::Config(format!("worker pool: {e}")))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Parse(a) => parse_cmd(a),
        Command::Align(a) => align_cmd(a),
        Command::Label(a) => label_cmd(a),
        Command::Select(a) => select_cmd(a),
        Command::TrainScorer(a) => train_cmd(a),
        Command::Kfold(a) => kfold_cmd(a),
        Command::Prepare(a) => prepare_cmd(a),
        Command::Rouge(a) => rouge_cmd(a),
        Command::Agreement(a) => agreement_cmd(a),
        Command::Stats(a) => stats_cmd(a),
        Command::EvalSaliency(a) => eval_cmd(a),
        Command::Serve(a) => serve_cmd(a),
        Command::Run(a) => {
            let report = run_pipeline(&a.resolve()?)?;
            for stage in &report.stages {
                println!("{:<9} executed {:>4}  skipped {:>4}", stage.stage, stage.executed, stage.skipped);
            }
            Ok(())
        }
    }
}

fn parse_cmd(a: ParseArgs) -> Result<()> {
    let options = a.text.options()?;
    let scripts = load_scripts(&a.scripts, &options)?;
    for (id, script) in &scripts {
        write_scenes(&a.out.join(format!("{id}.scenes.jsonl")), script)?;
    }
    if let Some(dir) = &a.summaries {
        for (id, summary) in load_summaries(dir, &options)? {
            write_summary(&a.out.join(format!("{id}.summary.json")), &summary)?;
        }
    }
    log::info!("parsed {} scripts", scripts.len());
    Ok(())
}

fn align_cmd(a: AlignCmd) -> Result<()> {
    let parse = a.text.options()?;
    let scripts = load_scripts(&a.scripts, &parse)?;
    let summaries = load_summaries(&a.summaries, &parse)?;
    let options = AlignOptions { method: a.method.into(), component: a.component.map(Into::into), threshold: a.threshold };
    let emb_dir = match (options.method.needs_embeddings(), &a.embeddings) {
        (true, None) => return Err(ToolkitError::Config(format!("{} needs --embeddings", options.method))),
        (true, Some(dir)) => Some(dir.as_path()),
        (false, _) => None,
    };
    let pool = worker_pool(a.jobs)?;
    pool.install(|| {
        scripts.par_iter().try_for_each(|(id, script)| -> Result<()> {
            let summary = summaries
                .get(id)
                .ok_or_else(|| ToolkitError::Config(format!("movie {id:?} has no summary")))?;
            let loaded = match emb_dir {
                Some(dir) => Some((
                    read_embeddings(&embedding_path(dir, id, EmbeddingUnit::Scene), EmbeddingUnit::Scene)?,
                    read_embeddings(&embedding_path(dir, id, EmbeddingUnit::Sentence), EmbeddingUnit::Sentence)?,
                )),
                None => None,
            };
            let embeddings = loaded.as_ref().map(|(s, t)| AlignEmbeddings { scenes: s, sentences: t });
            let map = align_movie(script, summary, embeddings, &options, &parse.abbreviations)?;
            write_alignment(&a.out.join(format!("{id}.json")), &map)
        })
    })
}

fn label_cmd(a: LabelArgs) -> Result<()> {
    let scripts = load_scripts(&a.scripts, &a.text.options()?)?;
    for (id, map) in load_alignments(&a.alignments, &BTreeMap::new())? {
        let script = scripts
            .get(&id)
            .ok_or_else(|| ToolkitError::Config(format!("alignment for unknown movie {id:?}")))?;
        write_labels(&a.out.join(format!("{id}.json")), &silver_labels(&map, script.len())?)?;
    }
    Ok(())
}

fn select_cmd(a: SelectCmd) -> Result<()> {
    let selector = match a.method {
        SelectArg::Majority => Selector::Majority,
        SelectArg::Textrank => Selector::TextRank(a.textrank.config()?),
        SelectArg::Scorer => {
            let path = a.model.as_deref().ok_or_else(|| ToolkitError::Config("scorer selection needs --model".into()))?;
            Selector::Scorer { model: read_model(path)?, threshold: a.threshold }
        }
    };
    let embeddings = match &a.embeddings {
        Some(dir) => load_embeddings(dir, EmbeddingUnit::Scene)?,
        None if a.method == SelectArg::Majority => BTreeMap::new(),
        None => return Err(ToolkitError::Config("this method needs --embeddings".into())),
    };
    let scripts = match &a.scripts {
        Some(dir) => load_scripts(dir, &a.text.options()?)?,
        None => BTreeMap::new(),
    };
    let ids: Vec<&String> = if a.method == SelectArg::Majority && embeddings.is_empty() {
        scripts.keys().collect()
    } else {
        embeddings.keys().collect()
    };
    if ids.is_empty() {
        return Err(ToolkitError::Config("no movies to select from".into()));
    }
    for id in ids {
        let emb = embeddings.get(id);
        let script = scripts.get(id);
        let n = match (script, emb) {
            (Some(s), _) => s.len(),
            (None, Some(e)) => e.rows(),
            (None, None) => unreachable!("id comes from one of the maps"),
        };
        let labels = select_movie(&selector, id, n, emb, script, a.include_frontmatter)?;
        write_labels(&a.out.join(format!("{id}.json")), &labels)?;
    }
    Ok(())
}

/// Pairs embeddings with labels by movie id; every label file needs embeddings.
fn labeled_movies(embeddings: &Path, labels: &Path) -> Result<Vec<LabeledMovie>> {
    let mut embs = load_embeddings(embeddings, EmbeddingUnit::Scene)?;
    let mut out = Vec::new();
    for (id, gold) in load_labels(labels)? {
        let emb = embs
            .remove(&id)
            .ok_or_else(|| ToolkitError::Config(format!("movie {id:?} has labels but no scene embeddings")))?;
        check_rows(&emb, gold.len(), "labelled scenes")?;
        out.push(LabeledMovie { embeddings: emb, gold });
    }
    Ok(out)
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    let movies = labeled_movies(&a.embeddings, &a.labels)?;
    let pairs: Vec<(&EmbeddingMatrix, &SaliencyLabels)> = movies.iter().map(|m| (&m.embeddings, &m.gold)).collect();
    let model = train_scorer(&pairs, a.scorer.spec(), &a.scorer.train())?;
    write_model(&a.out, &model)
}

fn kfold_cmd(a: KFoldArgs) -> Result<()> {
    let movies = labeled_movies(&a.embeddings, &a.labels)?;
    let method = match a.method {
        SelectArg::Majority => KFoldMethod::Majority,
        SelectArg::Textrank => {
            let mut cfg = TextRankConfig::new(a.lambda1, a.fraction)?;
            cfg.swap_lambdas = a.swap_lambdas;
            KFoldMethod::TextRank(cfg)
        }
        SelectArg::Scorer => {
            KFoldMethod::Scorer { features: a.scorer.spec(), train: a.scorer.train(), threshold: a.threshold }
        }
    };
    let report = kfold_eval(&movies, a.k, &method, a.seed)?;
    print_json(&KFoldJson::from(&report));
    Ok(())
}

fn prepare_cmd(a: PrepareArgs) -> Result<()> {
    let scripts = load_scripts(&a.scripts, &a.text.options()?)?;
    let fallback = a.fallback.to_fallback(a.textrank.config()?);
    for (id, labels) in load_labels(&a.labels)? {
        let script = scripts
            .get(&id)
            .ok_or_else(|| ToolkitError::Config(format!("labels for unknown movie {id:?}")))?;
        let emb = match (&a.embeddings, a.fallback) {
            (Some(dir), FallbackArg::Textrank) => {
                Some(read_embeddings(&embedding_path(dir, &id, EmbeddingUnit::Scene), EmbeddingUnit::Scene)?)
            }
            _ => None,
        };
        let prepared = prepare_input(script, &labels, a.budget, fallback, emb.as_ref())?;
        atomic_write(&a.out.join(format!("{id}.txt")), prepared.text.as_bytes())?;
        write_json(&a.out.join(format!("{id}.json")), &PreparedMeta::from(&prepared))?;
    }
    Ok(())
}

fn rouge_cmd(a: RougeArgs) -> Result<()> {
    let candidate = tokenize(&read_string(&a.candidate)?);
    let reference = tokenize(&read_string(&a.reference)?);
    let mut out = BTreeMap::new();
    for metric in a.metrics {
        let (key, score) = match metric {
            Metric::R1 => ("r1", rouge_n(&candidate, &reference, 1)),
            Metric::R2 => ("r2", rouge_n(&candidate, &reference, 2)),
            Metric::Rl => ("rl", rouge_l(&candidate, &reference)),
        };
        out.insert(key, RougeJson::from(score));
    }
    print_json(&out);
    Ok(())
}

fn agreement_cmd(a: AgreementArgs) -> Result<()> {
    let mut set = AnnotationSet::default();
    let files = files_with_suffix(&a.annotations, ".json")?;
    if files.is_empty() {
        return Err(ToolkitError::Config(format!("no annotation files in {}", a.annotations.display())));
    }
    for path in files {
        set.extend(read_annotations(&path)?.to_set());
    }
    print_json(&AgreementJson::from(agreement_report(&set)?));
    Ok(())
}

fn stats_cmd(a: StatsArgs) -> Result<()> {
    let options = a.text.options()?;
    let scripts = load_scripts(&a.scripts, &options)?;
    let summaries = load_summaries(&a.summaries, &options)?;
    let counts = summaries.iter().map(|(id, s)| (id.clone(), s.len())).collect();
    let alignments = load_alignments(&a.alignments, &counts)?;
    let report = corpus_stats(
        &scripts.into_values().collect::<Vec<_>>(),
        &summaries.into_values().collect::<Vec<_>>(),
        &alignments.into_values().collect::<Vec<_>>(),
    )?;
    print_json(&StatsJson::from(report));
    Ok(())
}

/// Gold files may be label files or alignment files; alignments are turned
/// into labels using the predicted movie's scene count.
fn read_gold(path: &Path, n_scenes: usize) -> Result<SaliencyLabels> {
    let value: serde_json::Value = read_json(path)?;
    if value.get("pairs").is_some() {
        let file: AlignmentFile = serde_json::from_value(value).map_err(|e| ToolkitError::json(path, e))?;
        let map = file.into_map(None).map_err(|m| ToolkitError::format(path, m))?;
        silver_labels(&map, n_scenes).map_err(|e| ToolkitError::at(path, e))
    } else {
        let file: LabelsFile = serde_json::from_value(value).map_err(|e| ToolkitError::json(path, e))?;
        file.into_labels().map_err(|m| ToolkitError::format(path, m))
    }
}

fn eval_cmd(a: EvalArgs) -> Result<()> {
    let preds = load_labels(&a.pred)?;
    let mut gold_by_id = BTreeMap::new();
    for path in files_with_suffix(&a.gold, ".json")? {
        let value: serde_json::Value = read_json(&path)?;
        let id = value
            .get("movie_id")
            .and_then(|v| v.as_str())
            .ok_or_else(|| ToolkitError::format(&path, "missing movie_id"))?
            .to_owned();
        gold_by_id.insert(id, path);
    }
    let mut pairs = Vec::new();
    for (id, path) in &gold_by_id {
        let pred = preds
            .get(id)
            .ok_or_else(|| ToolkitError::Config(format!("no prediction for gold movie {id:?}")))?;
        pairs.push((pred.clone(), read_gold(path, pred.len())?));
    }
    print_json(&PrfJson::from(eval_saliency(&pairs)?));
    Ok(())
}

fn serve_cmd(a: ServeArgs) -> Result<()> {
    let cfg = ServiceConfig {
        corpus: a.corpus,
        default_method: AlignmentMethod::from(a.default_method),
        parse: a.text.options()?,
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| ToolkitError::Config(format!("runtime: {e}")))?;
    runtime.block_on(service::serve(&cfg, a.port))
}
