mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use scenesal::config::{AlignArg, PipelineConfig, SelectArg};
use scenesal::formats::{read_labels, read_scenes};
use scenesal::fsio::read_json;
use scenesal::pipeline::{run_pipeline, Layout, STAGES};
use scenesal::reports::{EvalJson, PreparedMeta};
use scenesal_core::tokenize;

fn config(root: &Path) -> PipelineConfig {
    PipelineConfig {
        scripts: root.join("scripts"),
        summaries: root.join("summaries"),
        embeddings: Some(root.join("embeddings")),
        gold: Some(root.join("gold")),
        out: root.join("out"),
        jobs: 2,
        ..PipelineConfig::default()
    }
}

#[test]
fn fresh_run_writes_every_stage_output() {
    let (_tmp, root) = common::temp_corpus();
    let cfg = config(&root);
    let report = run_pipeline(&cfg).unwrap();
    assert_eq!(report.stages.iter().map(|s| s.stage).collect::<Vec<_>>(), STAGES);
    for stage in &report.stages[..5] {
        assert_eq!((stage.executed, stage.skipped), (2, 0), "{}", stage.stage);
    }
    assert_eq!(report.stage("evaluate").unwrap().executed, 1);

    let layout = Layout { out: cfg.out.clone() };
    for (id, n_scenes, _) in common::FIXTURE_MOVIES {
        for path in [
            layout.scenes(id),
            layout.summary(id),
            layout.alignment(id),
            layout.labels(id),
            layout.selected(id),
            layout.prepared_text(id),
            layout.prepared_meta(id),
        ] {
            assert!(path.is_file(), "{} missing", path.display());
        }
        assert_eq!(read_scenes(&layout.scenes(id)).unwrap().len(), n_scenes);
        let selected = read_labels(&layout.selected(id)).unwrap();
        assert_eq!(selected.len(), n_scenes);
        let meta: PreparedMeta = read_json(&layout.prepared_meta(id)).unwrap();
        let text = fs::read_to_string(layout.prepared_text(id)).unwrap();
        assert_eq!(tokenize(&text).len(), meta.token_count);
    }
    // The title page of `harbor` is never selected.
    assert!(!read_labels(&layout.selected("harbor")).unwrap().labels[0]);

    let eval: EvalJson = read_json(&layout.eval()).unwrap();
    assert_eq!(eval.stats.n_movies, 2);
    assert_eq!(eval.stats.n_alignment_pairs, 5);
    let vs_gold = eval.alignment_vs_gold.unwrap();
    assert!((vs_gold.f1 - 37.0 / 42.0).abs() < 1e-12);
    assert!(eval.selection_vs_gold.is_some());
}

#[test]
fn rerun_without_changes_executes_nothing() {
    let (_tmp, root) = common::temp_corpus();
    let cfg = config(&root);
    run_pipeline(&cfg).unwrap();
    let again = run_pipeline(&cfg).unwrap();
    assert_eq!(again.executed(), 0, "{again:?}");

    let forced = run_pipeline(&PipelineConfig { force: true, ..cfg }).unwrap();
    assert_eq!(forced.stage("parse").unwrap().executed, 2);
}

#[test]
fn touching_one_summary_reruns_only_that_movie() {
    let (_tmp, root) = common::temp_corpus();
    let cfg = config(&root);
    run_pipeline(&cfg).unwrap();
    std::thread::sleep(std::time::Duration::from_millis(20));
    let path = root.join("summaries/orchard.txt");
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, text.replace("A storm", "A sudden storm")).unwrap();

    let report = run_pipeline(&cfg).unwrap();
    for stage in &report.stages[..2] {
        assert_eq!((stage.executed, stage.skipped), (1, 1), "{}", stage.stage);
    }
    assert_eq!(report.stage("evaluate").unwrap().executed, 1);
}

#[test]
fn corrupted_embedding_names_file_and_stage() {
    let (_tmp, root) = common::temp_corpus();
    let emb = root.join("embeddings/harbor.scene.emb");
    let mut bytes = fs::read(&emb).unwrap();
    bytes[..4].copy_from_slice(b"XXXX");
    fs::write(&emb, bytes).unwrap();

    let err = run_pipeline(&config(&root)).unwrap_err();
    let message = err.to_string();
    assert!(message.starts_with("stage select:"), "{message}");
    assert!(message.contains(&emb.display().to_string()), "{message}");
    assert!(message.contains("bad magic"), "{message}");
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn embedding_aligner_and_majority_selection() {
    let (_tmp, root) = common::temp_corpus();
    let cfg = PipelineConfig {
        align_method: AlignArg::EmbedMonotonic,
        select_method: SelectArg::Majority,
        ..config(&root)
    };
    run_pipeline(&cfg).unwrap();
    let layout = Layout { out: cfg.out.clone() };
    let majority = read_labels(&layout.selected("orchard")).unwrap();
    assert_eq!(majority.salient_count(), 0);
    // With nothing selected the lead fallback keeps the opening scenes.
    let meta: PreparedMeta = read_json(&layout.prepared_meta("orchard")).unwrap();
    assert_eq!(meta.included_scenes, vec![0, 1, 2]);
}

#[test]
fn missing_embeddings_directory_is_a_config_error() {
    let (_tmp, root) = common::temp_corpus();
    let cfg = PipelineConfig { embeddings: None, ..config(&root) };
    assert_eq!(run_pipeline(&cfg).unwrap_err().exit_code(), 1);
}

#[test]
fn cli_run_reads_config_and_flags_override_it() {
    let (_tmp, root) = common::temp_corpus();
    fs::write(
        root.join("pipeline.toml"),
        "scripts = \"scripts\"\nsummaries = \"summaries\"\nembeddings = \"embeddings\"\nout = \"from-config\"\njobs = 1\nbudget = 12\n",
    )
    .unwrap();
    let run = Command::new(env!("CARGO_BIN_EXE_toolkit"))
        .args(["run", "--config"])
        .arg(root.join("pipeline.toml"))
        .arg("--out")
        .arg(root.join("from-flag"))
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("evaluate"));
    assert!(!root.join("from-config").exists());
    let meta: PreparedMeta = read_json(&root.join("from-flag/prepared/harbor.json")).unwrap();
    assert!(meta.token_count <= 12);
    assert!(root.join("from-flag/eval.json").is_file());

    let bad = Command::new(env!("CARGO_BIN_EXE_toolkit"))
        .args(["run", "--scripts"])
        .arg(root.join("nowhere"))
        .arg("--embeddings")
        .arg(root.join("embeddings"))
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2), "{}", String::from_utf8_lossy(&bad.stderr));
}
