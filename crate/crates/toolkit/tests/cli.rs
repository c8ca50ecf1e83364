mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use scenesal::formats::{read_embeddings, read_labels, read_model, read_scenes, EmbeddingUnit};
use serde_json::Value;

fn toolkit(args: &[&str], paths: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_toolkit"));
    cmd.args(args);
    for (flag, path) in paths {
        cmd.arg(flag).arg(path);
    }
    cmd.output().unwrap()
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn expected(name: &str) -> Value {
    serde_json::from_slice(&fs::read(common::fixture_dir().join("expected").join(name)).unwrap()).unwrap()
}

#[test]
fn rouge_scores_a_hand_checked_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let cand = tmp.path().join("cand.txt");
    let reference = tmp.path().join("ref.txt");
    fs::write(&cand, "The cat sat on the mat.").unwrap();
    fs::write(&reference, "the cat lay on the mat").unwrap();
    let out = json_stdout(&toolkit(&["rouge"], &[("--candidate", &cand), ("--reference", &reference)]));
    assert_eq!(out["r1"]["p"].as_f64().unwrap(), 5.0 / 6.0);
    assert_eq!(out["r2"]["r"].as_f64().unwrap(), 3.0 / 5.0);
    assert_eq!(out["rl"]["f1"].as_f64().unwrap(), 5.0 / 6.0);

    let only = json_stdout(&toolkit(&["rouge", "--metrics", "rl"], &[("--candidate", &cand), ("--reference", &reference)]));
    assert_eq!(only.as_object().unwrap().keys().collect::<Vec<_>>(), ["rl"]);
}

#[test]
fn fixture_reports_match_golden_files() {
    let root = common::fixture_dir();
    let tmp = tempfile::tempdir().unwrap();
    let aligned = tmp.path().join("aligned");
    let labels = tmp.path().join("labels");

    let agreement = json_stdout(&toolkit(&["agreement"], &[("--annotations", &root.join("agreement"))]));
    assert_eq!(agreement, expected("agreement.json"));

    let gold_stats = toolkit(
        &["stats"],
        &[("--scripts", &root.join("scripts")), ("--summaries", &root.join("summaries")), ("--alignments", &root.join("gold"))],
    );
    assert_eq!(json_stdout(&gold_stats), expected("gold_stats.json"));

    let align = toolkit(
        &["align", "--method", "rouge-l"],
        &[("--scripts", &root.join("scripts")), ("--summaries", &root.join("summaries")), ("--out", &aligned)],
    );
    assert!(align.status.success(), "{}", String::from_utf8_lossy(&align.stderr));
    let stats = toolkit(
        &["stats"],
        &[("--scripts", &root.join("scripts")), ("--summaries", &root.join("summaries")), ("--alignments", &aligned)],
    );
    assert_eq!(json_stdout(&stats), expected("stats.json"));

    let label = toolkit(&["label"], &[("--alignments", &aligned), ("--scripts", &root.join("scripts")), ("--out", &labels)]);
    assert!(label.status.success());
    assert_eq!(read_labels(&labels.join("harbor.json")).unwrap().labels, [false, true, true, false, true]);

    // Gold given as alignments and as labels gives the same evaluation.
    let eval = json_stdout(&toolkit(&["eval-saliency"], &[("--pred", &labels), ("--gold", &root.join("gold"))]));
    assert_eq!(eval, expected("rouge_l_vs_gold.json"));
    let self_eval = json_stdout(&toolkit(&["eval-saliency"], &[("--pred", &labels), ("--gold", &labels)]));
    assert_eq!(self_eval["f1"].as_f64(), Some(1.0));
}

#[test]
fn parse_select_train_kfold_prepare() {
    let (tmp, root) = common::temp_corpus();
    let parsed = tmp.path().join("parsed");
    let out = toolkit(
        &["parse", "--extra-slugline", "OPEN ON"],
        &[("--scripts", &root.join("scripts")), ("--summaries", &root.join("summaries")), ("--out", &parsed)],
    );
    assert!(out.status.success());
    assert_eq!(read_scenes(&parsed.join("harbor.scenes.jsonl")).unwrap().len(), 5);
    assert!(parsed.join("orchard.summary.json").is_file());

    let selected = tmp.path().join("selected");
    let out = toolkit(
        &["select", "--method", "textrank", "--k", "0.34"],
        &[("--embeddings", &root.join("embeddings")), ("--scripts", &parsed), ("--out", &selected)],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let harbor = read_labels(&selected.join("harbor.json")).unwrap();
    // ceil(0.34 * 4) eligible scenes; the title page is excluded.
    assert_eq!(harbor.salient_count(), 2);
    assert!(!harbor.labels[0]);

    let model = tmp.path().join("model.json");
    let out = toolkit(
        &["train-scorer", "--epochs", "50"],
        &[("--embeddings", &root.join("embeddings")), ("--labels", &selected), ("--out", &model)],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_model(&model).unwrap().weights.len(), 17);

    let scored = tmp.path().join("scored");
    let out = toolkit(
        &["select", "--method", "scorer"],
        &[("--embeddings", &root.join("embeddings")), ("--model", &model), ("--out", &scored)],
    );
    assert!(out.status.success());
    assert!(read_labels(&scored.join("orchard.json")).unwrap().scores.is_some());

    let kfold = toolkit(
        &["kfold", "--k", "2", "--method", "majority"],
        &[("--embeddings", &root.join("embeddings")), ("--labels", &selected)],
    );
    let report = json_stdout(&kfold);
    assert_eq!(report["folds"].as_array().unwrap().len(), 2);
    assert_eq!(report["mean"]["recall"].as_f64(), Some(0.5));

    let prepared = tmp.path().join("prepared");
    let out = toolkit(
        &["prepare", "--budget", "10"],
        &[("--scripts", &parsed), ("--labels", &selected), ("--out", &prepared)],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta: Value = serde_json::from_slice(&fs::read(prepared.join("harbor.json")).unwrap()).unwrap();
    assert_eq!(meta["token_count"], 10);
    assert_eq!(meta["truncated"], true);
}

#[test]
fn exit_codes() {
    let usage = toolkit(&["rouge", "--metrics", "r9"], &[]);
    assert_eq!(usage.status.code(), Some(1));
    let missing = toolkit(&["agreement"], &[("--annotations", Path::new("/definitely/not/here"))]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/definitely/not/here"));

    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("m.json"),
        r#"{"movie_id": "m", "sentences": [{"idx": 0, "A": [1], "B": [], "C": [1]}]}"#,
    )
    .unwrap();
    let invalid = toolkit(&["agreement"], &[("--annotations", tmp.path())]);
    assert_eq!(invalid.status.code(), Some(1));
    assert_eq!(toolkit(&["--help"], &[]).status.code(), Some(0));
}

/// Bytes laid out the way an external exporter writes them: `b"EMB1"`, two
/// little-endian u32 counts, row-major little-endian f32 values.
#[test]
fn emb1_written_by_an_external_producer_loads_exactly() {
    let values: Vec<f32> = vec![0.1, -2.5, 3.25e-7, 1e30, -0.0, 7.0];
    let mut bytes = b"EMB1".to_vec();
    bytes.extend_from_slice(&3u32.to_le_bytes());
    bytes.extend_from_slice(&2u32.to_le_bytes());
    for v in &values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("m1.scene.emb");
    fs::write(&path, &bytes).unwrap();
    fs::write(
        tmp.path().join("m1.scene.json"),
        r#"{"movie_id": "m1", "unit": "scene", "encoder": "some-encoder", "pooling": "first", "dim": 2}"#,
    )
    .unwrap();

    let emb = read_embeddings(&path, EmbeddingUnit::Scene).unwrap();
    assert_eq!((emb.movie_id(), emb.rows(), emb.dim()), ("m1", 3, 2));
    let back: Vec<f32> = emb.as_slice().iter().map(|&v| v as f32).collect();
    assert_eq!(back.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());

    assert!(read_embeddings(&path, EmbeddingUnit::Sentence).is_err());
    fs::write(&path, &bytes[..bytes.len() - 1]).unwrap();
    assert!(read_embeddings(&path, EmbeddingUnit::Scene).unwrap_err().to_string().contains("expected 36 bytes"));
    let mut nan = bytes.clone();
    nan[12..16].copy_from_slice(&f32::NAN.to_le_bytes());
    fs::write(&path, &nan).unwrap();
    assert!(read_embeddings(&path, EmbeddingUnit::Scene).is_err());
}
