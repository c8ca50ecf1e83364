#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scenesal::formats::{write_embeddings, EmbeddingUnit};
use scenesal_core::EmbeddingMatrix;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/corpus")
}

/// Scene and sentence counts of the fixture movies.
pub const FIXTURE_MOVIES: [(&str, usize, usize); 2] = [("harbor", 5, 3), ("orchard", 3, 2)];

pub fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            fs::copy(entry.path(), target).unwrap();
        }
    }
}

pub fn random_matrix(id: &str, rows: usize, dim: usize, rng: &mut ChaCha8Rng) -> EmbeddingMatrix {
    let data = (0..rows * dim).map(|_| rng.gen_range(-1.0f32..1.0) as f64).collect();
    EmbeddingMatrix::new(id, dim, data).unwrap()
}

/// Writes random scene and sentence embeddings for the fixture movies.
pub fn write_fixture_embeddings(dir: &Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (id, scenes, sentences) in FIXTURE_MOVIES {
        let s = random_matrix(id, scenes, 8, &mut rng);
        let t = random_matrix(id, sentences, 8, &mut rng);
        write_embeddings(&dir.join(format!("{id}.scene.emb")), &s, EmbeddingUnit::Scene).unwrap();
        write_embeddings(&dir.join(format!("{id}.sentence.emb")), &t, EmbeddingUnit::Sentence).unwrap();
    }
}

/// Fixture corpus copied into a temporary directory, with embeddings.
pub fn temp_corpus() -> (tempfile::TempDir, PathBuf) {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().join("corpus");
    copy_dir(&fixture_dir(), &root);
    write_fixture_embeddings(&root.join("embeddings"));
    (tmp, root)
}
