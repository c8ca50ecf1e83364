//! Dense per-scene or per-sentence vectors and cosine similarity.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-major matrix of finite values, one row per scene or sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    movie_id: String,
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(movie_id: impl Into<String>, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("embedding dimension must be positive".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: data.len() % dim });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / dim, col: pos % dim });
        }
        Ok(Self { movie_id: movie_id.into(), dim, data })
    }

    pub fn from_rows(movie_id: impl Into<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::new(movie_id, dim, data)
    }

    pub fn movie_id(&self) -> &str {
        &self.movie_id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Copy with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.movie_id.clone(), self.dim, self.data.iter().map(|v| v * factor).collect())
    }

    /// Row-by-row cosine similarity against `other`, `self.rows() x other.rows()`.
    pub fn cosine_matrix(&self, other: &Self) -> Result<Vec<Vec<f64>>> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let norms_a: Vec<f64> = self.iter_rows().map(norm).collect();
        let norms_b: Vec<f64> = other.iter_rows().map(norm).collect();
        Ok(self
            .iter_rows()
            .zip(&norms_a)
            .map(|(a, &na)| {
                other
                    .iter_rows()
                    .zip(&norms_b)
                    .map(|(b, &nb)| cosine_with_norms(a, b, na, nb))
                    .collect()
            })
            .collect())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

fn cosine_with_norms(a: &[f64], b: &[f64], na: f64, nb: f64) -> f64 {
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot(a, b) / (na * nb)).clamp(-1.0, 1.0)
}

/// Cosine similarity; zero when either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    cosine_with_norms(a, b, norm(a), norm(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_non_finite_and_ragged() {
        assert_eq!(
            EmbeddingMatrix::new("m", 2, vec![0.0, 1.0, f64::NAN, 0.0]),
            Err(Error::NonFinite { row: 1, col: 0 })
        );
        assert!(EmbeddingMatrix::new("m", 2, vec![0.0; 3]).is_err());
        assert!(EmbeddingMatrix::from_rows("m", &[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn cosine_basics() {
        assert!((cosine(&[1.0, 0.0], &[2.0, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 3.0]), 0.0);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 1.0]), 0.0);
        assert!((cosine(&[1.0, 0.0], &[-1.0, 0.0]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn cosine_matrix_shape() {
        let a = EmbeddingMatrix::from_rows("m", &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let b = EmbeddingMatrix::from_rows("m", &[vec![1.0, 0.0]]).unwrap();
        let m = a.cosine_matrix(&b).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m[0], vec![1.0]);
        assert!((m[2][0] - libm::sqrt(0.5)).abs() < 1e-12);
        let c = EmbeddingMatrix::from_rows("m", &[vec![1.0, 0.0, 0.0]]).unwrap();
        assert!(a.cosine_matrix(&c).is_err());
    }
}
