//! Instance embeddings and cosine similarity.

use crate::error::{Error, Result};

/// Real-valued instance embedding of configurable dimension (default 256).
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    values: Vec<f64>,
}

impl Embedding {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("embedding"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { row: 0, col: pos });
        }
        Ok(Self { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Scale to unit norm; errors on zero norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNormEmbedding(0));
        }
        Ok(Self {
            values: self.values.iter().map(|v| v / n).collect(),
        })
    }
}

/// Cosine similarity, clamped to [-1, 1].
///
/// Bitwise-identical inputs short-circuit to exactly 1.0 so that the
/// dissimilarity of a temporally constant embedding is exactly zero; the
/// clamp keeps rounding from pushing |cos| past 1 on collinear inputs.
/// Errors on zero-norm inputs or dimension mismatch.
pub fn cosine_similarity(a: &Embedding, b: &Embedding) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cosine on embeddings of dim {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 {
        return Err(Error::ZeroNormEmbedding(0));
    }
    if nb == 0.0 {
        return Err(Error::ZeroNormEmbedding(1));
    }
    if a.values == b.values {
        return Ok(1.0);
    }
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Cosine distance, 1 - cos, in [0, 2].
pub fn cosine_distance(a: &Embedding, b: &Embedding) -> Result<f64> {
    Ok(1.0 - cosine_similarity(a, b)?)
}

/// Euclidean distance between raw embedding vectors.
pub fn euclidean_distance(a: &Embedding, b: &Embedding) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "euclidean distance on embeddings of dim {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Unit basis vector e_i of the given dimension.
pub fn basis(dim: usize, i: usize) -> Embedding {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    Embedding::new(v).expect("basis vector is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_identical_is_exactly_one() {
        let a = Embedding::new(vec![0.3, -1.7, 2.2]).unwrap();
        assert_eq!(cosine_similarity(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn cosine_orthogonal_is_zero() {
        let a = basis(4, 0);
        let b = basis(4, 2);
        assert_eq!(cosine_similarity(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn cosine_opposite_is_minus_one() {
        let a = basis(3, 1);
        let b = Embedding::new(vec![0.0, -1.0, 0.0]).unwrap();
        assert_eq!(cosine_similarity(&a, &b).unwrap(), -1.0);
    }

    #[test]
    fn zero_norm_errors() {
        let a = basis(2, 0);
        let z = Embedding::new(vec![0.0, 0.0]).unwrap();
        assert!(cosine_similarity(&a, &z).is_err());
        assert!(z.normalized().is_err());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(Embedding::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn cosine_stays_in_range_on_collinear_inputs() {
        let a = Embedding::new(vec![0.1, 0.2, 0.3]).unwrap();
        let b = Embedding::new(vec![0.3, 0.6, 0.9]).unwrap();
        let c = cosine_similarity(&a, &b).unwrap();
        assert!(c <= 1.0 && c >= -1.0);
        assert!((c - 1.0).abs() < 1e-12);
    }
}
