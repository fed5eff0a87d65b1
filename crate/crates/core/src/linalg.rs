//! Dense symmetric eigensolvers backed by faer.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

fn check_finite(m: MatRef<'_, f64>) -> Result<()> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Config(format!("expected a square matrix, got {}x{}", n, m.ncols())));
    }
    for j in 0..n {
        for i in 0..n {
            if !m[(i, j)].is_finite() {
                return Err(Error::Eigensolver { n, detail: format!("non-finite entry at ({i}, {j})") });
            }
        }
    }
    Ok(())
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    check_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut values = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver { n, detail: format!("{e:?}") })?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `(largest, smallest)` eigenvalue of a symmetric matrix.
pub fn extreme_eigenvalues(m: MatRef<'_, f64>) -> Result<(f64, f64)> {
    let values = symmetric_eigenvalues(m)?;
    match (values.last(), values.first()) {
        (Some(&hi), Some(&lo)) => Ok((hi, lo)),
        _ => Err(Error::Config("empty matrix has no eigenvalues".into())),
    }
}

/// Eigenpairs of a symmetric matrix ordered by decreasing `|eigenvalue|`.
///
/// Ties in magnitude keep the ascending-eigenvalue order of the solver, which
/// is deterministic for a given input.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    values: Vec<f64>,
    vectors: Mat<f64>,
}

impl SpectralEmbedding {
    pub fn new(m: MatRef<'_, f64>) -> Result<Self> {
        check_finite(m)?;
        let n = m.nrows();
        let evd = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigensolver { n, detail: format!("{e:?}") })?;
        let s = evd.S().column_vector();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| s[b].abs().total_cmp(&s[a].abs()));
        let u = evd.U();
        let values = order.iter().map(|&c| s[c]).collect();
        let vectors = Mat::from_fn(n, n, |i, j| u[(i, order[j])]);
        Ok(Self { values, vectors })
    }

    /// Eigenvalues, largest magnitude first.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row `i` of the `n x k` matrix of leading eigenvectors.
    pub fn row(&self, i: usize, k: usize) -> Vec<f64> {
        (0..k).map(|j| self.vectors[(i, j)]).collect()
    }

    /// The `n x k` embedding as row vectors.
    pub fn rows(&self, k: usize) -> Vec<Vec<f64>> {
        (0..self.vectors.nrows()).map(|i| self.row(i, k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let m = Mat::from_fn(2, 2, |i, j| if i == j { 0.0 } else { 3.0 });
        let (hi, lo) = extreme_eigenvalues(m.as_ref()).unwrap();
        assert!((hi - 3.0).abs() < 1e-12);
        assert!((lo + 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let m = Mat::<f64>::zeros(5, 5);
        assert_eq!(extreme_eigenvalues(m.as_ref()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = Mat::<f64>::zeros(3, 3);
        m[(1, 2)] = f64::NAN;
        m[(2, 1)] = f64::NAN;
        assert!(matches!(extreme_eigenvalues(m.as_ref()), Err(Error::Eigensolver { .. })));
    }

    #[test]
    fn embedding_orders_by_magnitude() {
        // diag(1, -5, 3)
        let m = Mat::from_fn(3, 3, |i, j| if i == j { [1.0, -5.0, 3.0][i] } else { 0.0 });
        let e = SpectralEmbedding::new(m.as_ref()).unwrap();
        let v = e.values();
        assert!((v[0] + 5.0).abs() < 1e-12 && (v[1] - 3.0).abs() < 1e-12 && (v[2] - 1.0).abs() < 1e-12);
        assert!((e.row(1, 1)[0].abs() - 1.0).abs() < 1e-12);
    }
}
