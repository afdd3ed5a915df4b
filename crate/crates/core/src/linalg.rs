//! Small shared linear-algebra helpers.

use nalgebra::{DMatrix, DVector};

/// Least-squares solve with a singular-value cutoff relative to the largest
/// singular value (minimum-norm solution for underdetermined systems).
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rel: f64) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max().max(1e-300);
    svd.solve(b, rel * smax)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

/// Least-squares with precomputed SVD for repeated right-hand sides.
pub(crate) struct Lstsq {
    svd: nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>,
    eps: f64,
    ncols: usize,
}

impl Lstsq {
    pub fn new(a: &DMatrix<f64>, rel: f64) -> Self {
        let svd = a.clone().svd(true, true);
        let eps = rel * svd.singular_values.max().max(1e-300);
        Lstsq { svd, eps, ncols: a.ncols() }
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.svd
            .solve(b, self.eps)
            .unwrap_or_else(|_| DVector::zeros(self.ncols))
    }
}
