//! The null frame of `ℝ^{1,n+1}` and standard bases of `so` and `co`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ℝ^{n+2}` with the form `2x⁰x¹ + Σ_{i≥2} (x^i)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinkowskiFrame {
    dim: usize,
}

impl MinkowskiFrame {
    pub fn new(dim: usize) -> Result<MinkowskiFrame> {
        if dim < 3 {
            return Err(Error::Invalid(format!("frame dimension must be at least 3, got {dim}")));
        }
        Ok(MinkowskiFrame { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Transverse dimension `n`.
    pub fn n(&self) -> usize {
        self.dim - 2
    }

    pub fn form(&self) -> DMatrix<f64> {
        let mut g = DMatrix::identity(self.dim, self.dim);
        g[(0, 0)] = 0.0;
        g[(1, 1)] = 0.0;
        g[(0, 1)] = 1.0;
        g[(1, 0)] = 1.0;
        g
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a[0] * b[1] + a[1] * b[0] + (2..self.dim).map(|i| a[i] * b[i]).sum::<f64>()
    }

    /// `A = diag(1, −1, 0, …, 0)`.
    pub fn grading_element(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.dim, self.dim);
        a[(0, 0)] = 1.0;
        a[(1, 1)] = -1.0;
        a
    }

    /// `max |XᵀG + GX − (2 tr X / dim) G|`; zero exactly on `co(1, n+1)`.
    pub fn co_defect(&self, x: &DMatrix<f64>) -> f64 {
        let g = self.form();
        let scale = 2.0 * x.trace() / self.dim as f64;
        (x.transpose() * &g + &g * x - &g * scale).amax()
    }

    /// `G⁻¹(E_ij − E_ji)` for `i < j`, a basis of `so(1, n+1)`.
    pub fn so_basis(&self) -> Vec<DMatrix<f64>> {
        let g = self.form();
        // G is its own inverse
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let mut om = DMatrix::zeros(self.dim, self.dim);
                om[(i, j)] = 1.0;
                om[(j, i)] = -1.0;
                out.push(&g * om);
            }
        }
        out
    }

    /// `so` basis followed by the identity.
    pub fn co_basis(&self) -> Vec<DMatrix<f64>> {
        let mut b = self.so_basis();
        b.push(DMatrix::identity(self.dim, self.dim));
        b
    }

    /// `B^t = e^{tα} diag(e^t, e^{−t}, 1, …, 1)`.
    pub fn boost(&self, alpha: f64, t: f64) -> DMatrix<f64> {
        let mut b = DMatrix::identity(self.dim, self.dim);
        b[(0, 0)] = t.exp();
        b[(1, 1)] = (-t).exp();
        b * (alpha * t).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bases_lie_in_co() {
        let f = MinkowskiFrame::new(5).unwrap();
        assert_eq!(f.so_basis().len(), 10);
        for x in f.co_basis() {
            assert!(f.co_defect(&x) < 1e-15);
        }
        assert_eq!(f.co_defect(&f.grading_element()), 0.0);
        assert!(f.co_defect(&DMatrix::from_diagonal_element(5, 5, 1.0).map(|v| v * 2.0)) < 1e-15);
        let mut bad = DMatrix::zeros(5, 5);
        bad[(0, 0)] = 1.0;
        assert!(f.co_defect(&bad) > 0.1);
    }
}
