//! The matrix exponential curve `t ↦ e^{tF}` as a matrix of smooth fields.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::field::{JetKernel, SmoothField};
use super::jet::{factorial, Jet, MAX_ORDER};
use crate::error::{Error, Result};

/// `t ↦ e^{tF}` with the derivative recursion `d/dt e^{tF} = F e^{tF}`.
#[derive(Debug)]
pub struct MatrixExpCurve {
    generator: DMatrix<f64>,
    /// `F^0 ..= F^MAX_ORDER`
    powers: Vec<DMatrix<f64>>,
}

impl MatrixExpCurve {
    pub fn new(generator: DMatrix<f64>) -> Result<MatrixExpCurve> {
        if !generator.is_square() {
            return Err(Error::DimensionMismatch("generator must be square".into()));
        }
        let n = generator.nrows();
        let mut powers = vec![DMatrix::identity(n, n)];
        for k in 1..=MAX_ORDER {
            let next = &generator * &powers[k - 1];
            powers.push(next);
        }
        Ok(MatrixExpCurve { generator, powers })
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn value(&self, t: f64) -> DMatrix<f64> {
        (&self.generator * t).exp()
    }

    /// Taylor coefficient matrices `F^k e^{tF} / k!` for `k = 0..=order`.
    pub fn taylor(&self, t: f64, order: usize) -> Vec<DMatrix<f64>> {
        let e = self.value(t);
        (0..=order)
            .map(|k| &self.powers[k] * &e / factorial(k))
            .collect()
    }
}

#[derive(Debug)]
struct MatrixExpEntry {
    curve: Arc<MatrixExpCurve>,
    row: usize,
    col: usize,
}

impl JetKernel for MatrixExpEntry {
    fn num_vars(&self) -> usize {
        1
    }

    fn jet(&self, point: &[f64], order: usize) -> Result<Jet> {
        let coeffs = self
            .curve
            .taylor(point[0], order)
            .iter()
            .map(|m| m[(self.row, self.col)])
            .collect();
        Jet::from_coeffs(1, order, coeffs)
    }
}

/// Entry fields of `t ↦ e^{tF}`, each a builtin field of one variable.
pub fn matrix_exp_curve(generator: &DMatrix<f64>) -> Result<Vec<Vec<SmoothField>>> {
    let curve = Arc::new(MatrixExpCurve::new(generator.clone())?);
    let n = curve.dim();
    Ok((0..n)
        .map(|row| {
            (0..n)
                .map(|col| {
                    SmoothField::builtin(Arc::new(MatrixExpEntry {
                        curve: curve.clone(),
                        row,
                        col,
                    }))
                })
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_generator_is_constant_identity() {
        let fields = matrix_exp_curve(&DMatrix::zeros(3, 3)).unwrap();
        for (i, row) in fields.iter().enumerate() {
            for (j, f) in row.iter().enumerate() {
                let jet = f.eval_jet(&[0.8], 3).unwrap();
                assert_eq!(jet.value(), if i == j { 1.0 } else { 0.0 });
                assert!(jet.coeffs()[1..].iter().all(|&c| c == 0.0));
            }
        }
    }

    #[test]
    fn diagonal_generator() {
        let f = DMatrix::from_diagonal(&nalgebra::dvector![1.0, -1.0]);
        let fields = matrix_exp_curve(&f).unwrap();
        let e = std::f64::consts::E;
        assert!((fields[0][0].eval(&[1.0]).unwrap() - e).abs() < 1e-14);
        assert!((fields[1][1].eval(&[1.0]).unwrap() - 1.0 / e).abs() < 1e-15);
        assert_eq!(fields[0][1].eval(&[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn non_square_rejected() {
        assert!(matrix_exp_curve(&DMatrix::zeros(2, 3)).is_err());
    }
}
