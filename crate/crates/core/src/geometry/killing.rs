//! Conformal Killing classification and the Weyl covariance check.

use nalgebra::DMatrix;
use ndarray::Array4;
use serde::Serialize;

use super::curvature::{curvature_without_gradient, CurvatureBundle};
use super::{MetricField, VectorField};
use crate::error::{Error, Result};
use crate::smoothfield::{Jet, SmoothField};

/// `(L_X g)_ij = X^k ∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k` at `p`.
pub fn lie_derivative_metric(g: &MetricField, x: &VectorField, p: &[f64]) -> Result<DMatrix<f64>> {
    if x.dim() != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector field on {} coordinates, metric on {}",
            x.dim(),
            g.dim()
        )));
    }
    let d = g.dim();
    let gj = g.jets_at(p, 1)?;
    let xj = x.jets_at(p, 1)?;
    let dg: Vec<Vec<f64>> = gj.iter().map(Jet::gradient).collect();
    let dx: Vec<Vec<f64>> = xj.iter().map(Jet::gradient).collect();
    let xv: Vec<f64> = xj.iter().map(Jet::value).collect();
    Ok(DMatrix::from_fn(d, d, |i, j| {
        let mut v = 0.0;
        for k in 0..d {
            v += xv[k] * dg[i * d + j][k];
            v += gj[k * d + j].value() * dx[k][i];
            v += gj[i * d + k].value() * dx[k][j];
        }
        v
    }))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KillingTolerances {
    /// Bound on `‖L_X g − λ g‖ / ‖g‖` per point.
    pub residual: f64,
    /// `|λ|` below this everywhere counts as Killing.
    pub lambda_zero: f64,
    /// Sample standard deviation of `λ` below this counts as constant.
    pub lambda_spread: f64,
}

impl Default for KillingTolerances {
    fn default() -> Self {
        KillingTolerances {
            residual: 1e-8,
            lambda_zero: 1e-8,
            lambda_spread: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KillingVerdict {
    Killing,
    Homothetic { c: f64 },
    Conformal,
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct KillingPoint {
    pub point: Vec<f64>,
    pub lambda: f64,
    pub residual: f64,
    /// Set when the point could not be evaluated; it is then left out of the verdict.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KillingReport {
    pub verdict: KillingVerdict,
    pub points: Vec<KillingPoint>,
    pub max_residual: f64,
    pub lambda_mean: f64,
    pub lambda_std: f64,
    /// Largest `|λ − c|` for a homothety, largest `|λ|` for a Killing field.
    pub lambda_deviation: f64,
    pub tolerances: KillingTolerances,
}

impl KillingReport {
    pub fn is_killing(&self) -> bool {
        self.verdict == KillingVerdict::Killing
    }

    pub fn failed_points(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }
}

/// Minimum number of sample points for a classification.
pub const MIN_POINTS: usize = 10;

fn fit_point(g: &MetricField, x: &VectorField, p: &[f64]) -> Result<(f64, f64)> {
    let gm = g.validated_matrix_at(p)?;
    let l = lie_derivative_metric(g, x, p)?;
    let d = g.dim();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..d {
        for j in i..d {
            num += l[(i, j)] * gm[(i, j)];
            den += gm[(i, j)] * gm[(i, j)];
        }
    }
    let lambda = num / den;
    let residual = (&l - &gm * lambda).norm() / gm.norm();
    Ok((lambda, residual))
}

/// Classifies `X` by fitting `L_X g = λ g` pointwise.
pub fn conformal_killing_check(
    g: &MetricField,
    x: &VectorField,
    points: &[Vec<f64>],
    tol: KillingTolerances,
) -> Result<KillingReport> {
    if x.dim() != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector field on {} coordinates, metric on {}",
            x.dim(),
            g.dim()
        )));
    }
    if points.len() < MIN_POINTS {
        return Err(Error::Invalid(format!(
            "conformal Killing check needs at least {MIN_POINTS} points, got {}",
            points.len()
        )));
    }
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        out.push(match fit_point(g, x, p) {
            Ok((lambda, residual)) => KillingPoint {
                point: p.clone(),
                lambda,
                residual,
                error: None,
            },
            Err(e) => KillingPoint {
                point: p.clone(),
                lambda: f64::NAN,
                residual: f64::NAN,
                error: Some(e.to_string()),
            },
        });
    }
    let good: Vec<&KillingPoint> = out.iter().filter(|p| p.error.is_none()).collect();
    let lambdas: Vec<f64> = good.iter().map(|p| p.lambda).collect();
    let max_residual = good.iter().map(|p| p.residual).fold(0.0, f64::max);
    let n = lambdas.len() as f64;
    let lambda_mean = if good.is_empty() { f64::NAN } else { lambdas.iter().sum::<f64>() / n };
    let lambda_std = if good.len() < 2 {
        0.0
    } else {
        (lambdas.iter().map(|l| (l - lambda_mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    let max_abs = lambdas.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let (verdict, lambda_deviation) = if good.is_empty() || max_residual >= tol.residual {
        (KillingVerdict::None, f64::NAN)
    } else if max_abs < tol.lambda_zero {
        (KillingVerdict::Killing, max_abs)
    } else if lambda_std < tol.lambda_spread {
        let dev = lambdas.iter().fold(0.0f64, |a, l| a.max((l - lambda_mean).abs()));
        (KillingVerdict::Homothetic { c: lambda_mean }, dev)
    } else {
        (KillingVerdict::Conformal, f64::NAN)
    };
    Ok(KillingReport {
        verdict,
        points: out,
        max_residual,
        lambda_mean,
        lambda_std,
        lambda_deviation,
        tolerances: tol,
    })
}

/// Max over `points` of `|W_ijk^l(g) − W_ijk^l(e^σ g)|`.
pub fn weyl_conformal_covariance_check(g: &MetricField, sigma: &SmoothField, points: &[Vec<f64>]) -> Result<f64> {
    weyl_conformal_covariance_check_with(g, sigma, points, CurvatureBundle::weyl_mixed)
}

/// As [`weyl_conformal_covariance_check`], with the `(1,3)` Weyl map supplied.
pub fn weyl_conformal_covariance_check_with<F>(
    g: &MetricField,
    sigma: &SmoothField,
    points: &[Vec<f64>],
    weyl13: F,
) -> Result<f64>
where
    F: Fn(&CurvatureBundle) -> Array4<f64>,
{
    let gs = g.conformal(sigma)?;
    let mut worst = 0.0f64;
    for p in points {
        let a = weyl13(&curvature_without_gradient(g, p)?);
        let b = weyl13(&curvature_without_gradient(&gs, p)?);
        worst = (&a - &b).iter().fold(worst, |m, v| m.max(v.abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::super::{Chart, Signature};
    use super::*;

    fn wave() -> MetricField {
        let chart = Chart::brinkmann(2).unwrap();
        MetricField::from_exprs(
            chart,
            &[
                vec!["sin(t)*x1^2 - 2*x1*x2 + cos(t)*x2^2", "1", "0", "0"],
                vec!["0", "0", "0"],
                vec!["1", "0"],
                vec!["1"],
            ],
            Signature::lorentzian(4),
        )
        .unwrap()
    }

    fn points() -> Vec<Vec<f64>> {
        (0..12)
            .map(|k| {
                let s = k as f64 / 11.0;
                vec![s - 0.5, 0.3 - s, 1.0 - 2.0 * s, 0.2 + s * s]
            })
            .collect()
    }

    #[test]
    fn central_field_is_killing() {
        let g = wave();
        let xi = VectorField::coordinate(g.chart().clone(), 1);
        let r = conformal_killing_check(&g, &xi, &points(), KillingTolerances::default()).unwrap();
        assert_eq!(r.verdict, KillingVerdict::Killing);
        assert!(r.max_residual < 1e-10);
    }

    #[test]
    fn homothety_has_factor_two() {
        let g = wave();
        let h = VectorField::from_exprs(g.chart().clone(), &["0", "2*v", "x1", "x2"]).unwrap();
        let r = conformal_killing_check(&g, &h, &points(), KillingTolerances::default()).unwrap();
        match r.verdict {
            KillingVerdict::Homothetic { c } => assert!((c - 2.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn too_few_points_rejected() {
        let g = wave();
        let xi = VectorField::coordinate(g.chart().clone(), 1);
        assert!(conformal_killing_check(&g, &xi, &points()[..3], KillingTolerances::default()).is_err());
    }
}
