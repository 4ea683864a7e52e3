//! Generalized-eigenspace decompositions under a derivation, the grading of
//! `so(1, n+1)` by `ad_A`, and the spectrum `σ_B`.

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use super::algebra::{LieAlgebra, MatrixAlgebra};
use super::frame::MinkowskiFrame;
use super::jordan::{SpectralBasis, CLUSTER_TOL};
use crate::error::{Error, Result};

/// Bracket grading tolerance.
pub const GRADING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct Component {
    pub eigenvalue: f64,
    /// Basis vectors in the algebra's coordinates.
    pub basis: Vec<Vec<f64>>,
}

impl Component {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GradedDecomposition {
    pub derivation_matrix: DMatrix<f64>,
    /// `(μ, multiplicity)`, ascending.
    pub spectrum: Vec<(f64, usize)>,
    pub components: Vec<Component>,
    /// `max ‖[x, y] − P_{μ+ν}[x, y]‖` over component basis pairs, relative
    /// to `‖x‖‖y‖`; `P` is zero when `μ + ν` is not an eigenvalue.
    pub grading_residual: f64,
    /// Leibniz-rule defect of the derivation on basis pairs.
    pub derivation_defect: f64,
}

impl GradedDecomposition {
    pub fn component(&self, mu: f64) -> Option<&Component> {
        self.components
            .iter()
            .find(|c| (c.eigenvalue - mu).abs() <= CLUSTER_TOL * mu.abs().max(1.0))
    }

    pub fn total_dim(&self) -> usize {
        self.components.iter().map(Component::dim).sum()
    }
}

/// Orthonormal basis of the column space of `p` with the given rank.
fn column_basis(p: &DMatrix<f64>, rank: usize) -> Vec<DVector<f64>> {
    let svd = p.clone().svd(true, false);
    let u = svd.u.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    order[..rank].iter().map(|&k| u.column(k).into_owned()).collect()
}

/// Decomposes `alg` into generalized eigenspaces of the derivation `d`
/// (a matrix on the algebra's coordinates, inner or outer).
pub fn eigenspace_decompose(alg: &LieAlgebra, d: &DMatrix<f64>) -> Result<GradedDecomposition> {
    let m = alg.dim();
    if d.nrows() != m || d.ncols() != m {
        return Err(Error::DimensionMismatch(format!("derivation must be {m}x{m}")));
    }
    let sb = SpectralBasis::new(d)?;
    for c in &sb.clusters {
        if c.im.abs() > CLUSTER_TOL * c.value().norm().max(1.0) {
            return Err(Error::ComplexSpectrum { re: c.re, im: c.im });
        }
    }
    let projectors: Vec<DMatrix<f64>> = (0..sb.clusters.len())
        .map(|i| sb.projector(i).map(|z: Complex<f64>| z.re))
        .collect();
    let bases: Vec<Vec<DVector<f64>>> = sb
        .clusters
        .iter()
        .zip(&projectors)
        .map(|(c, p)| column_basis(p, c.multiplicity))
        .collect();

    let find = |mu: f64| {
        sb.clusters
            .iter()
            .position(|c| (c.re - mu).abs() <= CLUSTER_TOL * mu.abs().max(1.0))
    };
    let mut residual = 0.0f64;
    for (i, ci) in sb.clusters.iter().enumerate() {
        for (j, cj) in sb.clusters.iter().enumerate() {
            let target = find(ci.re + cj.re);
            for x in &bases[i] {
                for y in &bases[j] {
                    let br = alg.bracket(x, y);
                    let off = match target {
                        Some(t) => &br - &projectors[t] * &br,
                        None => br,
                    };
                    residual = residual.max(off.amax() / (x.amax() * y.amax()));
                }
            }
        }
    }
    Ok(GradedDecomposition {
        derivation_matrix: d.clone(),
        spectrum: sb.clusters.iter().map(|c| (c.re, c.multiplicity)).collect(),
        components: sb
            .clusters
            .iter()
            .zip(bases)
            .map(|(c, b)| Component {
                eigenvalue: c.re,
                basis: b.into_iter().map(|v| v.iter().cloned().collect()).collect(),
            })
            .collect(),
        grading_residual: residual,
        derivation_defect: alg.derivation_defect(d),
    })
}

/// Decomposition under `ad_B` for a matrix `B` normalizing the algebra.
pub fn eigenspace_decompose_element(alg: &MatrixAlgebra, b: &DMatrix<f64>) -> Result<GradedDecomposition> {
    let d = alg.derivation_of(b)?;
    eigenspace_decompose(alg.lie(), &d)
}

#[derive(Debug, Clone, Serialize)]
pub struct SoGrading {
    pub minus: Vec<DMatrix<f64>>,
    pub zero: Vec<DMatrix<f64>>,
    pub plus: Vec<DMatrix<f64>>,
}

impl SoGrading {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.minus.len(), self.zero.len(), self.plus.len())
    }

    /// Basis of the parabolic `p⁺ = s⁰ ⊕ s⁺`.
    pub fn parabolic_plus(&self) -> Vec<DMatrix<f64>> {
        self.zero.iter().chain(&self.plus).cloned().collect()
    }

    pub fn parabolic_minus(&self) -> Vec<DMatrix<f64>> {
        self.minus.iter().chain(&self.zero).cloned().collect()
    }

    /// `max |[X, Y] − P_{μ+ν}[X, Y]|` over basis pairs, with `s^{±2} = 0`.
    pub fn bracket_residual(&self, frame: &MinkowskiFrame) -> f64 {
        let parts = [(-1i32, &self.minus), (0, &self.zero), (1, &self.plus)];
        let a = frame.grading_element();
        let mut worst = 0.0f64;
        for (mu, xs) in &parts {
            for (nu, ys) in &parts {
                let target = mu + nu;
                for x in xs.iter() {
                    for y in ys.iter() {
                        let br = x * y - y * x;
                        // [A, Z] = target·Z characterizes s^target (and Z = 0 outside ±1, 0)
                        let defect = if target.abs() <= 1 {
                            (&a * &br - &br * &a - &br * target as f64).amax()
                        } else {
                            br.amax()
                        };
                        worst = worst.max(defect);
                    }
                }
            }
        }
        worst
    }
}

/// Eigenspaces of `ad_A` on `so(1, n+1)` for eigenvalues `−1, 0, 1`.
pub fn grade_so(frame: &MinkowskiFrame) -> SoGrading {
    let so = MatrixAlgebra::so(*frame);
    let dec = eigenspace_decompose_element(&so, &frame.grading_element()).expect("ad_A is diagonalizable");
    let pick = |mu: f64| -> Vec<DMatrix<f64>> {
        dec.component(mu)
            .map(|c| {
                c.basis
                    .iter()
                    .map(|v| so.element(&DVector::from_column_slice(v)))
                    .collect()
            })
            .unwrap_or_default()
    };
    SoGrading {
        minus: pick(-1.0),
        zero: pick(0.0),
        plus: pick(1.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaBranch {
    /// `α ∈ {1/2, 1, 2}`
    Special,
    ConformallyFlat,
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaSpectrum {
    pub alpha: f64,
    /// `(value, multiplicity)`, ascending, coincidences merged.
    pub values: Vec<(f64, usize)>,
    pub branch: SigmaBranch,
}

impl SigmaSpectrum {
    pub fn is_special(&self) -> bool {
        self.branch == SigmaBranch::Special
    }

    pub fn distinct(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.0).collect()
    }
}

const SPECIAL_ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];

/// The multiset `{−1, 0, 1, α−1, α, α+1}`.
pub fn sigma_b_spectrum(alpha: f64) -> SigmaSpectrum {
    let mut raw = vec![-1.0, 0.0, 1.0, alpha - 1.0, alpha, alpha + 1.0];
    raw.sort_by(f64::total_cmp);
    let mut values: Vec<(f64, usize)> = Vec::new();
    for v in raw {
        match values.last_mut() {
            Some((w, k)) if (v - *w).abs() <= 1e-12 * v.abs().max(1.0) => *k += 1,
            _ => values.push((v, 1)),
        }
    }
    let special = SPECIAL_ALPHAS.iter().any(|s| (alpha - s).abs() <= 1e-12);
    SigmaSpectrum {
        alpha,
        values,
        branch: if special {
            SigmaBranch::Special
        } else {
            SigmaBranch::ConformallyFlat
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn so_grading_dims() {
        for n in 1..=5 {
            let f = MinkowskiFrame::new(n + 2).unwrap();
            let g = grade_so(&f);
            assert_eq!(g.dims(), (n, 1 + n * (n - 1) / 2, n), "n = {n}");
            assert!(g.bracket_residual(&f) < 1e-10);
        }
    }

    #[test]
    fn abelian_zero_derivation() {
        let dec = eigenspace_decompose(&LieAlgebra::abelian(3), &DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(dec.spectrum, vec![(0.0, 3)]);
        assert_eq!(dec.total_dim(), 3);
    }

    #[test]
    fn complex_spectrum_flagged() {
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(matches!(
            eigenspace_decompose(&LieAlgebra::abelian(2), &rot),
            Err(Error::ComplexSpectrum { .. })
        ));
    }

    #[test]
    fn sigma_merges() {
        let s = sigma_b_spectrum(2.0);
        assert_eq!(s.distinct(), vec![-1.0, 0.0, 1.0, 2.0, 3.0]);
        assert!(s.is_special());
        let s = sigma_b_spectrum(7.0);
        assert_eq!(s.values.len(), 6);
        assert_eq!(s.branch, SigmaBranch::ConformallyFlat);
    }
}
