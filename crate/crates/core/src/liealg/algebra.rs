//! Lie algebras by structure constants, and matrix algebras in `co(1, n+1)`.

use nalgebra::{DMatrix, DVector};
use ndarray::Array3;

use super::frame::MinkowskiFrame;
use crate::error::{Error, Result};

const STRUCTURE_TOL: f64 = 1e-9;
const MEMBERSHIP_TOL: f64 = 1e-10;

/// `[b_i, b_j] = Σ_k c[i, j, k] b_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    structure: Array3<f64>,
}

impl LieAlgebra {
    /// Checks antisymmetry and the Jacobi identity.
    pub fn new(structure: Array3<f64>) -> Result<LieAlgebra> {
        let (a, b, c) = structure.dim();
        if a != b || b != c {
            return Err(Error::DimensionMismatch("structure constants must be m×m×m".into()));
        }
        let alg = LieAlgebra { structure };
        let scale = alg.structure.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let anti = (0..a)
            .flat_map(|i| (0..a).flat_map(move |j| (0..a).map(move |k| (i, j, k))))
            .map(|(i, j, k)| (alg.structure[[i, j, k]] + alg.structure[[j, i, k]]).abs())
            .fold(0.0, f64::max);
        if anti > STRUCTURE_TOL * scale {
            return Err(Error::Invalid(format!("bracket is not antisymmetric (defect {anti:e})")));
        }
        let jac = alg.jacobi_defect();
        if jac > STRUCTURE_TOL * scale * scale {
            return Err(Error::Invalid(format!("Jacobi identity fails (defect {jac:e})")));
        }
        Ok(alg)
    }

    pub fn abelian(dim: usize) -> LieAlgebra {
        LieAlgebra {
            structure: Array3::zeros((dim, dim, dim)),
        }
    }

    /// Basis `z, e_1, …, e_m` with `[e_i, e_j] = w_ij z`; `w` antisymmetric.
    pub fn central_extension(w: &DMatrix<f64>) -> Result<LieAlgebra> {
        let m = w.nrows();
        let mut c = Array3::zeros((m + 1, m + 1, m + 1));
        for i in 0..m {
            for j in 0..m {
                c[[i + 1, j + 1, 0]] = w[(i, j)];
            }
        }
        LieAlgebra::new(c)
    }

    /// `heis(2n+1)`: basis `z, p_1..p_n, q_1..q_n` with `[p_i, q_i] = z`.
    pub fn heisenberg(n: usize) -> LieAlgebra {
        let mut w = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            w[(i, n + i)] = 1.0;
            w[(n + i, i)] = -1.0;
        }
        LieAlgebra::central_extension(&w).expect("canonical Heisenberg algebra")
    }

    pub fn dim(&self) -> usize {
        self.structure.dim().0
    }

    pub fn structure(&self) -> &Array3<f64> {
        &self.structure
    }

    pub fn bracket(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        let m = self.dim();
        let mut out = DVector::zeros(m);
        for i in 0..m {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                let s = a[i] * b[j];
                if s == 0.0 {
                    continue;
                }
                for k in 0..m {
                    out[k] += s * self.structure[[i, j, k]];
                }
            }
        }
        out
    }

    /// Matrix of `ad_x` in the basis.
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let m = self.dim();
        let mut out = DMatrix::zeros(m, m);
        for j in 0..m {
            let mut e = DVector::zeros(m);
            e[j] = 1.0;
            out.set_column(j, &self.bracket(x, &e));
        }
        out
    }

    fn jacobi_defect(&self) -> f64 {
        let m = self.dim();
        let e = |i: usize| {
            let mut v = DVector::zeros(m);
            v[i] = 1.0;
            v
        };
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in (i + 1)..m {
                let ij = self.bracket(&e(i), &e(j));
                for k in (j + 1)..m {
                    let jk = self.bracket(&e(j), &e(k));
                    let ki = self.bracket(&e(k), &e(i));
                    let s = self.bracket(&ij, &e(k)) + self.bracket(&jk, &e(i)) + self.bracket(&ki, &e(j));
                    worst = worst.max(s.amax());
                }
            }
        }
        worst
    }

    /// `max |D[a,b] − [Da,b] − [a,Db]|` over basis pairs.
    pub fn derivation_defect(&self, d: &DMatrix<f64>) -> f64 {
        let m = self.dim();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let (ei, ej) = (DVector::from_fn(m, |k, _| (k == i) as u8 as f64), DVector::from_fn(m, |k, _| (k == j) as u8 as f64));
                let lhs = d * self.bracket(&ei, &ej);
                let rhs = self.bracket(&(d * &ei), &ej) + self.bracket(&ei, &(d * &ej));
                worst = worst.max((lhs - rhs).amax());
            }
        }
        worst
    }
}

/// A subalgebra of `co(1, n+1)` given by a basis of matrices.
#[derive(Debug, Clone)]
pub struct MatrixAlgebra {
    frame: MinkowskiFrame,
    basis: Vec<DMatrix<f64>>,
    /// Columns are the flattened basis matrices.
    flat: DMatrix<f64>,
    pinv: DMatrix<f64>,
    lie: LieAlgebra,
}

impl MatrixAlgebra {
    pub fn new(frame: MinkowskiFrame, basis: Vec<DMatrix<f64>>) -> Result<MatrixAlgebra> {
        let d = frame.dim();
        if basis.is_empty() {
            return Err(Error::Invalid("empty basis".into()));
        }
        for (k, b) in basis.iter().enumerate() {
            if b.nrows() != d || b.ncols() != d {
                return Err(Error::DimensionMismatch(format!("basis matrix {k} is not {d}x{d}")));
            }
            let defect = frame.co_defect(b);
            if defect > MEMBERSHIP_TOL * b.amax().max(1.0) {
                return Err(Error::Invalid(format!(
                    "basis matrix {k} is not in co(1,{}) (defect {defect:e})",
                    d - 1
                )));
            }
        }
        let m = basis.len();
        let flat = DMatrix::from_fn(d * d, m, |r, c| basis[c][(r / d, r % d)]);
        let svd = flat.clone().svd(true, true);
        let smax = svd.singular_values.max();
        if svd.singular_values.iter().any(|&s| s <= 1e-10 * smax) {
            return Err(Error::Invalid("basis matrices are linearly dependent".into()));
        }
        let pinv = svd.pseudo_inverse(0.0).map_err(|e| Error::Invalid(e.to_string()))?;
        let mut c = Array3::zeros((m, m, m));
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let br = &basis[i] * &basis[j] - &basis[j] * &basis[i];
                let v = DVector::from_fn(d * d, |r, _| br[(r / d, r % d)]);
                let coords = &pinv * &v;
                worst = worst.max((&flat * &coords - &v).amax());
                for k in 0..m {
                    c[[i, j, k]] = coords[k];
                }
            }
        }
        let scale = basis.iter().fold(1.0f64, |a, b| a.max(b.amax()));
        if worst > STRUCTURE_TOL * scale * scale {
            return Err(Error::Invalid(format!("basis is not closed under brackets (residual {worst:e})")));
        }
        Ok(MatrixAlgebra {
            frame,
            basis,
            flat,
            pinv,
            lie: LieAlgebra::new(c)?,
        })
    }

    pub fn so(frame: MinkowskiFrame) -> MatrixAlgebra {
        MatrixAlgebra::new(frame, frame.so_basis()).expect("so(1,n+1) is a Lie algebra")
    }

    pub fn co(frame: MinkowskiFrame) -> MatrixAlgebra {
        MatrixAlgebra::new(frame, frame.co_basis()).expect("co(1,n+1) is a Lie algebra")
    }

    pub fn frame(&self) -> &MinkowskiFrame {
        &self.frame
    }

    pub fn basis(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn lie(&self) -> &LieAlgebra {
        &self.lie
    }

    /// Least-squares coordinates of `x` and the residual `max |x − Σ c_i b_i|`.
    pub fn coords(&self, x: &DMatrix<f64>) -> (DVector<f64>, f64) {
        let d = self.frame.dim();
        let v = DVector::from_fn(d * d, |r, _| x[(r / d, r % d)]);
        let c = &self.pinv * &v;
        let res = (&self.flat * &c - v).amax();
        (c, res)
    }

    pub fn element(&self, coords: &DVector<f64>) -> DMatrix<f64> {
        let d = self.frame.dim();
        let mut out = DMatrix::zeros(d, d);
        for (c, b) in coords.iter().zip(&self.basis) {
            out += b * *c;
        }
        out
    }

    /// Matrix of `X ↦ [B, X]` on the algebra; `B` must normalize it.
    pub fn derivation_of(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let m = self.dim();
        let mut out = DMatrix::zeros(m, m);
        let scale = b.amax().max(1.0);
        for (j, x) in self.basis.iter().enumerate() {
            let br = b * x - x * b;
            let (c, res) = self.coords(&br);
            if res > STRUCTURE_TOL * scale * x.amax().max(1.0) {
                return Err(Error::Invalid(format!(
                    "element does not normalize the algebra (residual {res:e})"
                )));
            }
            out.set_column(j, &c);
        }
        Ok(out)
    }
}
