//! Null lines stabilized by a set of matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::frame::MinkowskiFrame;
use super::jordan::spectral_clusters;
use crate::error::{Error, Result};

/// `|G(v, v)|` and the joint-invariance defect for unit `v`.
pub const NULL_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-9;
/// Looser clustering than the Jordan code: a random combination of
/// structured matrices is often defective, which spreads computed eigenvalues.
const COMBO_CLUSTER_TOL: f64 = 1e-5;
const RUNS: u64 = 3;

fn orthonormal_null_space(m: &DMatrix<f64>, scale: f64) -> DMatrix<f64> {
    let cols = m.ncols();
    // pad so the SVD returns a full set of right singular vectors
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.rows_mut(0, m.nrows()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let kept: Vec<_> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= RANK_TOL * scale)
        .map(|k| vt.row(k).transpose())
        .collect();
    if kept.is_empty() {
        DMatrix::zeros(cols, 0)
    } else {
        DMatrix::from_columns(&kept)
    }
}

/// Largest subspace of `span(u)` (orthonormal columns) invariant under all `ops`.
fn invariant_core(u: DMatrix<f64>, ops: &[DMatrix<f64>], scale: f64) -> DMatrix<f64> {
    let d = u.nrows();
    let mut u = u;
    loop {
        let k = u.ncols();
        if k == 0 {
            return u;
        }
        let out = DMatrix::identity(d, d) - &u * u.transpose();
        let mut stacked = DMatrix::zeros(d * ops.len(), k);
        for (i, x) in ops.iter().enumerate() {
            stacked.rows_mut(i * d, d).copy_from(&(&out * x * &u));
        }
        let keep = orthonormal_null_space(&stacked, scale);
        if keep.ncols() == k {
            return u;
        }
        u = &u * keep;
    }
}

/// Null lines of the form restricted to `span(w)`; `Err` when there are
/// infinitely many.
fn null_lines_in(w: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<Vec<DVector<f64>>> {
    let k = w.ncols();
    let h = w.transpose() * g * w;
    let eig = SymmetricEigen::new(h);
    let tol = 1e-10;
    let zero: Vec<usize> = (0..k).filter(|&i| eig.eigenvalues[i].abs() <= tol).collect();
    let pos: Vec<usize> = (0..k).filter(|&i| eig.eigenvalues[i] > tol).collect();
    let neg: Vec<usize> = (0..k).filter(|&i| eig.eigenvalues[i] < -tol).collect();
    let infinite = || Err(Error::Invalid("the matrices stabilize infinitely many null lines".into()));
    let lift = |c: DVector<f64>| w * c;
    match (zero.len(), pos.len(), neg.len()) {
        (0, 0, _) | (0, _, 0) => Ok(vec![]),
        (1, 0, _) | (1, _, 0) => Ok(vec![lift(eig.eigenvectors.column(zero[0]).into_owned())]),
        (0, 1, 1) => {
            let (a, b) = (pos[0], neg[0]);
            let (la, lb) = (eig.eigenvalues[a], -eig.eigenvalues[b]);
            let ea = eig.eigenvectors.column(a) * lb.sqrt();
            let eb = eig.eigenvectors.column(b) * la.sqrt();
            Ok(vec![lift(&ea + &eb), lift(ea - eb)])
        }
        _ => infinite(),
    }
}

fn common_lines(
    w: DMatrix<f64>,
    ops: &[DMatrix<f64>],
    g: &DMatrix<f64>,
    scale: f64,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<DVector<f64>>,
) -> Result<()> {
    let k = w.ncols();
    if k == 0 {
        return Ok(());
    }
    let compressed: Vec<DMatrix<f64>> = ops.iter().map(|x| w.transpose() * x * &w).collect();
    let scalar = compressed.iter().all(|c| {
        let mean = c.trace() / k as f64;
        (c - DMatrix::identity(k, k) * mean).amax() <= RANK_TOL * scale
    });
    if scalar {
        out.extend(null_lines_in(&w, g)?);
        return Ok(());
    }
    for _attempt in 0..8 {
        let mut l = DMatrix::zeros(k, k);
        for c in &compressed {
            l += c * rng.random_range(-1.0..1.0);
        }
        let clusters = spectral_clusters(&l)?;
        // re-cluster loosely
        let mut reals: Vec<(f64, usize)> = Vec::new();
        for c in &clusters {
            if c.im.abs() > COMBO_CLUSTER_TOL * scale {
                continue;
            }
            match reals.iter_mut().find(|(r, _)| (r - c.re).abs() <= COMBO_CLUSTER_TOL * scale) {
                Some((r, m)) => {
                    *r = (*r * *m as f64 + c.re * c.multiplicity as f64) / (*m + c.multiplicity) as f64;
                    *m += c.multiplicity;
                }
                None => reals.push((c.re, c.multiplicity)),
            }
        }
        let spaces: Vec<DMatrix<f64>> = reals
            .iter()
            .map(|(lam, _)| {
                let shifted = &l - DMatrix::identity(k, k) * *lam;
                // defective clusters leave singular values near sqrt(eps)
                let e = orthonormal_null_space(&shifted, 1e3 * scale);
                &w * e
            })
            .collect();
        if spaces.iter().any(|e| e.ncols() >= k) {
            continue;
        }
        for e in spaces {
            let core = invariant_core(e, ops, scale);
            common_lines(core, ops, g, scale, rng, out)?;
        }
        return Ok(());
    }
    Err(Error::Invalid("could not separate the common eigenvectors".into()))
}

fn normalize(v: &DVector<f64>) -> Option<DVector<f64>> {
    let u = v.normalize();
    let first = u.iter().position(|c| c.abs() > 1e-10)?;
    Some(&u / u[first])
}

fn same_line(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    (a - b).amax() <= 1e-6 * a.amax().max(1.0)
}

/// Invariance defect `‖Xv − (vᵀXv) v‖` for unit `v`, maximized over `ops`.
pub fn invariance_defect(v: &DVector<f64>, ops: &[DMatrix<f64>]) -> f64 {
    let u = v.normalize();
    ops.iter()
        .map(|x| {
            let xv = x * &u;
            (&xv - &u * u.dot(&xv)).amax()
        })
        .fold(0.0, f64::max)
}

/// All null lines `ℝv` with `Xv ∈ ℝv` for every `X` in `matrices`.
/// Representatives have first nonzero coordinate `1` and are sorted by
/// coordinates. Three seeded random combinations are intersected.
pub fn invariant_null_lines(
    matrices: &[DMatrix<f64>],
    frame: &MinkowskiFrame,
    seed: u64,
) -> Result<Vec<DVector<f64>>> {
    let d = frame.dim();
    if matrices.is_empty() {
        return Err(Error::Invalid("no matrices given; every null line is invariant".into()));
    }
    for (i, x) in matrices.iter().enumerate() {
        if x.nrows() != d || x.ncols() != d {
            return Err(Error::DimensionMismatch(format!("matrix {i} is not {d}x{d}")));
        }
    }
    let g = frame.form();
    let scale = matrices.iter().fold(1.0f64, |a, x| a.max(x.amax()));
    let ops: Vec<DMatrix<f64>> = matrices.iter().map(|x| x / scale).collect();
    let mut runs: Vec<Vec<DVector<f64>>> = Vec::new();
    for r in 0..RUNS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r));
        let mut found = Vec::new();
        common_lines(DMatrix::identity(d, d), &ops, &g, 1.0, &mut rng, &mut found)?;
        let mut lines: Vec<DVector<f64>> = Vec::new();
        for v in found.iter().filter_map(normalize) {
            let u = v.normalize();
            let null = (u.transpose() * &g * &u)[0].abs() <= NULL_TOL;
            if null && invariance_defect(&v, &ops) <= NULL_TOL && !lines.iter().any(|w| same_line(w, &v)) {
                lines.push(v);
            }
        }
        runs.push(lines);
    }
    let mut out: Vec<DVector<f64>> = runs[0]
        .iter()
        .filter(|v| runs[1..].iter().all(|r| r.iter().any(|w| same_line(v, w))))
        .cloned()
        .collect();
    out.sort_by(|a, b| {
        let ka = a.iter().position(|c| c.abs() > 1e-10);
        let kb = b.iter().position(|c| c.abs() > 1e-10);
        ka.cmp(&kb).then_with(|| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::grade_so;

    #[test]
    fn grading_element_has_two_lines() {
        let f = MinkowskiFrame::new(4).unwrap();
        let lines = invariant_null_lines(&[f.grading_element()], &f, 42).unwrap();
        assert_eq!(lines.len(), 2);
        assert!((&lines[0] - DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])).amax() < 1e-12);
        assert!((&lines[1] - DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0])).amax() < 1e-12);
    }

    #[test]
    fn parabolic_and_full() {
        for n in 1..=4 {
            let f = MinkowskiFrame::new(n + 2).unwrap();
            let gr = grade_so(&f);
            let lines = invariant_null_lines(&gr.parabolic_plus(), &f, 42).unwrap();
            assert_eq!(lines.len(), 1, "n = {n}");
            assert!((lines[0][0] - 1.0).abs() < 1e-12 && lines[0].rows(1, n + 1).amax() < 1e-9);
            assert!(invariant_null_lines(&f.so_basis(), &f, 42).unwrap().is_empty());
        }
    }

    #[test]
    fn zero_matrix_has_infinitely_many() {
        let f = MinkowskiFrame::new(3).unwrap();
        assert!(invariant_null_lines(&[DMatrix::zeros(3, 3)], &f, 1).is_err());
        assert!(invariant_null_lines(&[], &f, 1).is_err());
    }
}
