//! Independent oracles: central finite differences on metric values only.
#![allow(dead_code)]

use confwave::geometry::{Chart, MetricField, Signature};
use confwave::liealg::{invariance_defect, MinkowskiFrame};
use nalgebra::{DMatrix, DVector};
use ndarray::{Array3, Array4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `∂_i g` and `∂_i∂_j g` by central differences.
pub fn metric_derivatives(g: &MetricField, p: &[f64], h: f64) -> (DMatrix<f64>, Vec<DMatrix<f64>>, Vec<Vec<DMatrix<f64>>>) {
    let d = g.dim();
    let at = |shift: &[(usize, f64)]| {
        let mut q = p.to_vec();
        for &(i, s) in shift {
            q[i] += s;
        }
        g.matrix_at(&q).unwrap()
    };
    let g0 = at(&[]);
    let dg: Vec<DMatrix<f64>> = (0..d).map(|i| (at(&[(i, h)]) - at(&[(i, -h)])) / (2.0 * h)).collect();
    let mut ddg = vec![vec![DMatrix::zeros(d, d); d]; d];
    for i in 0..d {
        for j in 0..d {
            ddg[i][j] = if i == j {
                (at(&[(i, h)]) - &g0 * 2.0 + at(&[(i, -h)])) / (h * h)
            } else {
                (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)]) + at(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h)
            };
        }
    }
    (g0, dg, ddg)
}

/// `Γ^k_ij` and `R_ijkl = g(R(∂_i, ∂_j)∂_k, ∂_l)` from finite-difference
/// metric derivatives, with
/// `R(∂_i,∂_j)∂_k = (∂_iΓ^m_jk − ∂_jΓ^m_ik + Γ^p_jk Γ^m_ip − Γ^p_ik Γ^m_jp) ∂_m`.
pub fn fd_curvature(g: &MetricField, p: &[f64], h: f64) -> (Array3<f64>, Array4<f64>) {
    let d = g.dim();
    let (g0, dg, ddg) = metric_derivatives(g, p, h);
    let gi = g0.clone().try_inverse().unwrap();
    // lowered Γ_qjk and its derivative ∂_i Γ_qjk
    let low = |q: usize, j: usize, k: usize| 0.5 * (dg[j][(q, k)] + dg[k][(q, j)] - dg[q][(j, k)]);
    let dlow = |i: usize, q: usize, j: usize, k: usize| 0.5 * (ddg[i][j][(q, k)] + ddg[i][k][(q, j)] - ddg[i][q][(j, k)]);
    let mut gamma = Array3::zeros((d, d, d));
    for m in 0..d {
        for j in 0..d {
            for k in 0..d {
                gamma[[m, j, k]] = (0..d).map(|q| gi[(m, q)] * low(q, j, k)).sum::<f64>();
            }
        }
    }
    // ∂_i g^{-1} = −g^{-1} (∂_i g) g^{-1}
    let dgi: Vec<DMatrix<f64>> = (0..d).map(|i| -(&gi * &dg[i] * &gi)).collect();
    let dgamma = |i: usize, m: usize, j: usize, k: usize| {
        (0..d)
            .map(|q| dgi[i][(m, q)] * low(q, j, k) + gi[(m, q)] * dlow(i, q, j, k))
            .sum::<f64>()
    };
    let mut r = Array4::zeros((d, d, d, d));
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut up = vec![0.0; d];
                for (m, slot) in up.iter_mut().enumerate() {
                    let mut s = dgamma(i, m, j, k) - dgamma(j, m, i, k);
                    for q in 0..d {
                        s += gamma[[q, j, k]] * gamma[[m, i, q]] - gamma[[q, i, k]] * gamma[[m, j, q]];
                    }
                    *slot = s;
                }
                for l in 0..d {
                    r[[i, j, k, l]] = (0..d).map(|m| g0[(l, m)] * up[m]).sum::<f64>();
                }
            }
        }
    }
    (gamma, r)
}

/// Gradient and Hessian of `f` by central differences.
pub fn fd_derivatives(f: impl Fn(&[f64]) -> f64, p: &[f64], h: f64) -> (Vec<f64>, DMatrix<f64>) {
    let d = p.len();
    let at = |shift: &[(usize, f64)]| {
        let mut q = p.to_vec();
        for &(i, s) in shift {
            q[i] += s;
        }
        f(&q)
    };
    let f0 = at(&[]);
    let grad = (0..d).map(|i| (at(&[(i, h)]) - at(&[(i, -h)])) / (2.0 * h)).collect();
    let hess = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            (at(&[(i, h)]) - 2.0 * f0 + at(&[(i, -h)])) / (h * h)
        } else {
            (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)]) + at(&[(i, -h), (j, -h)]))
                / (4.0 * h * h)
        }
    });
    (grad, hess)
}

/// A Lorentzian metric `diag(−1, 1, …) + ε·(analytic perturbation)` on
/// `x0, …`, with entries built from sin, cos, exp and polynomials.
pub fn random_analytic_metric(dim: usize, seed: u64) -> MetricField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let term = |rng: &mut ChaCha8Rng| -> String {
        let a: f64 = rng.random_range(-0.1..0.1);
        let b: f64 = rng.random_range(-1.0..1.0);
        let i = rng.random_range(0..dim);
        let j = rng.random_range(0..dim);
        match rng.random_range(0..4) {
            0 => format!("{a}*sin({b}*x{i} + x{j})"),
            1 => format!("{a}*cos({b}*x{i})*x{j}"),
            2 => format!("{a}*exp({b}*x{i}*x{j})"),
            _ => format!("{a}*x{i}*x{j}"),
        }
    };
    let rows: Vec<Vec<String>> = (0..dim)
        .map(|i| {
            (i..dim)
                .map(|j| {
                    let base = match (i, j) {
                        (0, 0) => "-1",
                        (a, b) if a == b => "1",
                        _ => "0",
                    };
                    format!("{base} + {} + {}", term(&mut rng), term(&mut rng))
                })
                .collect()
        })
        .collect();
    MetricField::from_exprs(Chart::numbered(dim).unwrap(), &rows, Signature::lorentzian(dim)).unwrap()
}

/// Uniform random point in the cube `[−r, r]^dim`.
pub fn random_point(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-r..r)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff<'a>(a: impl Iterator<Item = &'a f64>, b: impl Iterator<Item = &'a f64>) -> f64 {
    a.zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn rotation(theta: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()])
}

pub fn block_diag(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for b in blocks {
        m.view_mut((k, k), (b.nrows(), b.ncols())).copy_from(b);
        k += b.nrows();
    }
    m
}

/// A random invertible matrix with a prescribed block structure, conjugated
/// by a well-conditioned random matrix.
pub fn random_structured(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = rng.random_range(1..=8usize);
    if rng.random_bool(0.5) {
        // dense: generically diagonalizable
        loop {
            let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0f64..1.0));
            if m.determinant().abs() > 1e-2 {
                return m;
            }
        }
    }
    let mut blocks = Vec::new();
    let mut left = n;
    while left > 0 {
        let sign: f64 = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let lambda = sign * rng.random_range(0.3..2.0);
        if left >= 2 && rng.random_bool(0.3) {
            blocks.push(rotation(rng.random_range(0.2..3.0)) * lambda.abs());
            left -= 2;
        } else {
            let k = rng.random_range(1..=left.min(3));
            let mut jb = DMatrix::identity(k, k) * lambda;
            for i in 0..k - 1 {
                jb[(i, i + 1)] = 1.0;
            }
            blocks.push(jb);
            left -= k;
        }
    }
    let b0 = block_diag(&blocks);
    let p = DMatrix::identity(n, n) + DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.2..0.2));
    let pi = p.clone().try_inverse().unwrap();
    p * b0 * pi
}

pub fn normalize_line(v: &DVector<f64>) -> DVector<f64> {
    let u = v.normalize();
    let k = u.iter().position(|c| c.abs() > 1e-8).unwrap();
    &u / u[k]
}

/// Brute force: every null eigenvector of every basis matrix, filtered by
/// joint invariance. Requires one basis matrix whose real eigenspaces have
/// dimension at most 2 or definite, so the candidate list is complete.
pub fn oracle_lines(basis: &[DMatrix<f64>], frame: &MinkowskiFrame) -> Vec<DVector<f64>> {
    let g = frame.form();
    let q = |v: &DVector<f64>| (v.transpose() * &g * v)[0];
    let d = frame.dim();
    let mut candidates = Vec::new();
    let mut complete = false;
    for x in basis {
        let mut ok = true;
        let mut seen: Vec<f64> = Vec::new();
        for ev in x.complex_eigenvalues().iter() {
            if ev.im.abs() > 1e-7 || seen.iter().any(|s| (s - ev.re).abs() < 1e-6) {
                continue;
            }
            seen.push(ev.re);
            let shifted = x - DMatrix::identity(d, d) * ev.re;
            let svd = shifted.svd(false, true);
            let vt = svd.v_t.unwrap();
            let kernel: Vec<DVector<f64>> = (0..d)
                .filter(|&k| svd.singular_values[k] < 1e-7 * x.amax().max(1.0))
                .map(|k| vt.row(k).transpose())
                .collect();
            match kernel.len() {
                1 => candidates.push(kernel[0].clone()),
                2 => {
                    // null directions a·u + w and u in the plane
                    let (u, w) = (&kernel[0], &kernel[1]);
                    let (a, b, c) = (q(u), 2.0 * (u.transpose() * &g * w)[0], q(w));
                    candidates.push(u.clone());
                    if a.abs() > 1e-12 {
                        let mut disc = b * b - 4.0 * a * c;
                        // tangent: a double root
                        if disc.abs() <= 1e-10 * (b * b + (a * c).abs()) {
                            disc = 0.0;
                        }
                        if disc >= 0.0 {
                            let s = disc.sqrt();
                            for t in [(-b + s) / (2.0 * a), (-b - s) / (2.0 * a)] {
                                candidates.push(u * t + w);
                            }
                        }
                    } else if b.abs() > 1e-12 {
                        candidates.push(u * (-c / b) + w);
                    }
                }
                // a definite eigenspace holds no null lines
                k if k >= 3 => {
                    let basis = DMatrix::from_columns(&kernel);
                    let restricted = basis.transpose() * &g * &basis;
                    let eig = restricted.symmetric_eigen().eigenvalues;
                    let definite = eig.iter().all(|&l| l > 1e-9) || eig.iter().all(|&l| l < -1e-9);
                    ok &= definite;
                }
                _ => {}
            }
        }
        complete |= ok;
    }
    assert!(complete, "oracle needs a basis matrix with small eigenspaces");
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in candidates {
        let u = v.normalize();
        if q(&u).abs() < 1e-8 && invariance_defect(&u, basis) < 1e-8 {
            let line = normalize_line(&u);
            if !out.iter().any(|w| (w - &line).amax() < 1e-4) {
                out.push(line);
            }
        }
    }
    out
}

pub fn random_lorentz(frame: &MinkowskiFrame, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let basis = frame.so_basis();
    let x = basis
        .iter()
        .fold(DMatrix::zeros(frame.dim(), frame.dim()), |acc, b| acc + b * rng.random_range(-0.5..0.5));
    x.exp()
}
