//! Christoffel symbols, Riemann/Ricci/Weyl and `∇R` from metric jets.
//!
//! A metric jet of order `K` yields `g^{-1}` to order `K` (Neumann series
//! around the value), `Γ` to order `K−1` and Riemann to order `K−2`; with
//! `K = 3` the first-order part of the Riemann jet gives `∂R`.

use nalgebra::DMatrix;
use ndarray::{Array3, Array4, Array5};
use serde::Serialize;

use super::{MetricField, VectorField};
use crate::error::{Error, Result};
use crate::smoothfield::Jet;

/// Curvature quantities at one point (conventions in the module docs).
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureBundle {
    pub point: Vec<f64>,
    pub metric: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    /// `[k, i, j] = Γ^k_ij`
    pub christoffel: Array3<f64>,
    /// `[i, j, k, l] = R_ijkl`
    pub riemann: Array4<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    /// `[i, j, k, l] = W_ijkl`
    pub weyl: Array4<f64>,
    /// `[m, i, j, k, l] = (∇_m R)_ijkl`; absent when computed without gradient.
    pub nabla_riemann: Option<Array5<f64>>,
}

impl CurvatureBundle {
    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    /// `W_ijk^l`, the conformally invariant form of the Weyl tensor.
    pub fn weyl_mixed(&self) -> Array4<f64> {
        weyl_mixed(&self.weyl, &self.inverse)
    }

    pub fn max_abs_riemann(&self) -> f64 {
        max_abs(self.riemann.iter())
    }

    pub fn max_abs_weyl(&self) -> f64 {
        max_abs(self.weyl.iter())
    }

    /// Largest deviation from the pair symmetries and the first Bianchi
    /// identity, relative to `max |R|` (absolute when `R` vanishes).
    pub fn symmetry_residual(&self) -> f64 {
        let d = self.dim();
        let r = &self.riemann;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let v = r[[i, j, k, l]];
                        worst = worst
                            .max((v + r[[j, i, k, l]]).abs())
                            .max((v + r[[i, j, l, k]]).abs())
                            .max((v - r[[k, l, i, j]]).abs())
                            .max((v + r[[i, k, l, j]] + r[[i, l, j, k]]).abs());
                    }
                }
            }
        }
        worst / self.max_abs_riemann().max(1.0)
    }

    /// Largest trace `g^{ab} W` over any pair of slots.
    pub fn weyl_trace_residual(&self) -> f64 {
        let d = self.dim();
        let w = &self.weyl;
        let gi = &self.inverse;
        let mut worst = 0.0f64;
        let slots = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for &(s, t) in &slots {
            for x in 0..d {
                for y in 0..d {
                    let mut acc = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            let mut idx = [0usize; 4];
                            idx[s] = a;
                            idx[t] = b;
                            let free: Vec<usize> = (0..4).filter(|q| *q != s && *q != t).collect();
                            idx[free[0]] = x;
                            idx[free[1]] = y;
                            acc += gi[(a, b)] * w[idx];
                        }
                    }
                    worst = worst.max(acc.abs());
                }
            }
        }
        worst
    }

    /// Largest `(∇_m R)_ijkl + (∇_i R)_jmkl + (∇_j R)_mikl`.
    pub fn second_bianchi_residual(&self) -> Option<f64> {
        let n = self.nabla_riemann.as_ref()?;
        let d = self.dim();
        let mut worst = 0.0f64;
        for m in 0..d {
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let s = n[[m, i, j, k, l]] + n[[i, j, m, k, l]] + n[[j, m, i, k, l]];
                            worst = worst.max(s.abs());
                        }
                    }
                }
            }
        }
        Some(worst)
    }
}

fn max_abs<'a>(it: impl Iterator<Item = &'a f64>) -> f64 {
    it.fold(0.0f64, |a, &v| a.max(v.abs()))
}

/// `W_ijk^l = W_ijkm g^{ml}`.
pub fn weyl_mixed(weyl: &Array4<f64>, inverse: &DMatrix<f64>) -> Array4<f64> {
    let d = inverse.nrows();
    Array4::from_shape_fn((d, d, d, d), |(i, j, k, l)| {
        (0..d).map(|m| weyl[[i, j, k, m]] * inverse[(m, l)]).sum()
    })
}

/// `(h ⊙ k)_ijkl = h_il k_jk + h_jk k_il − h_ik k_jl − h_jl k_ik`.
pub fn kulkarni_nomizu(h: &DMatrix<f64>, k: &DMatrix<f64>) -> Array4<f64> {
    let d = h.nrows();
    Array4::from_shape_fn((d, d, d, d), |(i, j, a, l)| {
        h[(i, l)] * k[(j, a)] + h[(j, a)] * k[(i, l)] - h[(i, a)] * k[(j, l)] - h[(j, l)] * k[(i, a)]
    })
}

fn is_zero(j: &Jet) -> bool {
    j.coeffs().iter().all(|&c| c == 0.0)
}

fn invert_at(g0: &DMatrix<f64>, p: &[f64]) -> Result<DMatrix<f64>> {
    if super::signature_of(g0).is_none() {
        return Err(Error::SingularMetric { point: p.to_vec() });
    }
    g0.clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularMetric { point: p.to_vec() })
}

/// Jets of `g^{-1}` from `Σ_m (−G₀⁻¹ N)^m G₀⁻¹` with `N = g − G₀`.
fn inverse_jets(g: &[Jet], ginv0: &DMatrix<f64>, d: usize, order: usize) -> Vec<Jet> {
    let n: Vec<Jet> = g.iter().map(|j| j.add_scalar(-j.value())).collect();
    let mut m = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut acc = Jet::zeros(d, order);
            for k in 0..d {
                let c = ginv0[(a, k)];
                if c != 0.0 && !is_zero(&n[k * d + b]) {
                    acc = &acc - &n[k * d + b].scale(c);
                }
            }
            m.push(acc);
        }
    }
    let base: Vec<Jet> = (0..d * d)
        .map(|idx| Jet::constant(ginv0[(idx / d, idx % d)], d, order))
        .collect();
    let mut x = base.clone();
    for _ in 0..order {
        let mut next = base.clone();
        for a in 0..d {
            for b in 0..d {
                for k in 0..d {
                    if is_zero(&m[a * d + k]) || is_zero(&x[k * d + b]) {
                        continue;
                    }
                    next[a * d + b] = &next[a * d + b] + &(&m[a * d + k] * &x[k * d + b]);
                }
            }
        }
        x = next;
    }
    x
}

/// Metric value, inverse and Christoffel jets of order `order − 1`.
struct Connection {
    d: usize,
    g0: DMatrix<f64>,
    ginv0: DMatrix<f64>,
    metric: Vec<Jet>,
    /// `gamma[k*d*d + i*d + j] = Γ^k_ij`
    gamma: Vec<Jet>,
}

impl Connection {
    fn new(g: &MetricField, p: &[f64], order: usize) -> Result<Connection> {
        let d = g.dim();
        let metric = g.jets_at(p, order)?;
        let g0 = DMatrix::from_fn(d, d, |i, j| metric[i * d + j].value());
        let ginv0 = invert_at(&g0, p)?;
        let ginv = inverse_jets(&metric, &ginv0, d, order);
        let dg: Vec<Vec<Jet>> = (0..d)
            .map(|v| metric.iter().map(|j| j.partial(v)).collect())
            .collect();
        // lower[l*d*d + i*d + j] = Γ_{l,ij}
        let mut lower = Vec::with_capacity(d * d * d);
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let s = &(&dg[i][j * d + l] + &dg[j][i * d + l]) - &dg[l][i * d + j];
                    lower.push(s.scale(0.5));
                }
            }
        }
        let ginv_t: Vec<Jet> = ginv.iter().map(|j| j.truncate(order - 1)).collect();
        let mut gamma = vec![Jet::zeros(d, order - 1); d * d * d];
        for k in 0..d {
            for i in 0..d {
                for j in i..d {
                    let mut acc = Jet::zeros(d, order - 1);
                    for l in 0..d {
                        let a = &ginv_t[k * d + l];
                        let b = &lower[l * d * d + i * d + j];
                        if is_zero(a) || is_zero(b) {
                            continue;
                        }
                        acc = &acc + &(a * b);
                    }
                    gamma[k * d * d + j * d + i] = acc.clone();
                    gamma[k * d * d + i * d + j] = acc;
                }
            }
        }
        Ok(Connection {
            d,
            g0,
            ginv0,
            metric,
            gamma,
        })
    }

    fn gamma_values(&self) -> Array3<f64> {
        let d = self.d;
        Array3::from_shape_fn((d, d, d), |(k, i, j)| self.gamma[k * d * d + i * d + j].value())
    }

    /// Jets of `R_ijkl` of order `order − 2`.
    fn riemann_jets(&self, order: usize) -> Vec<Jet> {
        let d = self.d;
        let r = order - 2;
        let gam = |k: usize, i: usize, j: usize| &self.gamma[k * d * d + i * d + j];
        let gt: Vec<Jet> = self.gamma.iter().map(|j| j.truncate(r)).collect();
        let gtr = |k: usize, i: usize, j: usize| &gt[k * d * d + i * d + j];
        // rm[m][i][j][k] = Rm^m_ijk, antisymmetric in (i, j)
        let mut rm = vec![Jet::zeros(d, r); d * d * d * d];
        let at = |m: usize, i: usize, j: usize, k: usize| ((m * d + i) * d + j) * d + k;
        for m in 0..d {
            for i in 0..d {
                for j in (i + 1)..d {
                    for k in 0..d {
                        let mut acc = &gam(m, j, k).partial(i) - &gam(m, i, k).partial(j);
                        for p in 0..d {
                            let (a, b) = (gtr(p, j, k), gtr(m, i, p));
                            if !is_zero(a) && !is_zero(b) {
                                acc = &acc + &(a * b);
                            }
                            let (a, b) = (gtr(p, i, k), gtr(m, j, p));
                            if !is_zero(a) && !is_zero(b) {
                                acc = &acc - &(a * b);
                            }
                        }
                        rm[at(m, j, i, k)] = -&acc;
                        rm[at(m, i, j, k)] = acc;
                    }
                }
            }
        }
        let gm: Vec<Jet> = self.metric.iter().map(|j| j.truncate(r)).collect();
        let mut out = vec![Jet::zeros(d, r); d * d * d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut acc = Jet::zeros(d, r);
                        for m in 0..d {
                            let (a, b) = (&rm[at(m, i, j, k)], &gm[m * d + l]);
                            if !is_zero(a) && !is_zero(b) {
                                acc = &acc + &(a * b);
                            }
                        }
                        out[at(i, j, k, l)] = acc;
                    }
                }
            }
        }
        out
    }
}

/// `Γ^k_ij` at `p` (array index `[k, i, j]`).
pub fn christoffel(g: &MetricField, p: &[f64]) -> Result<Array3<f64>> {
    Ok(Connection::new(g, p, 1)?.gamma_values())
}

/// `(∇_i X)^k = ∂_i X^k + Γ^k_ij X^j` at `p`, as the matrix `[i, k]`.
pub fn covariant_derivative(g: &MetricField, x: &VectorField, p: &[f64]) -> Result<DMatrix<f64>> {
    if x.dim() != g.dim() {
        return Err(Error::DimensionMismatch("vector field and metric on different charts".into()));
    }
    let d = g.dim();
    let gamma = christoffel(g, p)?;
    let xj = x.jets_at(p, 1)?;
    let grads: Vec<Vec<f64>> = xj.iter().map(Jet::gradient).collect();
    Ok(DMatrix::from_fn(d, d, |i, k| {
        grads[k][i] + (0..d).map(|j| gamma[[k, i, j]] * xj[j].value()).sum::<f64>()
    }))
}

fn assemble(g: &MetricField, p: &[f64], with_gradient: bool) -> Result<CurvatureBundle> {
    let order = if with_gradient { 3 } else { 2 };
    let conn = Connection::new(g, p, order)?;
    let d = conn.d;
    let rj = conn.riemann_jets(order);
    let riemann = Array4::from_shape_fn((d, d, d, d), |(i, j, k, l)| {
        rj[((i * d + j) * d + k) * d + l].value()
    });
    let gi = &conn.ginv0;
    let ricci = DMatrix::from_fn(d, d, |i, j| {
        let mut acc = 0.0;
        for k in 0..d {
            for l in 0..d {
                acc += gi[(k, l)] * riemann[[k, i, j, l]];
            }
        }
        acc
    });
    let scalar = gi.component_mul(&ricci).sum();
    let weyl = if d > 2 {
        let schouten = (&ricci - &conn.g0 * (scalar / (2.0 * (d as f64 - 1.0)))) / (d as f64 - 2.0);
        &riemann - &kulkarni_nomizu(&schouten, &conn.g0)
    } else {
        Array4::zeros((d, d, d, d))
    };
    let christoffel = conn.gamma_values();
    let nabla_riemann = with_gradient.then(|| {
        let grad: Vec<Vec<f64>> = rj.iter().map(Jet::gradient).collect();
        Array5::from_shape_fn((d, d, d, d, d), |(m, i, j, k, l)| {
            let mut v = grad[((i * d + j) * d + k) * d + l][m];
            for q in 0..d {
                v -= christoffel[[q, m, i]] * riemann[[q, j, k, l]]
                    + christoffel[[q, m, j]] * riemann[[i, q, k, l]]
                    + christoffel[[q, m, k]] * riemann[[i, j, q, l]]
                    + christoffel[[q, m, l]] * riemann[[i, j, k, q]];
            }
            v
        })
    });
    Ok(CurvatureBundle {
        point: p.to_vec(),
        metric: conn.g0,
        inverse: conn.ginv0,
        christoffel,
        riemann,
        ricci,
        scalar,
        weyl,
        nabla_riemann,
    })
}

/// Full bundle including `∇R` (needs third metric derivatives).
pub fn curvature(g: &MetricField, p: &[f64]) -> Result<CurvatureBundle> {
    assemble(g, p, true)
}

/// Bundle without `∇R`; needs only second metric derivatives.
pub fn curvature_without_gradient(g: &MetricField, p: &[f64]) -> Result<CurvatureBundle> {
    assemble(g, p, false)
}

/// Outcome of the probe-based conformal flatness test.
#[derive(Debug, Clone, Serialize)]
pub struct FlatnessReport {
    /// `max |W_ijkl|` per probe.
    pub per_point: Vec<f64>,
    pub max_weyl: f64,
    pub tolerance: f64,
    pub conformally_flat: bool,
}

/// Decides conformal flatness by `max |W_ijkl|` over the probes.
pub fn conformal_flatness(g: &MetricField, probes: &[Vec<f64>], tolerance: f64) -> Result<FlatnessReport> {
    let per_point = probes
        .iter()
        .map(|p| Ok(curvature_without_gradient(g, p)?.max_abs_weyl()))
        .collect::<Result<Vec<f64>>>()?;
    let max_weyl = per_point.iter().cloned().fold(0.0, f64::max);
    Ok(FlatnessReport {
        per_point,
        max_weyl,
        tolerance,
        conformally_flat: max_weyl < tolerance,
    })
}
