//! The two Penrose limits of a plane wave: along `ξ` and transversal to it.

use nalgebra::DMatrix;
use ndarray::Array4;
use serde::Serialize;

use super::adapted::validate_adapted;
use super::rosen::{brinkmann_to_rosen, penrose_limit, RosenConversion, RosenWave};
use crate::error::Result;
use crate::geometry::{curvature, Chart, MetricField, Signature};
use crate::planewave::PlaneWaveSpec;
use crate::smoothfield::SmoothField;

pub const FLAT_LIMIT_TOL: f64 = 1e-9;
pub const SELF_LIMIT_TOL: f64 = 1e-6;

/// The Brinkmann wave in coordinates adapted to `s ↦ (t0, s, 0)`, the
/// integral curve of `ξ = ∂_v`: `(u, v, x) = (v_B, t − t0, x)`, so
/// `g = 2 du dv + xᵀQ(v + t0)x dv² + dx²`.
pub fn xi_adapted_metric(spec: &PlaneWaveSpec, t0: f64) -> Result<MetricField> {
    let n = spec.n();
    let d = n + 2;
    let shifted = vec![SmoothField::coordinate(1, d).add(&SmoothField::constant(t0, d))];
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            terms.push(SmoothField::product(
                vec![
                    spec.q_field(i, j).compose(shifted.clone()),
                    SmoothField::coordinate(2 + i, d),
                    SmoothField::coordinate(2 + j, d),
                ],
                d,
            ));
        }
    }
    let a = SmoothField::sum(terms, d);
    let rows = (0..d)
        .map(|i| {
            (i..d)
                .map(|j| match (i, j) {
                    (0, 1) => SmoothField::constant(1.0, d),
                    (1, 1) => a.clone(),
                    (a, b) if a == b && a >= 2 => SmoothField::constant(1.0, d),
                    _ => SmoothField::zero(d),
                })
                .collect()
        })
        .collect();
    MetricField::from_upper(Chart::adapted(n)?, rows, Signature::lorentzian(d))
}

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    /// `max |R|` of the limit along `ξ` at the probes.
    pub flat_limit_curvature: f64,
    /// `max |R_Rosen − J^*R_Brinkmann|` at the probes.
    pub self_limit_curvature_residual: f64,
    /// `max |PL − c̄|` between the transversal limit and the Rosen input.
    pub self_limit_profile_residual: f64,
    pub min_det: f64,
    pub probes: usize,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Dichotomy {
    pub flat_limit: RosenWave,
    pub self_limit: RosenWave,
    pub conversion: RosenConversion,
    pub report: DichotomyReport,
}

/// 20 probes: `u` across the window (5 values) times `v, x = ±1/2` corners,
/// with the `x` block along `(1, 1/2, …)`.
fn probes(window: (f64, f64), d: usize) -> Vec<Vec<f64>> {
    let inset = 0.05 * (window.1 - window.0);
    let (lo, hi) = (window.0 + inset, window.1 - inset);
    let mut out = Vec::new();
    for k in 0..5 {
        let u = lo + (hi - lo) * k as f64 / 4.0;
        for v in [-0.5, 0.5] {
            for s in [-0.5, 0.5] {
                let mut p = vec![u, v];
                p.extend((1..=d - 2).map(|i| s / i as f64));
                out.push(p);
            }
        }
    }
    out
}

/// `T'_{abcd} = J^μ_a J^ν_b J^ρ_c J^σ_d T_{μνρσ}`.
fn pull_tensor(t: &Array4<f64>, j: &DMatrix<f64>) -> Array4<f64> {
    let d = j.nrows();
    let mut cur = t.clone();
    for slot in 0..4 {
        let mut next = Array4::zeros((d, d, d, d));
        for idx in ndarray::indices((d, d, d, d)) {
            let (a, b, c, e) = idx;
            let mut k = [a, b, c, e];
            let target = k[slot];
            let mut s = 0.0;
            for m in 0..d {
                k[slot] = m;
                s += j[(m, target)] * cur[k];
            }
            next[[a, b, c, e]] = s;
        }
        cur = next;
    }
    cur
}

pub fn plane_wave_limit_dichotomy(spec: &PlaneWaveSpec) -> Result<Dichotomy> {
    let n = spec.n();
    let d = n + 2;
    let t0 = spec.default_t0();
    let domain = spec.domain();

    // along ξ: the adapted chart's u runs along ∂_v, v = t − t0
    let xi_metric = xi_adapted_metric(spec, t0)?;
    let xi_probes: Vec<Vec<f64>> = probes((-1.0, 1.0), d)
        .into_iter()
        .map(|mut p| {
            let span = (domain.1 - t0).min(t0 - domain.0);
            p[1] *= span;
            p
        })
        .collect();
    let am = validate_adapted(&xi_metric, &xi_probes)?;
    let flat_limit = penrose_limit(&am)?;
    let flat_metric = flat_limit.metric()?;
    let mut flat_curv = 0.0f64;
    for p in &xi_probes {
        flat_curv = flat_curv.max(curvature(&flat_metric, p)?.max_abs_riemann());
    }

    // transversal: Rosen form, then its own limit along (u, 0, 0)
    let conversion = brinkmann_to_rosen(spec)?;
    let rosen_metric = conversion.rosen.metric()?;
    let rosen_probes = probes(domain, d);
    let am = validate_adapted(&rosen_metric, &rosen_probes)?;
    let self_limit = penrose_limit(&am)?;
    let mut profile_res = 0.0f64;
    for p in &rosen_probes {
        profile_res = profile_res.max((self_limit.c_bar(p[0])? - conversion.rosen.c_bar(p[0])?).amax());
    }
    let brinkmann = spec.brinkmann_metric()?;
    let self_metric = self_limit.metric()?;
    let mut curv_res = 0.0f64;
    for p in &rosen_probes {
        let target: Vec<f64> = conversion.map.iter().map(|f| f.eval(p)).collect::<Result<_>>()?;
        let jac = DMatrix::from_fn(d, d, |mu, a| {
            conversion.map[mu].eval_jet(p, 1).map(|j| j.gradient()[a]).unwrap_or(f64::NAN)
        });
        let rb = curvature(&brinkmann, &target)?.riemann;
        let pulled = pull_tensor(&rb, &jac);
        let rr = curvature(&self_metric, p)?.riemann;
        let diff = (&rr - &pulled).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        curv_res = curv_res.max(if diff.is_nan() { f64::INFINITY } else { diff });
    }
    let report = DichotomyReport {
        flat_limit_curvature: flat_curv,
        self_limit_curvature_residual: curv_res,
        self_limit_profile_residual: profile_res,
        min_det: conversion.min_det,
        probes: rosen_probes.len(),
        pass: flat_curv < FLAT_LIMIT_TOL && curv_res < SELF_LIMIT_TOL && profile_res == 0.0,
    };
    Ok(Dichotomy {
        flat_limit,
        self_limit,
        conversion,
        report,
    })
}
