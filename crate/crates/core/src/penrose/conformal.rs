//! Penrose limits of conformally related metrics.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use super::adapted::{validate_adapted, AdaptedMetric};
use super::rosen::{penrose_limit, RosenWave};
use crate::error::{Error, Result};
use crate::smoothfield::{Jet, JetKernel, SmoothField};

pub const CONFORMAL_TOL: f64 = 1e-8;
pub const INVERSE_TOL: f64 = 1e-9;
const ROOT_TOL: f64 = 1e-12;
const PANEL: f64 = 0.25;

// 8-point Gauss–Legendre rule on [−1, 1]
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// `f(u, v, x) = ∫_0^u K(s, v, x) ds`.
#[derive(Debug)]
struct Primitive {
    k: SmoothField,
}

impl Primitive {
    /// `∫_0^u` of the jets of `K` in the `(v, x)` directions.
    fn transverse_integral(&self, p: &[f64], order: usize) -> Result<Vec<f64>> {
        let u = p[0];
        let panels = ((u.abs() / PANEL).ceil() as usize).max(1);
        let h = u / panels as f64;
        let mut acc: Option<Vec<f64>> = None;
        let mut q = p.to_vec();
        for k in 0..panels {
            let mid = h * (k as f64 + 0.5);
            for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                for s in [mid - 0.5 * h * x, mid + 0.5 * h * x] {
                    q[0] = s;
                    let jet = self.k.eval_jet(&q, order)?;
                    let a = acc.get_or_insert_with(|| vec![0.0; jet.coeffs().len()]);
                    for (dst, c) in a.iter_mut().zip(jet.coeffs()) {
                        *dst += 0.5 * h * w * c;
                    }
                }
            }
        }
        Ok(acc.expect("at least one panel"))
    }
}

impl JetKernel for Primitive {
    fn num_vars(&self) -> usize {
        self.k.num_vars()
    }

    fn jet(&self, p: &[f64], order: usize) -> Result<Jet> {
        let d = self.num_vars();
        let integral = self.transverse_integral(p, order)?;
        let kjet = if order > 0 {
            Some(self.k.eval_jet(p, order - 1)?)
        } else {
            None
        };
        let mut out = Jet::zeros(d, order);
        let indices = out.table().indices().to_vec();
        for (slot, alpha) in indices.iter().enumerate() {
            out.coeffs_mut()[slot] = if alpha[0] == 0 {
                integral[slot]
            } else {
                let mut beta = alpha.clone();
                beta[0] -= 1;
                kjet.as_ref().expect("order ≥ 1").coeff(&beta) / alpha[0] as f64
            };
        }
        Ok(out)
    }
}

/// `h` with `f(h(u, v, x), v, x) = u`.
#[derive(Debug)]
struct Inverse {
    f: SmoothField,
    k: SmoothField,
}

impl Inverse {
    fn root(&self, p: &[f64]) -> Result<f64> {
        let target = p[0];
        let mut q = p.to_vec();
        let mut eval = |s: f64| -> Result<f64> {
            q[0] = s;
            Ok(self.f.eval(&q)? - target)
        };
        // f(0) = 0 and f is increasing
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        let mut step = target.abs().max(1.0);
        let mut tries = 0;
        if target > 0.0 {
            while eval(hi)? < 0.0 {
                lo = hi;
                hi += step;
                step *= 2.0;
                tries += 1;
                if tries > 60 {
                    return Err(Error::RootFinding(format!("no bracket for h at {p:?}")));
                }
            }
        } else if target < 0.0 {
            while eval(lo)? > 0.0 {
                hi = lo;
                lo -= step;
                step *= 2.0;
                tries += 1;
                if tries > 60 {
                    return Err(Error::RootFinding(format!("no bracket for h at {p:?}")));
                }
            }
        } else {
            return Ok(0.0);
        }
        while hi - lo > 1e-3 * (1.0 + lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if eval(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut s = 0.5 * (lo + hi);
        let mut kq = p.to_vec();
        for _ in 0..50 {
            kq[0] = s;
            let slope = self.k.eval(&kq)?;
            if !(slope > 0.0) {
                return Err(Error::RootFinding(format!("K = {slope} is not positive at {kq:?}")));
            }
            let ds = eval(s)? / slope;
            s -= ds;
            if ds.abs() <= ROOT_TOL * s.abs().max(1.0) {
                return Ok(s);
            }
        }
        Err(Error::RootFinding(format!("Newton iteration for h did not converge at {p:?}")))
    }
}

impl JetKernel for Inverse {
    fn num_vars(&self) -> usize {
        self.f.num_vars()
    }

    fn jet(&self, p: &[f64], order: usize) -> Result<Jet> {
        let d = self.num_vars();
        let h0 = self.root(p)?;
        let mut base = p.to_vec();
        base[0] = h0;
        let fjet = self.f.eval_jet(&base, order)?;
        let slope = fjet.coeff(&unit(d, 0));
        let u = Jet::variable(0, p[0], d, order);
        let mut inner: Vec<Jet> = (0..d).map(|i| Jet::variable(i, p[i], d, order)).collect();
        inner[0] = Jet::constant(h0, d, order);
        // each Newton pass fixes one more order of the implicit function
        for _ in 0..=order {
            let residual = &Jet::compose(&fjet, &inner) - &u;
            let mut next = &inner[0] - &residual.scale(1.0 / slope);
            next.coeffs_mut()[0] = h0;
            inner[0] = next;
        }
        Ok(inner.swap_remove(0))
    }
}

fn unit(d: usize, i: usize) -> Vec<u8> {
    let mut a = vec![0u8; d];
    a[i] = 1;
    a
}

/// The change of coordinates bringing `e^σ g` back to adapted form.
#[derive(Debug, Clone)]
pub struct ConformalChange {
    pub sigma: SmoothField,
    /// `K = e^σ`
    pub k: SmoothField,
    /// `∂f/∂u = K`, `f(0, v, x) = 0`
    pub f: SmoothField,
    /// Inverse of `f` in `u`.
    pub h: SmoothField,
    /// `G(u, v, x) = (h, v, x)`
    pub g_map: Vec<SmoothField>,
    /// `φ(u, v, x) = (f(u, 0, 0), v, x)`
    pub phi: Vec<SmoothField>,
}

impl ConformalChange {
    pub fn new(sigma: &SmoothField) -> ConformalChange {
        let d = sigma.num_vars();
        let k = sigma.exp();
        let f = SmoothField::ode(Arc::new(Primitive { k: k.clone() }));
        let h = SmoothField::ode(Arc::new(Inverse {
            f: f.clone(),
            k: k.clone(),
        }));
        let coords: Vec<SmoothField> = (0..d).map(|i| SmoothField::coordinate(i, d)).collect();
        let mut g_map = coords.clone();
        g_map[0] = h.clone();
        let mut on_geodesic = vec![SmoothField::coordinate(0, d)];
        on_geodesic.extend((1..d).map(|_| SmoothField::zero(d)));
        let mut phi = coords;
        phi[0] = f.compose(on_geodesic);
        ConformalChange {
            sigma: sigma.clone(),
            k,
            f,
            h,
            g_map,
            phi,
        }
    }

    /// `|f(h(p), v, x) − u|`.
    pub fn inverse_residual(&self, p: &[f64]) -> Result<f64> {
        let mut q = p.to_vec();
        q[0] = self.h.eval(p)?;
        Ok((self.f.eval(&q)? - p[0]).abs())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformalReport {
    /// Adapted-shape residual of `G^* g_σ`.
    pub shape_residual: f64,
    pub geodesic_residual: f64,
    /// `max |f(h(u, v, x), v, x) − u|`
    pub inverse_residual: f64,
    /// `max |C̄(u) − K(G(u,0,0)) c(G(u,0,0))|`
    pub formula_residual: f64,
    /// `max |φ^* PL_{g_σ} − K(u, 0, 0) PL_g|`
    pub pullback_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ConformalLimit {
    pub limit: RosenWave,
    pub limit_sigma: RosenWave,
    pub change: ConformalChange,
    pub pulled: AdaptedMetric,
    pub report: ConformalReport,
}

/// Builds `PL_{e^σ g}` by the coordinate change `G` and compares it with
/// `K(u, 0, 0)·PL_g` through `φ`.
pub fn penrose_of_conformal(am: &AdaptedMetric, sigma: &SmoothField) -> Result<ConformalLimit> {
    let g = am.metric();
    let d = g.dim();
    if sigma.num_vars() != d {
        return Err(Error::DimensionMismatch("σ must live on the adapted chart".into()));
    }
    let change = ConformalChange::new(sigma);
    for p in &am.probes {
        let k = change.k.eval(p)?;
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("K = e^σ = {k} at {p:?}")));
        }
    }
    let g_sigma = g.conformal(sigma)?;
    let pulled_metric = g_sigma.pullback(g.chart().clone(), &change.g_map)?;
    let pulled = validate_adapted(&pulled_metric, &am.probes)?;
    let limit = penrose_limit(am)?;
    let limit_sigma = penrose_limit(&pulled)?;

    let n = d - 2;
    let (mut inverse, mut formula, mut pullback) = (0.0f64, 0.0f64, 0.0f64);
    let phi_pl = limit_sigma.metric()?.pullback(g.chart().clone(), &change.phi)?;
    let pl = limit.metric()?;
    for p in &am.probes {
        inverse = inverse.max(change.inverse_residual(p)?);
        let mut on = vec![0.0; d];
        on[0] = p[0];
        let mut gp = on.clone();
        gp[0] = change.h.eval(&on)?;
        let kg = change.k.eval(&gp)?;
        let c_bar_sigma = limit_sigma.c_bar(p[0])?;
        let c_at = g.matrix_at(&gp)?;
        let expected = DMatrix::from_fn(n, n, |i, j| kg * c_at[(2 + i, 2 + j)]);
        formula = formula.max((c_bar_sigma - expected).amax());

        let k_on = change.k.eval(&on)?;
        let lhs = phi_pl.matrix_at(p)?;
        let rhs = pl.matrix_at(p)? * k_on;
        pullback = pullback.max((lhs - rhs).amax());
    }
    let report = ConformalReport {
        shape_residual: pulled.shape_residual,
        geodesic_residual: pulled.geodesic_residual,
        inverse_residual: inverse,
        formula_residual: formula,
        pullback_residual: pullback,
        tolerance: CONFORMAL_TOL,
        pass: inverse <= INVERSE_TOL && formula <= CONFORMAL_TOL && pullback <= CONFORMAL_TOL,
    };
    Ok(ConformalLimit {
        limit,
        limit_sigma,
        change,
        pulled,
        report,
    })
}
