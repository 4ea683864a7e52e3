//! Rosen plane waves, the Penrose limit along the central geodesic, the
//! rescaling ladder, and the Brinkmann-to-Rosen conversion.

use nalgebra::DMatrix;
use serde::Serialize;

use super::adapted::{positive_definite, AdaptedMetric};
use crate::error::{Error, Result};
use crate::geometry::{Chart, MetricField, Signature};
use crate::planewave::{solve_jacobi, PlaneWaveSpec};
use crate::smoothfield::SmoothField;

const PROFILE_SAMPLES: usize = 21;

/// `2 du dv + c̄_ij(u) dx_i dx_j`.
#[derive(Debug, Clone)]
pub struct RosenWave {
    n: usize,
    /// Univariate fields in `u`, full symmetric matrix.
    profile: Vec<Vec<SmoothField>>,
    domain: (f64, f64),
}

impl RosenWave {
    /// Checks symmetry and positive definiteness at sample points of `domain`.
    pub fn new(profile: Vec<Vec<SmoothField>>, domain: (f64, f64)) -> Result<RosenWave> {
        let n = profile.len();
        if n == 0 || profile.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("Rosen profile must be a nonempty square matrix".into()));
        }
        if profile.iter().flatten().any(|f| f.num_vars() != 1) {
            return Err(Error::DimensionMismatch("Rosen profile entries must be fields of u alone".into()));
        }
        if !(domain.0 <= domain.1) {
            return Err(Error::Invalid(format!("empty u-domain {domain:?}")));
        }
        let w = RosenWave { n, profile, domain };
        for u in w.sample_points(PROFILE_SAMPLES) {
            let c = w.c_bar(u)?;
            if (&c - c.transpose()).amax() > 1e-12 * c.amax().max(1.0) {
                return Err(Error::Invalid(format!("Rosen profile is not symmetric at u = {u}")));
            }
            if !positive_definite(&c) {
                return Err(Error::SingularMetric { point: vec![u] });
            }
        }
        Ok(w)
    }

    /// Entries are expressions in `u`.
    pub fn from_exprs<S: AsRef<str>>(rows: &[Vec<S>], domain: (f64, f64)) -> Result<RosenWave> {
        let profile = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| SmoothField::parse_named(s.as_ref(), 1, &["u"]))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        RosenWave::new(profile, domain)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn profile(&self) -> &[Vec<SmoothField>] {
        &self.profile
    }

    pub fn c_bar(&self, u: f64) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self.profile[i][j].eval(&[u])?;
            }
        }
        Ok(m)
    }

    pub fn sample_points(&self, count: usize) -> Vec<f64> {
        let (lo, hi) = self.domain;
        if count <= 1 || lo == hi {
            return vec![lo];
        }
        (0..count)
            .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
            .collect()
    }

    pub fn samples(&self, count: usize) -> Result<Vec<(f64, DMatrix<f64>)>> {
        self.sample_points(count)
            .into_iter()
            .map(|u| Ok((u, self.c_bar(u)?)))
            .collect()
    }

    /// The metric on `(u, v, x1..xn)`.
    pub fn metric(&self) -> Result<MetricField> {
        let d = self.n + 2;
        let chart = Chart::adapted(self.n)?;
        let rows = (0..d)
            .map(|i| {
                (i..d)
                    .map(|j| match (i, j) {
                        (0, 1) => SmoothField::constant(1.0, d),
                        (a, b) if a >= 2 => self.profile[a - 2][b - 2].lift(0, d),
                        _ => SmoothField::zero(d),
                    })
                    .collect()
            })
            .collect();
        MetricField::from_upper(chart, rows, Signature::lorentzian(d))
    }
}

/// `PL_g = 2 du dv + c_ij(u, 0, 0) dx_i dx_j` over the probes' `u`-range.
pub fn penrose_limit(am: &AdaptedMetric) -> Result<RosenWave> {
    let n = am.n();
    let d = n + 2;
    let mut on_geodesic = vec![SmoothField::coordinate(0, 1)];
    on_geodesic.extend((1..d).map(|_| SmoothField::zero(1)));
    let profile: Vec<Vec<SmoothField>> = (0..n)
        .map(|i| (0..n).map(|j| am.c(i, j).compose(on_geodesic.clone())).collect())
        .collect();
    for p in am.geodesic_points() {
        let c = DMatrix::from_fn(n, n, |i, j| profile[i][j].eval(&[p[0]]).unwrap_or(f64::NAN));
        if !positive_definite(&c) {
            return Err(Error::SingularMetric { point: p });
        }
    }
    RosenWave::new(profile, am.u_range())
}

#[derive(Debug, Clone, Serialize)]
pub struct RescaleRow {
    pub epsilon: f64,
    /// `max |(g_ε − PL_g)_{ij}|` over probes and components.
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RescaleTable {
    pub rows: Vec<RescaleRow>,
    /// `deviation(ε_{k+1}) / deviation(ε_k)`, absent when the former is zero.
    pub ratios: Vec<Option<f64>>,
    pub monotone: bool,
    /// Every deviation is exactly zero.
    pub fixed_point: bool,
    /// Largest ratio after the first step, which may be pre-asymptotic.
    pub asymptotic_ratio: f64,
    pub ratio_bound: f64,
    pub pass: bool,
}

pub const RATIO_BOUND: f64 = 0.6;

/// `ε = 1, 1/2, …, 2^{1−count}`.
pub fn default_ladder(count: usize) -> Vec<f64> {
    (0..count).map(|k| 0.5f64.powi(k as i32)).collect()
}

/// Sup-norm deviation of `g_ε = ε^{−2} Φ_ε^* g`, `Φ_ε(u,v,x) = (u, ε²v, εx)`,
/// from the Penrose limit at the adapted metric's probes.
pub fn rescale_convergence(am: &AdaptedMetric, epsilons: &[f64]) -> Result<RescaleTable> {
    let pl = penrose_limit(am)?;
    let g = am.metric();
    let d = g.dim();
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        if !(eps > 0.0) {
            return Err(Error::Invalid(format!("ε must be positive, got {eps}")));
        }
        // component scale factors s_i s_j / ε² with s = (1, ε², ε, …)
        let s: Vec<f64> = (0..d)
            .map(|i| match i {
                0 => 1.0,
                1 => eps * eps,
                _ => eps,
            })
            .collect();
        let mut dev = 0.0f64;
        for p in &am.probes {
            let q: Vec<f64> = p.iter().zip(&s).map(|(x, si)| x * si).collect();
            let m = g.matrix_at(&q).map_err(|e| match e {
                Error::Domain(msg) => Error::Domain(format!("Φ_ε with ε = {eps} leaves the domain: {msg}")),
                other => other,
            })?;
            let c = pl.c_bar(p[0])?;
            for i in 0..d {
                for j in i..d {
                    let ge = m[(i, j)] * (s[i] * s[j] / (eps * eps));
                    let target = match (i, j) {
                        (0, 1) => 1.0,
                        (a, b) if a >= 2 => c[(a - 2, b - 2)],
                        _ => 0.0,
                    };
                    dev = dev.max((ge - target).abs());
                }
            }
        }
        rows.push(RescaleRow {
            epsilon: eps,
            deviation: dev,
        });
    }
    let ratios: Vec<Option<f64>> = rows
        .windows(2)
        .map(|w| (w[0].deviation > 0.0).then(|| w[1].deviation / w[0].deviation))
        .collect();
    let monotone = rows.windows(2).all(|w| w[1].deviation <= w[0].deviation);
    let fixed_point = rows.iter().all(|r| r.deviation == 0.0);
    let asymptotic_ratio = ratios.iter().skip(1).flatten().cloned().fold(0.0, f64::max);
    Ok(RescaleTable {
        pass: fixed_point || (monotone && asymptotic_ratio <= RATIO_BOUND),
        rows,
        ratios,
        monotone,
        fixed_point,
        asymptotic_ratio,
        ratio_bound: RATIO_BOUND,
    })
}

/// Rosen form of a Brinkmann wave with the coordinate change back.
#[derive(Debug, Clone)]
pub struct RosenConversion {
    pub rosen: RosenWave,
    pub t0: f64,
    /// `(t, v_B, x)` as fields of the Rosen coordinates `(u, v, y)`:
    /// `t = u`, `x = E(u) y`, `v_B = v − ½ yᵀ E(u)ᵀE'(u) y`.
    pub map: Vec<SmoothField>,
    /// Smallest `det E` over the sampled window.
    pub min_det: f64,
}

pub const CONJUGATE_DET: f64 = 1e-6;
const DET_SAMPLES: usize = 401;

pub fn brinkmann_to_rosen(spec: &PlaneWaveSpec) -> Result<RosenConversion> {
    brinkmann_to_rosen_on(spec, spec.domain(), spec.default_t0())
}

/// `c̄ = EᵀE` with `E'' = QE`, `E(t0) = I`, `E'(t0) = 0` on `window`.
pub fn brinkmann_to_rosen_on(spec: &PlaneWaveSpec, window: (f64, f64), t0: f64) -> Result<RosenConversion> {
    let n = spec.n();
    let d = n + 2;
    if !(window.0 <= t0 && t0 <= window.1) {
        return Err(Error::Invalid(format!("base time {t0} outside the window {window:?}")));
    }
    let sols = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            solve_jacobi(spec, t0, &e, &vec![0.0; n])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut min_det = f64::INFINITY;
    // walk outward from t0 so the reported conjugate point is the nearest one
    let mut us: Vec<f64> = (0..DET_SAMPLES)
        .map(|k| window.0 + (window.1 - window.0) * k as f64 / (DET_SAMPLES - 1) as f64)
        .collect();
    us.sort_by(|a, b| (a - t0).abs().total_cmp(&(b - t0).abs()));
    for u in us {
        let mut e = DMatrix::zeros(n, n);
        for (i, s) in sols.iter().enumerate() {
            e.set_column(i, &s.state(u)?.0);
        }
        let det = e.determinant();
        if det < CONJUGATE_DET {
            return Err(Error::ConjugatePoint { u, det });
        }
        min_det = min_det.min(det);
    }
    // E_ki = sols[i].position_field(k), E'_ki = sols[i].velocity_field(k)
    let profile: Vec<Vec<SmoothField>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let terms = (0..n)
                        .map(|k| SmoothField::product(vec![sols[i].position_field(k), sols[j].position_field(k)], 1))
                        .collect();
                    SmoothField::sum(terms, 1)
                })
                .collect()
        })
        .collect();
    let rosen = RosenWave::new(profile, window)?;

    let u = SmoothField::coordinate(0, d);
    let y = |i: usize| SmoothField::coordinate(2 + i, d);
    let mut map = vec![u; d];
    for k in 0..n {
        let terms = (0..n)
            .map(|i| SmoothField::product(vec![sols[i].position_field(k).lift(0, d), y(i)], d))
            .collect();
        map[2 + k] = SmoothField::sum(terms, d);
    }
    let mut quad = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                quad.push(SmoothField::product(
                    vec![
                        sols[i].position_field(k).lift(0, d),
                        sols[j].velocity_field(k).lift(0, d),
                        y(i),
                        y(j),
                    ],
                    d,
                ));
            }
        }
    }
    map[1] = SmoothField::coordinate(1, d).sub(&SmoothField::sum(quad, d).scale(0.5));
    Ok(RosenConversion {
        rosen,
        t0,
        map,
        min_det,
    })
}
