//! Metrics in coordinates adapted to the null geodesic `u ↦ (u, 0, 0)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{christoffel, signature_of, MetricField};
use crate::smoothfield::SmoothField;

pub const SHAPE_TOL: f64 = 1e-10;
pub const GEODESIC_TOL: f64 = 1e-7;

/// `g = 2 du dv + a dv² + 2 b_i dv dx_i + c_ij dx_i dx_j`, checked at probes.
#[derive(Debug, Clone, Serialize)]
pub struct AdaptedMetric {
    #[serde(skip)]
    metric: MetricField,
    pub probes: Vec<Vec<f64>>,
    /// `max(|g_uu|, |g_uv − 1|, |g_{u x_i}|)` over probes.
    pub shape_residual: f64,
    /// `max |Γ^k_uu(u, 0, 0)|` over the probes' `u` values.
    pub geodesic_residual: f64,
}

impl AdaptedMetric {
    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn n(&self) -> usize {
        self.metric.dim() - 2
    }

    pub fn a(&self) -> &SmoothField {
        self.metric.component(1, 1)
    }

    pub fn b(&self, i: usize) -> &SmoothField {
        self.metric.component(1, 2 + i)
    }

    pub fn c(&self, i: usize, j: usize) -> &SmoothField {
        self.metric.component(2 + i, 2 + j)
    }

    /// `u`-range covered by the probes.
    pub fn u_range(&self) -> (f64, f64) {
        self.probes
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])))
    }

    /// Central-geodesic points `(u, 0, 0)` for the distinct probe `u` values.
    pub fn geodesic_points(&self) -> Vec<Vec<f64>> {
        let d = self.metric.dim();
        let mut us: Vec<f64> = self.probes.iter().map(|p| p[0]).collect();
        us.sort_by(f64::total_cmp);
        us.dedup();
        us.into_iter()
            .map(|u| {
                let mut p = vec![0.0; d];
                p[0] = u;
                p
            })
            .collect()
    }
}

/// Checks the adapted shape at every probe and that `u ↦ (u, 0, 0)` is an
/// affinely parameterized null geodesic with `c` positive definite on it.
pub fn validate_adapted(g: &MetricField, probes: &[Vec<f64>]) -> Result<AdaptedMetric> {
    let chart = g.chart();
    if chart.names()[0] != "u" || chart.names()[1] != "v" {
        return Err(Error::Invalid(format!(
            "adapted metrics live on a chart (u, v, x...), got ({})",
            chart.names().join(", ")
        )));
    }
    if probes.is_empty() {
        return Err(Error::Invalid("no probe points".into()));
    }
    let d = g.dim();
    let names = chart.names();
    let mut shape = 0.0f64;
    for p in probes {
        let m = g.matrix_at(p)?;
        let mut check = |i: usize, j: usize, target: f64| -> Result<()> {
            let dev = (m[(i, j)] - target).abs();
            if !(dev <= SHAPE_TOL) {
                return Err(Error::Shape {
                    component: format!("g_{}{}", names[i], names[j]),
                    probe: p.clone(),
                    value: m[(i, j)],
                });
            }
            shape = shape.max(dev);
            Ok(())
        };
        check(0, 0, 0.0)?;
        check(0, 1, 1.0)?;
        for i in 2..d {
            check(0, i, 0.0)?;
        }
    }
    let mut am = AdaptedMetric {
        metric: g.clone(),
        probes: probes.to_vec(),
        shape_residual: shape,
        geodesic_residual: 0.0,
    };
    let mut geo = 0.0f64;
    for p in am.geodesic_points() {
        let gamma = christoffel(g, &p)?;
        let r = (0..d).map(|k| gamma[[k, 0, 0]].abs()).fold(0.0, f64::max);
        if !(r <= GEODESIC_TOL) {
            return Err(Error::GeodesicResidual { probe: p, residual: r });
        }
        geo = geo.max(r);
        let m = g.matrix_at(&p)?;
        let c = m.view((2, 2), (d - 2, d - 2)).into_owned();
        if !positive_definite(&c) {
            return Err(Error::SingularMetric { point: p });
        }
    }
    am.geodesic_residual = geo;
    Ok(am)
}

pub(crate) fn positive_definite(c: &DMatrix<f64>) -> bool {
    signature_of(c).is_some_and(|s| s.negative == 0 && s.positive == c.nrows())
}
