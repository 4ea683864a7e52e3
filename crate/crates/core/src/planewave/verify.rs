//! Numeric plane-wave predicate and the Killing-field characterization.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    conformal_killing_check, covariant_derivative, curvature, KillingTolerances, KillingVerdict, MetricField,
    VectorField,
};

pub const PLANE_WAVE_TOL: f64 = 1e-7;
pub const BRACKET_TOL: f64 = 1e-8;
/// `max |R|` below this at every probe flags the metric as flat.
pub const FLAT_TOL: f64 = 1e-9;

/// Basis of `ξ^⊥ = ker g(ξ, ·)`: `e_k − (η_k/η_p) e_p` for `k ≠ p`, where
/// `η = g(ξ, ·)` and `p` is the first index maximizing `|η_p|`.
pub fn perp_frame(g: &DMatrix<f64>, xi: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
    let eta = g * xi;
    let mut p = 0;
    for k in 1..eta.len() {
        if eta[k].abs() > eta[p].abs() {
            p = k;
        }
    }
    if eta[p] == 0.0 {
        return Err(Error::DegenerateFrame("g(ξ, ·) vanishes at the probe".into()));
    }
    let d = eta.len();
    Ok((0..d)
        .filter(|&k| k != p)
        .map(|k| {
            let mut e = DVector::zeros(d);
            e[k] = 1.0;
            e[p] = -eta[k] / eta[p];
            e
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct PlaneWaveVerdict {
    /// `max(|∇ξ|, |g(ξ,ξ)|)`
    pub parallel_null_residual: f64,
    /// `max |R(X,Y)|` over frame vectors of `ξ^⊥`
    pub curvature_flat_on_perp_residual: f64,
    /// `max |∇_X R|` over frame vectors of `ξ^⊥`
    pub nabla_r_on_perp_residual: f64,
    /// `max |R_ijkl|` over all probes
    pub max_curvature: f64,
    /// Zero curvature everywhere probed: a plane wave in this sense is not flat.
    pub flat: bool,
    pub tolerance: f64,
    pub probes: usize,
    pub pass: bool,
}

impl PlaneWaveVerdict {
    pub fn is_nonflat_plane_wave(&self) -> bool {
        self.pass && !self.flat
    }
}

/// Checks `∇ξ = 0`, `g(ξ,ξ) = 0`, `R(X,Y) = 0` and `∇_X R = 0` on `ξ^⊥`.
pub fn verify_plane_wave(g: &MetricField, xi: &VectorField, probes: &[Vec<f64>]) -> Result<PlaneWaveVerdict> {
    verify_plane_wave_tol(g, xi, probes, PLANE_WAVE_TOL)
}

pub fn verify_plane_wave_tol(
    g: &MetricField,
    xi: &VectorField,
    probes: &[Vec<f64>],
    tolerance: f64,
) -> Result<PlaneWaveVerdict> {
    if xi.dim() != g.dim() {
        return Err(Error::DimensionMismatch("ξ and metric on different charts".into()));
    }
    let d = g.dim();
    let (mut pn, mut cp, mut np, mut maxr) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in probes {
        let b = curvature(g, p)?;
        let xv = DVector::from_vec(xi.eval(p)?);
        let frame = perp_frame(&b.metric, &xv)?;
        let nabla_xi = covariant_derivative(g, xi, p)?;
        pn = pn.max(nabla_xi.amax()).max((xv.transpose() * &b.metric * &xv)[0].abs());
        maxr = maxr.max(b.max_abs_riemann());
        let nr = b.nabla_riemann.as_ref().expect("full bundle");
        for (a, x) in frame.iter().enumerate() {
            for y in &frame[a + 1..] {
                for k in 0..d {
                    for l in 0..d {
                        let mut s = 0.0;
                        for i in 0..d {
                            for j in 0..d {
                                s += b.riemann[[i, j, k, l]] * x[i] * y[j];
                            }
                        }
                        cp = cp.max(s.abs());
                    }
                }
            }
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let s: f64 = (0..d).map(|m| x[m] * nr[[m, i, j, k, l]]).sum();
                            np = np.max(s.abs());
                        }
                    }
                }
            }
        }
    }
    Ok(PlaneWaveVerdict {
        parallel_null_residual: pn,
        curvature_flat_on_perp_residual: cp,
        nabla_r_on_perp_residual: np,
        max_curvature: maxr,
        flat: maxr < FLAT_TOL,
        tolerance,
        probes: probes.len(),
        pass: pn < tolerance && cp < tolerance && np < tolerance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Hypothesis,
    Conclusion,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    /// Verdict and max residual for each field, `ξ_0` first.
    pub killing: Vec<(KillingVerdict, f64)>,
    pub all_killing: bool,
    /// `max |g(ξ_0, ξ_i)|` over fields and probes (includes `ξ_0` itself).
    pub orthogonality_residual: f64,
    /// Smallest rank of the field values over the probes.
    pub min_rank: usize,
    pub spans_perp: bool,
    /// `max |[ξ_0, ξ_i]|`
    pub central_bracket_residual: f64,
    /// `max |[ξ_i, ξ_j] − c ξ_0|` with `c` fitted per probe
    pub heisenberg_bracket_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropReport {
    pub hypotheses: HypothesisReport,
    /// Evaluated only when the hypotheses hold.
    pub conclusions: Option<PlaneWaveVerdict>,
    pub failed_stage: Option<Stage>,
    pub pass: bool,
}

fn numeric_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-8 * top.max(1.0)).count()
}

/// Hypotheses then conclusions of the Killing-field characterization:
/// `fields[0]` is `ξ_0`, the rest should be Killing, span `ξ_0^⊥` together
/// with it, commute with it, and bracket into `ℝ ξ_0`.
pub fn check_prop_pwkilling(fields: &[VectorField], g: &MetricField, probes: &[Vec<f64>]) -> Result<PropReport> {
    let d = g.dim();
    if fields.len() < d - 1 {
        return Err(Error::Invalid(format!(
            "need at least {} fields (ξ_0 and {} transverse), got {}",
            d - 1,
            d - 2,
            fields.len()
        )));
    }
    let killing: Vec<(KillingVerdict, f64)> = fields
        .iter()
        .map(|x| {
            let r = conformal_killing_check(g, x, probes, KillingTolerances::default())?;
            Ok((r.verdict, r.max_residual))
        })
        .collect::<Result<_>>()?;
    let all_killing = killing.iter().all(|(v, _)| *v == KillingVerdict::Killing);

    let mut brackets = Vec::new();
    for i in 0..fields.len() {
        for j in (i + 1)..fields.len() {
            brackets.push((i, fields[i].lie_bracket(&fields[j])?));
        }
    }
    let (mut ortho, mut min_rank, mut central, mut heis) = (0.0f64, usize::MAX, 0.0f64, 0.0f64);
    for p in probes {
        let gm = g.matrix_at(p)?;
        let vals: Vec<DVector<f64>> = fields
            .iter()
            .map(|x| Ok(DVector::from_vec(x.eval(p)?)))
            .collect::<Result<_>>()?;
        let xi0 = &vals[0];
        for v in &vals {
            ortho = ortho.max((xi0.transpose() * &gm * v)[0].abs());
        }
        let m = DMatrix::from_columns(&vals);
        min_rank = min_rank.min(numeric_rank(&m));
        let n0 = xi0.norm_squared();
        for (i, br) in &brackets {
            let b = DVector::from_vec(br.eval(p)?);
            if *i == 0 {
                central = central.max(b.amax());
            } else {
                let c = if n0 > 0.0 { b.dot(xi0) / n0 } else { 0.0 };
                heis = heis.max((&b - xi0 * c).amax());
            }
        }
    }
    let spans_perp = min_rank == d - 1 && ortho < BRACKET_TOL;
    let pass = all_killing && spans_perp && central < BRACKET_TOL && heis < BRACKET_TOL;
    let hypotheses = HypothesisReport {
        killing,
        all_killing,
        orthogonality_residual: ortho,
        min_rank,
        spans_perp,
        central_bracket_residual: central,
        heisenberg_bracket_residual: heis,
        pass,
    };
    if !pass {
        return Ok(PropReport {
            hypotheses,
            conclusions: None,
            failed_stage: Some(Stage::Hypothesis),
            pass: false,
        });
    }
    let conclusions = verify_plane_wave(g, &fields[0], probes)?;
    let ok = conclusions.pass;
    Ok(PropReport {
        hypotheses,
        conclusions: Some(conclusions),
        failed_stage: (!ok).then_some(Stage::Conclusion),
        pass: ok,
    })
}
